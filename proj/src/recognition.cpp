#include "elfd/recognition.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace elfd {

Dictionary::Dictionary(Eigen::MatrixXd columns, std::vector<int> class_ids, int class_count)
    : columns_(std::move(columns)), class_ids_(std::move(class_ids)), class_count_(class_count) {
  if (columns_.cols() < 1 || columns_.rows() < 1) throw ParameterError("Dictionary: empty");
  if (static_cast<Eigen::Index>(class_ids_.size()) != columns_.cols()) {
    throw ParameterError("Dictionary: one class id per column required");
  }
  if (class_count_ < 1) throw ParameterError("Dictionary: class_count must be >= 1");
  std::vector<int> per_class(static_cast<std::size_t>(class_count_), 0);
  for (int id : class_ids_) {
    if (id < 0 || id >= class_count_) throw ParameterError("Dictionary: class id out of range");
    ++per_class[static_cast<std::size_t>(id)];
  }
  if (std::find(per_class.begin(), per_class.end(), 0) != per_class.end()) {
    throw ParameterError("Dictionary: every class needs at least one column");
  }
  for (Eigen::Index c = 0; c < columns_.cols(); ++c) {
    if (std::abs(columns_.col(c).norm() - 1.0) > 1e-9) throw ParameterError("Dictionary: columns must be unit norm");
  }
}

RidgeCoder::RidgeCoder(const Eigen::MatrixXd& dict, double lambda) : dict_(dict), lambda_(lambda) {
  if (!(lambda > 0.0)) throw ParameterError("RidgeCoder: lambda must be > 0");
  Eigen::MatrixXd gram = dict_.transpose() * dict_;
  gram.diagonal().array() += lambda_;
  factor_.compute(gram);
}

Eigen::VectorXd RidgeCoder::solve(const Eigen::VectorXd& y) const {
  if (y.size() != dict_.rows()) throw ParameterError("RidgeCoder: probe dimension mismatch");
  if (!y.allFinite()) throw ParameterError("RidgeCoder: non-finite probe");
  return factor_.solve(dict_.transpose() * y);
}

Eigen::VectorXd class_distances(const Eigen::MatrixXd& dict, std::span<const int> class_ids, int class_count,
                                const Eigen::VectorXd& alpha, const Eigen::VectorXd& y) {
  if (static_cast<Eigen::Index>(class_ids.size()) != dict.cols() || alpha.size() != dict.cols() ||
      y.size() != dict.rows()) {
    throw ParameterError("class_distances: inconsistent dimensions");
  }
  Eigen::MatrixXd recon = Eigen::MatrixXd::Zero(dict.rows(), class_count);
  for (Eigen::Index j = 0; j < dict.cols(); ++j) {
    recon.col(class_ids[static_cast<std::size_t>(j)]) += alpha(j) * dict.col(j);
  }
  return (recon.colwise() - y).colwise().norm().transpose();
}

double generalized_confidence(const Eigen::VectorXd& distances, int class_id) {
  if (distances.size() < 2) throw ParameterError("generalized_confidence: needs >= 2 classes");
  double runner_up = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < distances.size(); ++k) {
    if (k != class_id) runner_up = std::min(runner_up, distances(k));
  }
  const double own = distances(class_id);
  if (runner_up < kZeroDistance) return own < kZeroDistance ? 0.0 : kDegenerateConfidence;
  return 1.0 - own / runner_up;
}

Candidate first_candidate_confidence(const Eigen::VectorXd& distances) {
  if (distances.size() < 2) throw ParameterError("first_candidate_confidence: needs >= 2 classes");
  if (!distances.allFinite() || (distances.array() < 0.0).any()) {
    throw ParameterError("first_candidate_confidence: distances must be finite and nonnegative");
  }
  Eigen::Index best = 0;
  distances.minCoeff(&best);  // first minimum, i.e. the lowest class id on ties
  Candidate c;
  c.class_id = static_cast<int>(best);
  double runner_up = std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < distances.size(); ++k) {
    if (k != best) runner_up = std::min(runner_up, distances(k));
  }
  c.degenerate = runner_up < kZeroDistance;
  c.confidence = generalized_confidence(distances, c.class_id);
  return c;
}

ScaleModel::ScaleModel(int scale_, std::vector<MergeMap> maps_, Dictionary dictionary_, double lambda)
    : scale(scale_), maps(std::move(maps_)), dictionary(std::move(dictionary_)), coder(dictionary.columns(), lambda) {}

std::vector<int> ScaleBank::scales() const {
  std::vector<int> out;
  for (const auto& m : models) out.push_back(m.scale);
  return out;
}

const ScaleModel& ScaleBank::at(int scale) const {
  for (const auto& m : models) {
    if (m.scale == scale) return m;
  }
  throw ParameterError("scale " + std::to_string(scale) + " is not in the bank");
}

ScaleModel build_scale_model(std::span<const TrainingSample> samples, int class_count, DescriptorKind kind,
                             int scale, int valid_bins, double lambda) {
  if (samples.empty()) throw ParameterError("build_scale_model: no training samples");
  const int targets = target_count(kind);
  std::vector<std::vector<RegionalHistogramSet>> per_image;
  per_image.reserve(samples.size());
  for (const auto& s : samples) per_image.push_back(extract_histograms(s.image, scale, kind));

  std::vector<MergeMap> maps;
  maps.reserve(static_cast<std::size_t>(targets));
  for (int t = 0; t < targets; ++t) {
    Histogram global = Histogram::Zero(raw_bins(kind));
    for (const auto& sets : per_image) global += sets[static_cast<std::size_t>(t)].pooled();
    maps.push_back(learn_merge_map(global, valid_bins));
  }

  const FeatureLayout layout{kind, scale, targets, valid_bins};
  Eigen::MatrixXd columns(layout.dimension(), static_cast<Eigen::Index>(samples.size()));
  std::vector<int> ids;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    columns.col(static_cast<Eigen::Index>(i)) = assemble_feature(per_image[i], maps, layout).values;
    ids.push_back(samples[i].class_id);
  }
  return ScaleModel(scale, std::move(maps), Dictionary(std::move(columns), std::move(ids), class_count), lambda);
}

ScaleBank build_bank(std::span<const TrainingSample> samples, std::vector<std::string> class_names,
                     DescriptorKind kind, std::span<const int> scales, int valid_bins, double lambda) {
  if (scales.empty()) throw ParameterError("build_bank: no scales");
  std::vector<int> sorted(scales.begin(), scales.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  ScaleBank bank;
  bank.kind = kind;
  bank.lambda = lambda;
  bank.valid_bins = valid_bins;
  bank.class_names = std::move(class_names);
  for (int scale : sorted) {
    bank.models.push_back(build_scale_model(samples, bank.class_count(), kind, scale, valid_bins, lambda));
  }
  return bank;
}

ScaleOutcome recognize_feature(const ScaleModel& model, const Eigen::VectorXd& feature) {
  const Eigen::VectorXd alpha = model.coder.solve(feature);
  ScaleOutcome out;
  out.scale = model.scale;
  out.distances = class_distances(model.dictionary.columns(), model.dictionary.class_ids(),
                                  model.dictionary.class_count(), alpha, feature);
  const Candidate c = first_candidate_confidence(out.distances);
  out.class_id = c.class_id;
  out.confidence = c.confidence;
  out.degenerate = c.degenerate;
  return out;
}

ScaleOutcome recognize_single_scale(const ScaleBank& bank, int scale, const GrayImage& image) {
  const ScaleModel& model = bank.at(scale);
  return recognize_feature(model, extract_feature(image, scale, bank.kind, model.maps).values);
}

RecognitionResult compete(std::vector<ScaleOutcome> outcomes) {
  if (outcomes.empty()) throw ParameterError("compete: no scale outcomes");
  std::stable_sort(outcomes.begin(), outcomes.end(),
                   [](const ScaleOutcome& a, const ScaleOutcome& b) { return a.scale < b.scale; });
  RecognitionResult r;
  for (const auto& o : outcomes) {
    if (o.confidence > r.confidence) {
      r.confidence = o.confidence;
      r.identity = o.class_id;
      r.winning_scale = o.scale;
    }
  }
  r.per_scale = std::move(outcomes);
  return r;
}

RecognitionResult multiscale_recognize(const ScaleBank& bank, const GrayImage& image, std::span<const int> scales) {
  std::vector<ScaleOutcome> outcomes;
  for (int s : scales) outcomes.push_back(recognize_single_scale(bank, s, image));
  return compete(std::move(outcomes));
}

RecognitionResult multiscale_recognize(const ScaleBank& bank, const GrayImage& image) {
  const auto scales = bank.scales();
  return multiscale_recognize(bank, image, scales);
}

}  // namespace elfd
