#pragma once

#include <Eigen/Dense>

#include <limits>
#include <span>
#include <string>
#include <vector>

#include "elfd/descriptors.hpp"

namespace elfd {

inline constexpr double kDefaultLambda = 0.01;

/// Training features as unit-norm columns with their class ids.
class Dictionary {
 public:
  Dictionary(Eigen::MatrixXd columns, std::vector<int> class_ids, int class_count);

  const Eigen::MatrixXd& columns() const { return columns_; }
  const std::vector<int>& class_ids() const { return class_ids_; }
  int class_count() const { return class_count_; }
  Eigen::Index dimension() const { return columns_.rows(); }
  Eigen::Index size() const { return columns_.cols(); }

 private:
  Eigen::MatrixXd columns_;
  std::vector<int> class_ids_;
  int class_count_;
};

template <typename Scalar>
struct CodingSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> alpha;
  Scalar lambda;
};

/// argmin_a ||y - D a||^2 + lambda ||a||^2, i.e. (D^T D + lambda I) a = D^T y.
/// Uses the N x N Gram system when N <= d and the equivalent d x d system
/// a = D^T (D D^T + lambda I)^-1 y otherwise.
template <typename DerivedD, typename DerivedY>
CodingSolution<typename DerivedD::Scalar> solve_coding(const Eigen::MatrixBase<DerivedD>& dict,
                                                       const Eigen::MatrixBase<DerivedY>& y,
                                                       typename DerivedD::Scalar lambda) {
  using Scalar = typename DerivedD::Scalar;
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (dict.rows() < 1 || dict.cols() < 1) throw ParameterError("solve_coding: empty dictionary");
  if (y.size() != dict.rows()) throw ParameterError("solve_coding: probe dimension mismatch");
  if (!(lambda > Scalar(0))) throw ParameterError("solve_coding: lambda must be > 0");
  if (!dict.allFinite() || !y.allFinite()) throw ParameterError("solve_coding: non-finite input");
  const Eigen::Index n = dict.cols();
  const Eigen::Index d = dict.rows();
  Vector alpha;
  if (n <= d) {
    Matrix gram = dict.transpose() * dict;
    gram.diagonal().array() += lambda;
    alpha = gram.ldlt().solve(dict.transpose() * y);
  } else {
    Matrix outer = dict * dict.transpose();
    outer.diagonal().array() += lambda;
    alpha = dict.transpose() * outer.ldlt().solve(y);
  }
  return {std::move(alpha), lambda};
}

/// Cached factorization of (D^T D + lambda I) for repeated probes against one dictionary.
class RidgeCoder {
 public:
  RidgeCoder(const Eigen::MatrixXd& dict, double lambda);

  Eigen::VectorXd solve(const Eigen::VectorXd& y) const;
  double lambda() const { return lambda_; }

 private:
  Eigen::MatrixXd dict_;
  double lambda_;
  Eigen::LDLT<Eigen::MatrixXd> factor_;
};

/// d_i = ||y - D_i a_i||, reconstructing y from class-i columns and their coefficients only.
Eigen::VectorXd class_distances(const Eigen::MatrixXd& dict, std::span<const int> class_ids, int class_count,
                                const Eigen::VectorXd& alpha, const Eigen::VectorXd& y);

/// Substitute for the confidence when the runner-up distance vanishes but the best does not.
inline constexpr double kDegenerateConfidence = -1e9;
inline constexpr double kZeroDistance = 1e-12;

struct Candidate {
  int class_id = -1;
  double confidence = 0.0;
  bool degenerate = false;
};

/// e(c_i | x) = 1 - d_i / min_{k != i} d_k.
double generalized_confidence(const Eigen::VectorXd& distances, int class_id);

/// Best class (lowest id on ties) and its generalized confidence.
Candidate first_candidate_confidence(const Eigen::VectorXd& distances);

/// Trained state of one scale.
struct ScaleModel {
  int scale = 0;
  std::vector<MergeMap> maps;
  Dictionary dictionary;
  RidgeCoder coder;

  ScaleModel(int scale, std::vector<MergeMap> maps, Dictionary dictionary, double lambda);
};

/// Per-scale models of one descriptor kind, sorted by ascending scale.
struct ScaleBank {
  DescriptorKind kind = DescriptorKind::elmd;
  double lambda = kDefaultLambda;
  int valid_bins = 0;
  std::vector<std::string> class_names;
  std::vector<ScaleModel> models;

  std::vector<int> scales() const;
  const ScaleModel& at(int scale) const;
  int class_count() const { return static_cast<int>(class_names.size()); }
};

struct TrainingSample {
  GrayImage image;
  int class_id;
};

/// Merge maps from the pooled training histograms of every target, then the feature dictionary.
ScaleModel build_scale_model(std::span<const TrainingSample> samples, int class_count, DescriptorKind kind,
                             int scale, int valid_bins, double lambda);

ScaleBank build_bank(std::span<const TrainingSample> samples, std::vector<std::string> class_names,
                     DescriptorKind kind, std::span<const int> scales, int valid_bins, double lambda);

struct ScaleOutcome {
  int scale = 0;
  int class_id = -1;
  double confidence = 0.0;
  bool degenerate = false;
  Eigen::VectorXd distances;
};

struct RecognitionResult {
  int identity = -1;
  int winning_scale = 0;
  double confidence = -std::numeric_limits<double>::infinity();
  std::vector<ScaleOutcome> per_scale;
};

ScaleOutcome recognize_feature(const ScaleModel& model, const Eigen::VectorXd& feature);
ScaleOutcome recognize_single_scale(const ScaleBank& bank, int scale, const GrayImage& image);

/// Winner = maximum confidence, smallest scale on ties.
RecognitionResult compete(std::vector<ScaleOutcome> outcomes);

RecognitionResult multiscale_recognize(const ScaleBank& bank, const GrayImage& image);
RecognitionResult multiscale_recognize(const ScaleBank& bank, const GrayImage& image, std::span<const int> scales);

}  // namespace elfd
