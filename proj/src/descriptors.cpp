#include "elfd/descriptors.hpp"

#include <string>

namespace elfd {

std::string_view to_string(DescriptorKind kind) {
  switch (kind) {
    case DescriptorKind::lmd: return "lmd";
    case DescriptorKind::lpd: return "lpd";
    case DescriptorKind::elmd: return "elmd";
    case DescriptorKind::elpd: return "elpd";
  }
  return "?";
}

DescriptorKind parse_kind(std::string_view name) {
  if (name == "lmd") return DescriptorKind::lmd;
  if (name == "lpd") return DescriptorKind::lpd;
  if (name == "elmd") return DescriptorKind::elmd;
  if (name == "elpd") return DescriptorKind::elpd;
  throw ParameterError("unknown descriptor kind '" + std::string(name) + "'");
}

std::array<FrequencyPair, 12> frequency_pairs() {
  std::array<FrequencyPair, 12> pairs{};
  std::size_t i = 0;
  for (int p = 0; p < 4; ++p) {
    for (int c = 0; c < 4; ++c) {
      if (c != p) pairs[i++] = {p, c};
    }
  }
  return pairs;
}

unsigned encode_bits(std::span<const std::uint8_t> bits) {
  unsigned code = 0;
  for (std::size_t w = 0; w < bits.size(); ++w) {
    if (bits[w] > 1) throw ParameterError("encode_bits: bit values must be 0 or 1");
    code += static_cast<unsigned>(bits[w]) << w;
  }
  return code;
}

namespace {

constexpr auto kMagnitudeBit = [](double k, double m) { return magnitude_bit(k, m); };
constexpr auto kPhaseBit = [](std::uint8_t k, std::uint8_t m) { return phase_bit(k, m); };

}  // namespace

LabelImage label_image(const StftPlanes& planes, DescriptorKind kind, int target) {
  if (target < 0 || target >= target_count(kind)) throw ParameterError("label_image: target out of range");
  if (!is_enhanced(kind)) {
    const auto i = static_cast<std::size_t>(target);
    return uses_magnitude(kind) ? ring_labels(planes.magnitude(i), kMagnitudeBit)
                                : ring_labels(planes.quadrants(i), kPhaseBit);
  }
  const FrequencyPair pair = frequency_pairs()[static_cast<std::size_t>(target)];
  const auto p = static_cast<std::size_t>(pair.principal);
  const auto c = static_cast<std::size_t>(pair.correlated);
  return uses_magnitude(kind) ? joint_labels(planes.magnitude(p), planes.magnitude(c), kMagnitudeBit)
                              : joint_labels(planes.quadrants(p), planes.quadrants(c), kPhaseBit);
}

std::vector<LabelImage> label_images(const StftPlanes& planes, DescriptorKind kind) {
  std::vector<LabelImage> out;
  out.reserve(static_cast<std::size_t>(target_count(kind)));
  if (uses_magnitude(kind)) {
    std::array<RealPlane, 4> mags;
    for (std::size_t i = 0; i < 4; ++i) mags[i] = planes.magnitude(i);
    if (!is_enhanced(kind)) {
      for (const auto& m : mags) out.push_back(ring_labels(m, kMagnitudeBit));
    } else {
      for (const auto& pr : frequency_pairs()) {
        out.push_back(joint_labels(mags[static_cast<std::size_t>(pr.principal)],
                                   mags[static_cast<std::size_t>(pr.correlated)], kMagnitudeBit));
      }
    }
  } else {
    std::array<Plane<std::uint8_t>, 4> quads;
    for (std::size_t i = 0; i < 4; ++i) quads[i] = planes.quadrants(i);
    if (!is_enhanced(kind)) {
      for (const auto& q : quads) out.push_back(ring_labels(q, kPhaseBit));
    } else {
      for (const auto& pr : frequency_pairs()) {
        out.push_back(joint_labels(quads[static_cast<std::size_t>(pr.principal)],
                                   quads[static_cast<std::size_t>(pr.correlated)], kPhaseBit));
      }
    }
  }
  return out;
}

GrayImage label_preview(const LabelImage& labels, DescriptorKind kind) {
  const double top = raw_bins(kind) - 1;
  return GrayImage(RealPlane(labels.cast<double>() / top));
}

std::array<Eigen::Index, 5> region_bounds(Eigen::Index extent) {
  const Eigen::Index step = extent / kRegionGrid;
  std::array<Eigen::Index, 5> b{};
  for (int i = 0; i < kRegionGrid; ++i) b[static_cast<std::size_t>(i)] = i * step;
  b[kRegionGrid] = extent;
  return b;
}

RegionalHistogramSet regional_histograms(const LabelImage& labels, int bins) {
  if (bins != 256 && bins != 4096) throw ParameterError("regional_histograms: bins must be 256 or 4096");
  RegionalHistogramSet set;
  set.bins = bins;
  set.counts.setZero(bins, kRegionCount);
  const auto rb = region_bounds(labels.rows());
  const auto cb = region_bounds(labels.cols());
  for (int i = 0; i < kRegionGrid; ++i) {
    for (int j = 0; j < kRegionGrid; ++j) {
      const int region = i * kRegionGrid + j;
      for (Eigen::Index y = rb[static_cast<std::size_t>(i)]; y < rb[static_cast<std::size_t>(i) + 1]; ++y) {
        for (Eigen::Index x = cb[static_cast<std::size_t>(j)]; x < cb[static_cast<std::size_t>(j) + 1]; ++x) {
          const int label = labels(y, x);
          if (label >= bins) throw std::logic_error("regional_histograms: label exceeds bin range");
          ++set.counts(label, region);
        }
      }
    }
  }
  return set;
}

FeatureVector assemble_feature(std::span<const RegionalHistogramSet> sets, std::span<const MergeMap> maps,
                               const FeatureLayout& layout) {
  if (static_cast<int>(sets.size()) != layout.targets || maps.size() != sets.size()) {
    throw ParameterError("assemble_feature: expected one histogram set and merge map per target");
  }
  FeatureVector feature{Eigen::VectorXd::Zero(layout.dimension()), layout};
  Eigen::Index offset = 0;
  for (std::size_t t = 0; t < sets.size(); ++t) {
    if (maps[t].source_bins() != sets[t].bins) throw ParameterError("assemble_feature: merge map bin count mismatch");
    if (maps[t].valid_bins() != layout.valid_bins) {
      throw ParameterError("assemble_feature: merge map valid bins differ from layout");
    }
    for (int r = 0; r < kRegionCount; ++r) {
      const Histogram merged = apply_merge(sets[t].region(r), maps[t]);
      const auto total = static_cast<double>(merged.sum());
      if (total > 0.0) feature.values.segment(offset, layout.valid_bins) = merged.cast<double>() / total;
      offset += layout.valid_bins;
    }
  }
  const double norm = feature.values.norm();
  if (norm > 0.0) feature.values /= norm;
  return feature;
}

std::vector<RegionalHistogramSet> extract_histograms(const GrayImage& image, int scale, DescriptorKind kind) {
  const StftPlanes planes = compute_planes(image, scale);
  std::vector<RegionalHistogramSet> sets;
  for (const auto& labels : label_images(planes, kind)) sets.push_back(regional_histograms(labels, raw_bins(kind)));
  return sets;
}

FeatureVector extract_feature(const GrayImage& image, int scale, DescriptorKind kind, std::span<const MergeMap> maps) {
  if (maps.empty()) throw ParameterError("extract_feature: no merge maps");
  const FeatureLayout layout{kind, scale, target_count(kind), maps.front().valid_bins()};
  const auto sets = extract_histograms(image, scale, kind);
  return assemble_feature(sets, maps, layout);
}

}  // namespace elfd
