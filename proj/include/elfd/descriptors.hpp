#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "elfd/binmerge.hpp"
#include "elfd/stft.hpp"

namespace elfd {

enum class DescriptorKind { lmd, lpd, elmd, elpd };

std::string_view to_string(DescriptorKind kind);
DescriptorKind parse_kind(std::string_view name);

constexpr bool is_enhanced(DescriptorKind k) { return k == DescriptorKind::elmd || k == DescriptorKind::elpd; }
constexpr bool uses_magnitude(DescriptorKind k) { return k == DescriptorKind::lmd || k == DescriptorKind::elmd; }
constexpr int raw_bins(DescriptorKind k) { return is_enhanced(k) ? 4096 : 256; }
/// Number of label images per scale: 4 frequency planes or 12 ordered frequency pairs.
constexpr int target_count(DescriptorKind k) { return is_enhanced(k) ? 12 : 4; }
constexpr int default_valid_bins(DescriptorKind k) { return is_enhanced(k) ? 16 : 48; }

struct Offset {
  int dy;
  int dx;
};

/// Clockwise from top-left, (row, col).
inline constexpr std::array<Offset, 8> kEightRing{
    {{-1, -1}, {-1, 0}, {-1, 1}, {0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}}};
/// Up, right, down, left.
inline constexpr std::array<Offset, 4> kFourCross{{{-1, 0}, {0, 1}, {1, 0}, {0, -1}}};

/// Ordered (principal, correlated) frequency indices, 0-based.
struct FrequencyPair {
  int principal;
  int correlated;
};

/// (u1,u2), (u1,u3), (u1,u4), (u2,u1), ..., (u4,u3).
std::array<FrequencyPair, 12> frequency_pairs();

using LabelImage = Plane<std::uint16_t>;

/// bits[w-1] contributes 2^(w-1).
unsigned encode_bits(std::span<const std::uint8_t> bits);

inline std::uint8_t magnitude_bit(double focused, double neighbor) { return focused >= neighbor ? 1 : 0; }
inline std::uint8_t phase_bit(int focused_quadrant, int neighbor_quadrant) {
  return focused_quadrant == neighbor_quadrant ? 1 : 0;
}

namespace detail {

template <typename Derived>
auto replicate_at(const Eigen::ArrayBase<Derived>& p, Eigen::Index y, Eigen::Index x) {
  return p(std::clamp<Eigen::Index>(y, 0, p.rows() - 1), std::clamp<Eigen::Index>(x, 0, p.cols() - 1));
}

}  // namespace detail

/// 8-bit codes: bit w (w = 1..8) compares each pixel with its kEightRing[w-1] neighbor.
template <typename Derived, typename BitFn>
LabelImage ring_labels(const Eigen::ArrayBase<Derived>& plane, BitFn bit) {
  LabelImage out(plane.rows(), plane.cols());
  for (Eigen::Index y = 0; y < plane.rows(); ++y) {
    for (Eigen::Index x = 0; x < plane.cols(); ++x) {
      const auto center = plane(y, x);
      unsigned code = 0;
      for (std::size_t w = 0; w < kEightRing.size(); ++w) {
        const auto n = detail::replicate_at(plane, y + kEightRing[w].dy, x + kEightRing[w].dx);
        code |= static_cast<unsigned>(bit(center, n)) << w;
      }
      out(y, x) = static_cast<std::uint16_t>(code);
    }
  }
  return out;
}

/// 12-bit codes: bits 1..4 from kFourCross on the correlated plane, bits 5..12
/// from kEightRing on the principal plane.
template <typename DerivedP, typename DerivedC, typename BitFn>
LabelImage joint_labels(const Eigen::ArrayBase<DerivedP>& principal, const Eigen::ArrayBase<DerivedC>& correlated,
                        BitFn bit) {
  if (principal.rows() != correlated.rows() || principal.cols() != correlated.cols()) {
    throw ParameterError("joint_labels: plane dimensions differ");
  }
  LabelImage out(principal.rows(), principal.cols());
  for (Eigen::Index y = 0; y < principal.rows(); ++y) {
    for (Eigen::Index x = 0; x < principal.cols(); ++x) {
      unsigned code = 0;
      const auto c_center = correlated(y, x);
      for (std::size_t w = 0; w < kFourCross.size(); ++w) {
        const auto n = detail::replicate_at(correlated, y + kFourCross[w].dy, x + kFourCross[w].dx);
        code |= static_cast<unsigned>(bit(c_center, n)) << w;
      }
      const auto p_center = principal(y, x);
      for (std::size_t w = 0; w < kEightRing.size(); ++w) {
        const auto n = detail::replicate_at(principal, y + kEightRing[w].dy, x + kEightRing[w].dx);
        code |= static_cast<unsigned>(bit(p_center, n)) << (w + 4);
      }
      out(y, x) = static_cast<std::uint16_t>(code);
    }
  }
  return out;
}

/// Label image of `target` (plane index for lmd/lpd, index into frequency_pairs() for elmd/elpd).
LabelImage label_image(const StftPlanes& planes, DescriptorKind kind, int target);
/// All target_count(kind) label images, sharing the magnitude/quadrant evaluation.
std::vector<LabelImage> label_images(const StftPlanes& planes, DescriptorKind kind);

/// Linear scaling of codes to [0,1] for diagnostic dumps.
GrayImage label_preview(const LabelImage& labels, DescriptorKind kind);

/// Start offsets of the four bands along an axis of length `extent`; the last band absorbs the remainder.
std::array<Eigen::Index, 5> region_bounds(Eigen::Index extent);

inline constexpr int kRegionGrid = 4;
inline constexpr int kRegionCount = kRegionGrid * kRegionGrid;

/// Per-region label counts of one label image; column r = region (r / 4, r % 4).
struct RegionalHistogramSet {
  int bins = 0;
  Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic> counts;  // bins x 16

  Histogram region(int r) const { return counts.col(r); }
  Histogram pooled() const { return counts.rowwise().sum(); }
};

RegionalHistogramSet regional_histograms(const LabelImage& labels, int bins);

inline constexpr int kLayoutVersion = 1;
inline constexpr std::string_view kLayoutOrder = "target-major,region-row-major,valid-bin";

struct FeatureLayout {
  DescriptorKind kind = DescriptorKind::elmd;
  int scale = 0;
  int targets = 0;
  int valid_bins = 0;

  Eigen::Index dimension() const { return static_cast<Eigen::Index>(targets) * kRegionCount * valid_bins; }
};

struct FeatureVector {
  Eigen::VectorXd values;
  FeatureLayout layout;
};

/// Reduce each regional histogram through its target's merge map, L1-normalize per region,
/// concatenate in layout order, then L2-normalize the whole vector.
FeatureVector assemble_feature(std::span<const RegionalHistogramSet> sets, std::span<const MergeMap> maps,
                               const FeatureLayout& layout);

/// Regional histograms of every target at one scale.
std::vector<RegionalHistogramSet> extract_histograms(const GrayImage& image, int scale, DescriptorKind kind);

/// Full pipeline: planes, labels, histograms, merged feature.
FeatureVector extract_feature(const GrayImage& image, int scale, DescriptorKind kind, std::span<const MergeMap> maps);

}  // namespace elfd
