#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "elfd/errors.hpp"

namespace elfd {

using Histogram = Eigen::Matrix<std::int64_t, Eigen::Dynamic, 1>;

/// Partition of `source_bins` raw label bins into `valid_bins` groups.
class MergeMap {
 public:
  MergeMap(int source_bins, int valid_bins, std::vector<int> assignment);

  static MergeMap identity(int bins);

  int source_bins() const { return source_bins_; }
  int valid_bins() const { return valid_bins_; }
  const std::vector<int>& assignment() const { return assignment_; }
  int group(int bin) const { return assignment_.at(static_cast<std::size_t>(bin)); }

  friend bool operator==(const MergeMap&, const MergeMap&) = default;

 private:
  int source_bins_;
  int valid_bins_;
  std::vector<int> assignment_;
};

/// Greedy least-mass merging: repeatedly fuse the two groups with the smallest
/// (count, smallest member bin) keys until `valid_bins` groups remain. Group ids
/// follow ascending smallest member bin.
MergeMap learn_merge_map(const Histogram& global_histogram, int valid_bins);

/// Sums source-bin counts into their groups.
Histogram apply_merge(const Histogram& histogram, const MergeMap& map);

/// Text form: line 1 "B V", then one group id per source bin.
void write_merge_map(const MergeMap& map, std::ostream& out);
MergeMap read_merge_map(std::istream& in);

}  // namespace elfd
