#include "elfd/binmerge.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <utility>

#include "elfd/errors.hpp"

namespace elfd {

MergeMap::MergeMap(int source_bins, int valid_bins, std::vector<int> assignment)
    : source_bins_(source_bins), valid_bins_(valid_bins), assignment_(std::move(assignment)) {
  if (source_bins_ < 1 || valid_bins_ < 1) throw ParameterError("MergeMap: bin counts must be >= 1");
  if (valid_bins_ > source_bins_) throw ParameterError("MergeMap: more valid bins than source bins");
  if (static_cast<int>(assignment_.size()) != source_bins_) {
    throw ParameterError("MergeMap: assignment length differs from source bin count");
  }
  std::vector<bool> used(static_cast<std::size_t>(valid_bins_), false);
  for (int g : assignment_) {
    if (g < 0 || g >= valid_bins_) throw ParameterError("MergeMap: group id out of range");
    used[static_cast<std::size_t>(g)] = true;
  }
  for (bool u : used) {
    if (!u) throw ParameterError("MergeMap: empty valid bin");
  }
}

MergeMap MergeMap::identity(int bins) {
  std::vector<int> a(static_cast<std::size_t>(bins));
  for (int i = 0; i < bins; ++i) a[static_cast<std::size_t>(i)] = i;
  return MergeMap(bins, bins, std::move(a));
}

MergeMap learn_merge_map(const Histogram& global_histogram, int valid_bins) {
  const auto bins = static_cast<int>(global_histogram.size());
  if (valid_bins < 1) throw ParameterError("learn_merge_map: valid bin target must be >= 1");
  if (valid_bins > bins) throw ParameterError("learn_merge_map: valid bin target exceeds source bins");
  if ((global_histogram.array() < 0).any()) throw ParameterError("learn_merge_map: negative count");
  if (global_histogram.sum() <= 0) throw ParameterError("learn_merge_map: empty global histogram");

  // Groups are keyed by their smallest member bin; exact integer counts avoid tie ambiguity.
  std::set<std::pair<std::int64_t, int>> queue;
  std::map<int, std::vector<int>> members;
  std::vector<std::int64_t> mass(static_cast<std::size_t>(bins));
  for (int b = 0; b < bins; ++b) {
    mass[static_cast<std::size_t>(b)] = global_histogram(b);
    queue.emplace(global_histogram(b), b);
    members[b] = {b};
  }
  while (static_cast<int>(queue.size()) > valid_bins) {
    const auto first = *queue.begin();
    queue.erase(queue.begin());
    const auto second = *queue.begin();
    queue.erase(queue.begin());
    const int keep = std::min(first.second, second.second);
    const int drop = std::max(first.second, second.second);
    auto& kept = members[keep];
    auto& dropped = members[drop];
    kept.insert(kept.end(), dropped.begin(), dropped.end());
    members.erase(drop);
    mass[static_cast<std::size_t>(keep)] = first.first + second.first;
    queue.emplace(mass[static_cast<std::size_t>(keep)], keep);
  }

  std::vector<int> assignment(static_cast<std::size_t>(bins), -1);
  int id = 0;
  for (const auto& [smallest, group] : members) {
    for (int b : group) assignment[static_cast<std::size_t>(b)] = id;
    ++id;
  }
  return MergeMap(bins, valid_bins, std::move(assignment));
}

Histogram apply_merge(const Histogram& histogram, const MergeMap& map) {
  if (histogram.size() != map.source_bins()) {
    throw ParameterError("apply_merge: histogram has " + std::to_string(histogram.size()) +
                         " bins, map expects " + std::to_string(map.source_bins()));
  }
  Histogram out = Histogram::Zero(map.valid_bins());
  for (int b = 0; b < map.source_bins(); ++b) out(map.group(b)) += histogram(b);
  return out;
}

void write_merge_map(const MergeMap& map, std::ostream& out) {
  out << map.source_bins() << ' ' << map.valid_bins() << '\n';
  for (int g : map.assignment()) out << g << '\n';
}

MergeMap read_merge_map(std::istream& in) {
  int source = 0;
  int valid = 0;
  if (!(in >> source >> valid)) throw ParseError("merge map: missing 'B V' header");
  if (source < 1 || valid < 1 || valid > source) throw ParseError("merge map: invalid 'B V' header");
  std::vector<int> assignment(static_cast<std::size_t>(source));
  for (int b = 0; b < source; ++b) {
    if (!(in >> assignment[static_cast<std::size_t>(b)])) {
      throw ParseError("merge map: truncated at source bin " + std::to_string(b));
    }
  }
  try {
    return MergeMap(source, valid, std::move(assignment));
  } catch (const ParameterError& e) {
    throw ParseError(std::string("merge map: ") + e.what());
  }
}

}  // namespace elfd
