#include <doctest.h>

#include <algorithm>
#include <sstream>

#include "elfd/binmerge.hpp"
#include "oracles.hpp"

using namespace elfd;

namespace {

Histogram hist(std::initializer_list<std::int64_t> v) {
  Histogram h(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (auto c : v) h(i++) = c;
  return h;
}

std::vector<long long> to_vec(const Histogram& h) { return {h.data(), h.data() + h.size()}; }

}  // namespace

TEST_CASE("learn_merge_map worked examples") {
  const Histogram h = hist({4, 3, 2, 1});
  CHECK(learn_merge_map(h, 4).assignment() == std::vector<int>{0, 1, 2, 3});
  CHECK(learn_merge_map(h, 2).assignment() == std::vector<int>{0, 1, 1, 1});
  CHECK(oracle::brute_force_merge(to_vec(h), 2) == std::vector<int>{0, 1, 1, 1});
  CHECK(learn_merge_map(h, 3).assignment() == std::vector<int>{0, 1, 2, 2});
  CHECK(learn_merge_map(h, 1).assignment() == std::vector<int>{0, 0, 0, 0});
  CHECK_THROWS_AS(learn_merge_map(h, 5), ParameterError);
  CHECK_THROWS_AS(learn_merge_map(h, 0), ParameterError);
  CHECK_THROWS_AS(learn_merge_map(hist({0, 0}), 1), ParameterError);
}

TEST_CASE("zero bins merge first and ties go to the smallest bins") {
  // Zeros at 1 and 3 merge first; that empty group is still the lightest and takes {0}.
  const MergeMap m = learn_merge_map(hist({1, 0, 1, 0, 5}), 3);
  CHECK(m.assignment() == std::vector<int>{0, 0, 1, 0, 2});
}

TEST_CASE("learn_merge_map equals the brute-force greedy oracle") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const int bins = 1 + static_cast<int>(rng() % 64);
    const int v = 1 + static_cast<int>(rng() % static_cast<unsigned>(bins));
    Histogram h(bins);
    // Small count range forces plenty of ties.
    for (int b = 0; b < bins; ++b) h(b) = static_cast<std::int64_t>(rng() % 6);
    if (h.sum() == 0) h(0) = 1;
    const MergeMap m = learn_merge_map(h, v);
    CHECK(m.assignment() == oracle::brute_force_merge(to_vec(h), v));
    CHECK(m.valid_bins() == v);
  }
}

TEST_CASE("apply_merge") {
  const Histogram h = hist({4, 3, 2, 1});
  CHECK(apply_merge(h, MergeMap::identity(4)) == h);
  const MergeMap m(4, 2, {0, 1, 1, 1});
  CHECK(apply_merge(h, m) == hist({4, 6}));

  const Histogram ones = Histogram::Ones(4096);
  std::vector<int> a(4096);
  for (int i = 0; i < 4096; ++i) a[static_cast<std::size_t>(i)] = i % 16;
  CHECK(apply_merge(ones, MergeMap(4096, 16, a)).sum() == 4096);
  CHECK_THROWS_AS(apply_merge(hist({1, 2}), m), ParameterError);

  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    Histogram r(64);
    for (int b = 0; b < 64; ++b) r(b) = static_cast<std::int64_t>(rng() % 1000);
    const MergeMap learned = learn_merge_map(r, 1 + static_cast<int>(rng() % 64));
    const Histogram out = apply_merge(r, learned);
    CHECK(out.sum() == r.sum());
    for (int g = 0; g < learned.valid_bins(); ++g) {
      std::int64_t expect = 0;
      for (int b = 0; b < 64; ++b) {
        if (learned.assignment()[static_cast<std::size_t>(b)] == g) expect += r(b);
      }
      CHECK(out(g) == expect);
    }
  }
}

TEST_CASE("learned map depends only on the pooled histogram") {
  std::mt19937_64 rng(43);
  std::vector<Histogram> parts;
  for (int i = 0; i < 6; ++i) {
    Histogram p(256);
    for (int b = 0; b < 256; ++b) p(b) = static_cast<std::int64_t>(rng() % 7);
    parts.push_back(p);
  }
  Histogram forward = Histogram::Zero(256);
  for (const auto& p : parts) forward += p;
  std::reverse(parts.begin(), parts.end());
  std::swap(parts[1], parts[4]);
  Histogram shuffled = Histogram::Zero(256);
  for (const auto& p : parts) shuffled += p;
  CHECK(learn_merge_map(forward, 48) == learn_merge_map(shuffled, 48));
}

TEST_CASE("MergeMap validation and text form") {
  CHECK_THROWS_AS(MergeMap(4, 2, {0, 0, 0, 0}), ParameterError);
  CHECK_THROWS_AS(MergeMap(4, 2, {0, 1, 2, 0}), ParameterError);
  CHECK_THROWS_AS(MergeMap(2, 3, {0, 1}), ParameterError);
  CHECK_THROWS_AS(MergeMap(3, 2, {0, 1}), ParameterError);

  const MergeMap m = learn_merge_map(hist({9, 1, 1, 0, 4, 2}), 3);
  std::stringstream ss;
  write_merge_map(m, ss);
  CHECK(ss.str().substr(0, 4) == "6 3\n");
  CHECK(read_merge_map(ss) == m);

  std::istringstream truncated("6 3\n0\n1\n");
  CHECK_THROWS_AS(read_merge_map(truncated), ParseError);
  std::istringstream bad_group("2 2\n0\n0\n");
  CHECK_THROWS_AS(read_merge_map(bad_group), ParseError);
}
