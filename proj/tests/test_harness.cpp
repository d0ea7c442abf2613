#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "elfd/harness.hpp"
#include "elfd/model_io.hpp"
#include "test_support.hpp"

using namespace elfd;
namespace fs = std::filesystem;

namespace {

DatasetManifest fake_manifest(int classes, int per_class) {
  DatasetManifest m;
  for (int c = 0; c < classes; ++c) {
    ClassEntry e{"c" + std::to_string(c), {}};
    for (int i = 0; i < per_class; ++i) e.images.push_back("c" + std::to_string(c) + "/" + std::to_string(i) + ".pgm");
    m.classes.push_back(e);
  }
  return m;
}

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const std::exception& e) {
    return e.what();
  }
  return {};
}

// Small, fast experiment over a synthetic dataset.
ExperimentConfig small_config(const fs::path& dataset, const fs::path& output) {
  ExperimentConfig c;
  c.dataset = dataset;
  c.output = output;
  c.seed = 7;
  c.n_train = 3;
  c.kinds = {DescriptorKind::lmd, DescriptorKind::elmd};
  c.single_scale = 5;
  c.competition_scales = {5, 7};
  c.degradations = {"clean", "gaussian:1:5"};
  return c;
}

}  // namespace

TEST_CASE("scan_dataset sorts classes and images") {
  const fs::path root = support::fresh_dir("elfd_test_scan");
  for (const char* c : {"zeta", "alpha"}) {
    fs::create_directories(root / c);
    for (const char* f : {"b.pgm", "a.PGM", "notes.txt"}) std::ofstream(root / c / f) << "x";
  }
  const DatasetManifest m = scan_dataset(root);
  REQUIRE(m.classes.size() == 2);
  CHECK(m.classes[0].name == "alpha");
  CHECK(m.classes[1].name == "zeta");
  REQUIRE(m.classes[0].images.size() == 2);
  CHECK(m.classes[0].images[0].filename() == "a.PGM");

  fs::create_directories(root / "empty");
  CHECK(error_of([&] { scan_dataset(root); }).find("empty") != std::string::npos);
  CHECK_THROWS_AS(scan_dataset(root / "missing"), IoError);
}

TEST_CASE("split_dataset") {
  const DatasetManifest m = fake_manifest(4, 6);
  const Split a = split_dataset(m, 11, 3);
  const Split b = split_dataset(m, 11, 3);
  CHECK(a.train.size() == 12);
  CHECK(a.test.size() == 12);
  for (std::size_t i = 0; i < a.train.size(); ++i) CHECK(a.train[i].image == b.train[i].image);

  // Train and test partition every class.
  for (int c = 0; c < 4; ++c) {
    std::set<fs::path> seen;
    for (const auto& r : a.train) if (r.class_id == c) seen.insert(r.image);
    for (const auto& r : a.test) if (r.class_id == c) seen.insert(r.image);
    CHECK(seen.size() == 6);
  }

  const Split tight = split_dataset(m, 3, 5);
  CHECK(tight.test.size() == 4);

  CHECK(error_of([&] { split_dataset(m, 1, 6); }).find("class c0 has no test samples") != std::string::npos);
  CHECK_THROWS_AS(split_dataset(m, 1, 0), ParameterError);

  // Every 3-subset of 6 images shows up as a training set across seeds.
  const DatasetManifest one = fake_manifest(1, 6);
  std::set<std::set<fs::path>> subsets;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const Split s = split_dataset(one, seed, 3);
    std::set<fs::path> t;
    for (const auto& r : s.train) t.insert(r.image);
    subsets.insert(t);
  }
  CHECK(subsets.size() == 20);
}

TEST_CASE("uniform_below stays in range and covers it") {
  std::mt19937_64 engine(5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const auto v = uniform_below(engine, 7);
    REQUIRE(v < 7);
    ++hits[v];
  }
  for (int h : hits) CHECK(h > 800);
  CHECK_THROWS_AS(uniform_below(engine, 0), ParameterError);
}

TEST_CASE("config parsing") {
  const ExperimentConfig d;
  CHECK(d.required_scales().size() == 11);
  CHECK(config_keys().size() == 15);

  const ExperimentConfig parsed = config_from_map({{"dataset", "data"}, {"scales", "5:9:2"}, {"kinds", "elmd,lpd"},
                                                   {"degradations", "clean,lowres:2"}, {"resize", "40x30"},
                                                   {"v_elmd", "8"}});
  CHECK(parsed.competition_scales == std::vector<int>{5, 7, 9});
  CHECK(parsed.kinds == std::vector<DescriptorKind>{DescriptorKind::elmd, DescriptorKind::lpd});
  CHECK(parsed.valid_bins.at(DescriptorKind::elmd) == 8);
  CHECK(parsed.valid_bins.at(DescriptorKind::lmd) == 48);
  REQUIRE(parsed.resize);
  CHECK(parsed.resize->first == 40);
  CHECK(parsed.resize->second == 30);
  CHECK(config_from_map({{"scales", "9,5"}}).competition_scales == std::vector<int>{9, 5});

  CHECK(config_to_map(config_from_map(config_to_map(parsed))) == config_to_map(parsed));

  CHECK_THROWS_AS(config_from_map({{"bogus", "1"}}), ParseError);
  CHECK_THROWS_AS(config_from_map({{"scales", "4,6"}}), ParseError);
  CHECK_THROWS_AS(config_from_map({{"lambda", "0"}}), ParseError);
  CHECK_THROWS_AS(config_from_map({{"v_lmd", "300"}}), ParseError);
  CHECK_THROWS_AS(config_from_map({{"degradations", "blur:3"}}), ParseError);

  const fs::path dir = support::fresh_dir("elfd_test_config");
  std::ofstream(dir / "exp.cfg") << "# comment\ndataset = x\nseed=42\n\nn_train = 2\n";
  const ExperimentConfig loaded = load_config(dir / "exp.cfg");
  CHECK(loaded.seed == 42);
  CHECK(loaded.n_train == 2);
  CHECK(loaded.dataset == "x");
}

TEST_CASE("train, evaluate and inspect on a synthetic dataset") {
  const fs::path root = support::fresh_dir("elfd_test_harness");
  write_synthetic_dataset(root / "data", 3, 5, 32, 3);
  const DatasetManifest manifest = scan_dataset(root / "data");
  REQUIRE(manifest.classes.size() == 3);
  CHECK(manifest.classes[0].name == "class_00");
  CHECK(load_pgm(manifest.classes[0].images[0]).width() == 32);

  const ExperimentConfig config = small_config(root / "data", root / "run1");
  train(config);
  CHECK(fs::exists(config.output / "split_train.txt"));
  CHECK(support::read_bytes(config.output / "split_train.txt").rfind("# algorithm=mt19937_64+fisher-yates-v1", 0) == 0);

  const ScaleBank elmd = read_bank(model_dir(config, DescriptorKind::elmd));
  const ScaleBank lmd = read_bank(model_dir(config, DescriptorKind::lmd));
  CHECK(elmd.scales() == std::vector<int>{5, 7});
  CHECK(elmd.at(5).maps.size() == 12);
  CHECK(lmd.at(5).maps.size() == 4);
  for (const auto& m : elmd.at(7).maps) CHECK(m.valid_bins() == 16);
  for (const auto& m : lmd.at(7).maps) CHECK(m.valid_bins() == 48);
  CHECK(elmd.at(5).dictionary.dimension() == 3072);
  CHECK(lmd.at(5).dictionary.dimension() == 3072);
  CHECK(elmd.at(5).dictionary.size() == 9);

  // Same config, new output directory: identical archive bytes.
  ExperimentConfig again = config;
  again.output = root / "run2";
  train(again);
  CHECK(support::snapshot(config.output / "model") == support::snapshot(again.output / "model"));

  const EvaluationOutput out = evaluate(config, config.output / "model");
  CHECK(out.table.rows == std::vector<std::string>{"clean", "Gaussian"});
  CHECK(out.table.columns == std::vector<std::string>{"lmds", "lmdc", "elmds", "elmdc"});
  CHECK(out.log.size() == 2 * 6 * 2 * 2);
  CHECK(table_from_log(out.log, out.table.rows, out.table.columns).accuracy == out.table.accuracy);
  CHECK(fs::exists(config.output / "predictions.csv"));
  const std::string table_csv = support::read_bytes(config.output / "results.csv");
  CHECK(table_csv.rfind("degradation,lmds,lmdc,elmds,elmdc\n", 0) == 0);
  CHECK(table_csv.find("\naverage,") != std::string::npos);

  // Training images recognize as themselves.
  const Split split = split_dataset(manifest, config.seed, config.n_train);
  for (const auto& r : split.train) {
    const RecognitionResult res = multiscale_recognize(elmd, load_pgm(r.image));
    CHECK(res.identity == r.class_id);
  }

  // An identity kernel leaves every prediction unchanged.
  std::ofstream(root / "identity.txt") << "1 1\n1\n";
  ExperimentConfig ident = config;
  ident.output = root / "ident";
  ident.degradations = {"clean", "kernel:" + (root / "identity.txt").string()};
  const EvaluationOutput io = evaluate(ident, config.output / "model");
  const std::size_t half = io.log.size() / 2;
  for (std::size_t i = 0; i < half; ++i) {
    CHECK(io.log[i].predicted == io.log[i + half].predicted);
    CHECK(io.log[i].confidence == io.log[i + half].confidence);
  }

  ExperimentConfig mismatch = config;
  mismatch.valid_bins[DescriptorKind::elmd] = 8;
  CHECK(error_of([&] { evaluate(mismatch, config.output / "model"); }).find("valid bins") != std::string::npos);
  ExperimentConfig dup = config;
  dup.degradations = {"gaussian:1:5", "gaussian:2:5"};
  CHECK_THROWS_AS(evaluate(dup, config.output / "model"), ParameterError);

  InspectRequest req;
  req.image = load_pgm(manifest.classes[1].images[0]);
  req.scale = 5;
  req.kind = DescriptorKind::elmd;
  req.target = 1;
  req.out_dir = root / "inspect";
  const auto files = inspect(req);
  CHECK(files.size() == 17);
  CHECK(std::count_if(files.begin(), files.end(), [](const fs::path& p) { return p.extension() == ".pgm"; }) == 1);
  CHECK(fs::exists(req.out_dir / "elmd_p1c3_labels.pgm"));
  long total = 0;
  for (const auto& f : files) {
    if (f.extension() != ".csv") continue;
    std::ifstream in(f);
    std::string line;
    std::getline(in, line);
    CHECK(line == "label,count");
    int rows = 0;
    while (std::getline(in, line)) {
      total += std::stol(line.substr(line.find(',') + 1));
      ++rows;
    }
    CHECK(rows == 4096);
  }
  CHECK(total == 32 * 32);
  CHECK(support::read_bytes(req.out_dir / "elmd_p1c3_hist_r3_3.csv").size() > 0);
}

TEST_CASE("inspect reports one confidence row per bank scale") {
  const fs::path root = support::fresh_dir("elfd_test_inspect");
  write_synthetic_dataset(root / "data", 2, 2, 32, 9);
  const DatasetManifest m = scan_dataset(root / "data");
  std::vector<TrainingSample> samples;
  for (int c = 0; c < 2; ++c) {
    for (const auto& p : m.classes[static_cast<std::size_t>(c)].images) samples.push_back({load_pgm(p), c});
  }
  const std::vector<int> scales{11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31};
  const ScaleBank bank = build_bank(samples, {"class_00", "class_01"}, DescriptorKind::lmd, scales, 48, kDefaultLambda);

  InspectRequest req;
  req.image = samples[0].image;
  req.scale = 11;
  req.kind = DescriptorKind::lmd;
  req.planes = true;
  req.bank = &bank;
  req.out_dir = root / "out";
  const auto files = inspect(req);
  // 8 plane images, 4 label images, 64 histograms, 1 confidence table.
  CHECK(files.size() == 8 + 4 + 64 + 1);
  std::ifstream in(req.out_dir / "confidences.csv");
  std::string line;
  int rows = -1;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 11);
}
