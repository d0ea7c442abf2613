#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "elfd/recognition.hpp"

namespace elfd {

struct ClassEntry {
  std::string name;
  std::vector<std::filesystem::path> images;
};

/// One subdirectory per class holding .pgm files; classes and files sorted by name.
struct DatasetManifest {
  std::vector<ClassEntry> classes;
};

DatasetManifest scan_dataset(const std::filesystem::path& root);

struct SampleRef {
  std::filesystem::path image;
  int class_id;
};

struct Split {
  std::vector<SampleRef> train;
  std::vector<SampleRef> test;
};

/// Generator and shuffling algorithm recorded next to every split.
inline constexpr std::string_view kSplitAlgorithm = "mt19937_64+fisher-yates-v1";

/// Uniform integer in [0, bound) by rejection; independent of the standard library's distributions.
std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

/// Per class (in manifest order) a Fisher-Yates shuffle from one engine seeded with `seed`;
/// the first n_train shuffled images train, the rest test.
Split split_dataset(const DatasetManifest& manifest, std::uint64_t seed, int n_train);

enum class ScaleMode { single, competition };

struct ExperimentConfig {
  std::filesystem::path dataset;
  std::filesystem::path output = "elfd_out";
  std::uint64_t seed = 1;
  int n_train = 5;
  std::vector<DescriptorKind> kinds{DescriptorKind::lmd, DescriptorKind::lpd, DescriptorKind::elmd,
                                    DescriptorKind::elpd};
  std::vector<ScaleMode> modes{ScaleMode::single, ScaleMode::competition};
  int single_scale = 11;
  std::vector<int> competition_scales{11, 13, 15, 17, 19, 21, 23, 25, 27, 29, 31};
  std::map<DescriptorKind, int> valid_bins{{DescriptorKind::lmd, 48},
                                           {DescriptorKind::lpd, 48},
                                           {DescriptorKind::elmd, 16},
                                           {DescriptorKind::elpd, 16}};
  double lambda = kDefaultLambda;
  /// Degradation tokens (see parse_degradation) plus "clean".
  std::vector<std::string> degradations{"lowres:2", "gaussian:3:7", "motion:7:45", "lowres:4"};
  /// Optional common working size, applied by center crop then bicubic resize.
  std::optional<std::pair<int, int>> resize;

  /// Scales a bank must hold to serve every configured mode.
  std::vector<int> required_scales() const;
};

/// Recognized config keys, in canonical order.
const std::vector<std::string>& config_keys();
ExperimentConfig config_from_map(const std::map<std::string, std::string>& values);
std::map<std::string, std::string> config_to_map(const ExperimentConfig& config);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes <output>/split_train.txt and split_test.txt ("class,path" lines after a header naming the generator).
void write_split_lists(const DatasetManifest& manifest, const Split& split, const ExperimentConfig& config);

/// Loads an image and applies the configured resize.
GrayImage load_sample(const std::filesystem::path& path, const ExperimentConfig& config);

std::filesystem::path model_dir(const ExperimentConfig& config, DescriptorKind kind);

/// Trains one ScaleBank per configured kind and writes the archives under `<output>/model/<kind>`.
void train(const ExperimentConfig& config);

struct PredictionRecord {
  std::string probe;
  std::string degradation;
  DescriptorKind kind;
  ScaleMode mode;
  std::string predicted;
  std::string truth;
  int winning_scale;
  double confidence;
};

struct ResultsTable {
  std::vector<std::string> rows;     // degradation labels; the "average" row is appended on output
  std::vector<std::string> columns;  // e.g. lmds, lmdc, elmdc
  Eigen::MatrixXd accuracy;          // percent, rows x columns

  Eigen::RowVectorXd average() const { return accuracy.colwise().mean(); }
};

std::string column_name(DescriptorKind kind, ScaleMode mode);

/// Recounts accuracy cells from prediction records.
ResultsTable table_from_log(const std::vector<PredictionRecord>& log, const std::vector<std::string>& rows,
                            const std::vector<std::string>& columns);

void write_predictions_csv(const std::vector<PredictionRecord>& log, std::ostream& out);
void write_table_csv(const ResultsTable& table, std::ostream& out);
void write_table_text(const ResultsTable& table, std::ostream& out);

struct EvaluationOutput {
  ResultsTable table;
  std::vector<PredictionRecord> log;
};

/// Degrades every test probe, recognizes it under each kind and mode, and writes
/// predictions.csv, results.csv and results.txt into the config's output directory.
EvaluationOutput evaluate(const ExperimentConfig& config, const std::filesystem::path& archive_root);

struct InspectRequest {
  GrayImage image;
  int scale = 11;
  DescriptorKind kind = DescriptorKind::elmd;
  std::optional<int> target;  // all targets when empty
  bool planes = false;        // also dump magnitude/phase planes
  const ScaleBank* bank = nullptr;
  std::filesystem::path out_dir;
};

/// Writes label PGMs, per-region histogram CSVs and (with a bank) a per-scale confidence CSV.
/// Returns the files written.
std::vector<std::filesystem::path> inspect(const InspectRequest& request);

/// Procedural texture classes for tests and demos: `per_class` jittered, noisy crops of
/// one random texture per class, written as <root>/class_NN/img_MM.pgm.
void write_synthetic_dataset(const std::filesystem::path& root, int classes, int per_class, int size,
                             std::uint64_t seed);

}  // namespace elfd
