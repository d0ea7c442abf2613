#include "elfd/harness.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <set>
#include <sstream>

#include "elfd/model_io.hpp"

namespace elfd {

namespace {

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string tok; std::getline(ss, tok, sep);) {
    const auto b = tok.find_first_not_of(" \t");
    const auto e = tok.find_last_not_of(" \t");
    if (b != std::string::npos) out.push_back(tok.substr(b, e - b + 1));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values, const char* sep = ",") {
  std::ostringstream os;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) os << sep;
    os << values[i];
  }
  return os.str();
}

long long parse_integer(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("config: '" + key + "' expects an integer, got '" + text + "'");
}

double parse_double(const std::string& text, const std::string& key) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw ParseError("config: '" + key + "' expects a number, got '" + text + "'");
}

std::vector<int> parse_scales(const std::string& text) {
  std::vector<int> scales;
  if (text.find(':') != std::string::npos) {
    const auto parts = split_list(text, ':');
    if (parts.size() != 3) throw ParseError("config: scales range must be first:last:step");
    const auto first = parse_integer(parts[0], "scales");
    const auto last = parse_integer(parts[1], "scales");
    const auto step = parse_integer(parts[2], "scales");
    if (step < 1 || last < first) throw ParseError("config: invalid scales range '" + text + "'");
    for (auto s = first; s <= last; s += step) scales.push_back(static_cast<int>(s));
  } else {
    for (const auto& tok : split_list(text)) scales.push_back(static_cast<int>(parse_integer(tok, "scales")));
  }
  if (scales.empty()) throw ParseError("config: empty scale list");
  for (int s : scales) {
    if (s < 3 || s % 2 == 0) throw ParseError("config: scales must be odd and >= 3, got " + std::to_string(s));
  }
  return scales;
}

std::string_view mode_name(ScaleMode m) { return m == ScaleMode::single ? "single" : "competition"; }

ScaleMode parse_mode(const std::string& s) {
  if (s == "single") return ScaleMode::single;
  if (s == "competition") return ScaleMode::competition;
  throw ParseError("config: unknown scale mode '" + s + "'");
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::string fixed2(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string format_real(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

double uniform01(std::mt19937_64& engine) { return static_cast<double>(engine() >> 11) * 0x1.0p-53; }

double uniform(std::mt19937_64& engine, double lo, double hi) { return lo + (hi - lo) * uniform01(engine); }

double standard_normal(std::mt19937_64& engine) {
  const double u1 = 1.0 - uniform01(engine);
  const double u2 = uniform01(engine);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<GrayImage> load_all(const std::vector<SampleRef>& refs, const ExperimentConfig& config) {
  std::vector<GrayImage> images;
  images.reserve(refs.size());
  for (const auto& r : refs) {
    images.push_back(load_sample(r.image, config));
    if (images.back().width() != images.front().width() || images.back().height() != images.front().height()) {
      throw ParameterError("mixed image dimensions: " + r.image.string() + " is " +
                           std::to_string(images.back().width()) + "x" + std::to_string(images.back().height()) +
                           " but " + refs.front().image.string() + " is " + std::to_string(images.front().width()) +
                           "x" + std::to_string(images.front().height()) + " (set resize=WxH)");
    }
  }
  return images;
}

void write_split_list(const std::vector<SampleRef>& refs, const DatasetManifest& manifest, const ExperimentConfig& config,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "# algorithm=" << kSplitAlgorithm << " seed=" << config.seed << " n_train=" << config.n_train << '\n';
  for (const auto& r : refs) {
    out << manifest.classes[static_cast<std::size_t>(r.class_id)].name << ',' << r.image.string() << '\n';
  }
}

std::vector<std::string> class_names(const DatasetManifest& manifest) {
  std::vector<std::string> names;
  for (const auto& c : manifest.classes) names.push_back(c.name);
  return names;
}

}  // namespace

DatasetManifest scan_dataset(const std::filesystem::path& root) {
  if (!std::filesystem::is_directory(root)) throw IoError("dataset directory not found: " + root.string());
  std::vector<std::filesystem::path> dirs;
  for (const auto& e : std::filesystem::directory_iterator(root)) {
    if (e.is_directory()) dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());
  DatasetManifest manifest;
  for (const auto& d : dirs) {
    ClassEntry entry{d.filename().string(), {}};
    for (const auto& f : std::filesystem::directory_iterator(d)) {
      std::string ext = f.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
      if (f.is_regular_file() && ext == ".pgm") entry.images.push_back(f.path());
    }
    if (entry.images.empty()) throw ParameterError("class '" + entry.name + "' has no PGM images in " + d.string());
    std::sort(entry.images.begin(), entry.images.end());
    manifest.classes.push_back(std::move(entry));
  }
  if (manifest.classes.empty()) throw ParameterError("dataset has no class directories: " + root.string());
  return manifest;
}

std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
  if (bound == 0) throw ParameterError("uniform_below: bound must be > 0");
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t v = engine();
  while (v >= limit) v = engine();
  return v % bound;
}

Split split_dataset(const DatasetManifest& manifest, std::uint64_t seed, int n_train) {
  if (n_train < 1) throw ParameterError("n_train must be >= 1");
  std::mt19937_64 engine(seed);
  Split split;
  for (std::size_t c = 0; c < manifest.classes.size(); ++c) {
    const auto& entry = manifest.classes[c];
    if (static_cast<int>(entry.images.size()) <= n_train) {
      throw ParameterError("class " + entry.name + " has no test samples (" + std::to_string(entry.images.size()) +
                           " images, n_train=" + std::to_string(n_train) + ")");
    }
    std::vector<std::size_t> order(entry.images.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    for (std::size_t i = order.size() - 1; i > 0; --i) std::swap(order[i], order[uniform_below(engine, i + 1)]);
    for (std::size_t i = 0; i < order.size(); ++i) {
      SampleRef ref{entry.images[order[i]], static_cast<int>(c)};
      (static_cast<int>(i) < n_train ? split.train : split.test).push_back(std::move(ref));
    }
  }
  return split;
}

std::vector<int> ExperimentConfig::required_scales() const {
  std::set<int> s;
  for (ScaleMode m : modes) {
    if (m == ScaleMode::single) s.insert(single_scale);
    else s.insert(competition_scales.begin(), competition_scales.end());
  }
  return {s.begin(), s.end()};
}

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{"dataset", "output", "seed", "n_train", "kinds", "modes",
                                             "single_scale", "scales", "v_lmd", "v_lpd", "v_elmd", "v_elpd",
                                             "lambda", "degradations", "resize"};
  return keys;
}

ExperimentConfig config_from_map(const std::map<std::string, std::string>& values) {
  const auto& keys = config_keys();
  for (const auto& [k, v] : values) {
    if (std::find(keys.begin(), keys.end(), k) == keys.end()) throw ParseError("config: unknown key '" + k + "'");
  }
  ExperimentConfig c;
  auto get = [&](const char* key) -> const std::string* {
    const auto it = values.find(key);
    return it == values.end() ? nullptr : &it->second;
  };
  if (auto v = get("dataset")) c.dataset = *v;
  if (auto v = get("output")) c.output = *v;
  if (auto v = get("seed")) {
    const auto s = parse_integer(*v, "seed");
    if (s < 0) throw ParseError("config: seed must be nonnegative");
    c.seed = static_cast<std::uint64_t>(s);
  }
  if (auto v = get("n_train")) c.n_train = static_cast<int>(parse_integer(*v, "n_train"));
  if (auto v = get("kinds")) {
    c.kinds.clear();
    for (const auto& k : split_list(*v)) {
      try {
        c.kinds.push_back(parse_kind(k));
      } catch (const ParameterError& e) {
        throw ParseError(std::string("config: ") + e.what());
      }
    }
  }
  if (auto v = get("modes")) {
    c.modes.clear();
    for (const auto& m : split_list(*v)) c.modes.push_back(parse_mode(m));
  }
  if (auto v = get("single_scale")) {
    c.single_scale = static_cast<int>(parse_integer(*v, "single_scale"));
    if (c.single_scale < 3 || c.single_scale % 2 == 0) throw ParseError("config: single_scale must be odd and >= 3");
  }
  if (auto v = get("scales")) c.competition_scales = parse_scales(*v);
  for (DescriptorKind k : {DescriptorKind::lmd, DescriptorKind::lpd, DescriptorKind::elmd, DescriptorKind::elpd}) {
    const std::string key = "v_" + std::string(to_string(k));
    if (auto v = get(key.c_str())) {
      const auto n = parse_integer(*v, key);
      if (n < 1 || n > raw_bins(k)) throw ParseError("config: " + key + " out of range");
      c.valid_bins[k] = static_cast<int>(n);
    }
  }
  if (auto v = get("lambda")) {
    c.lambda = parse_double(*v, "lambda");
    if (!(c.lambda > 0.0)) throw ParseError("config: lambda must be > 0");
  }
  if (auto v = get("degradations")) {
    c.degradations = split_list(*v);
    for (const auto& d : c.degradations) {
      if (d != "clean") parse_degradation(d);
    }
  }
  if (auto v = get("resize")) {
    if (v->empty() || *v == "none") {
      c.resize.reset();
    } else {
      const auto parts = split_list(*v, 'x');
      if (parts.size() != 2) throw ParseError("config: resize must be WxH");
      const auto w = parse_integer(parts[0], "resize");
      const auto h = parse_integer(parts[1], "resize");
      if (w < 1 || h < 1) throw ParseError("config: resize dimensions must be positive");
      c.resize = std::pair<int, int>(static_cast<int>(w), static_cast<int>(h));
    }
  }
  if (c.kinds.empty()) throw ParseError("config: no descriptor kinds");
  if (c.modes.empty()) throw ParseError("config: no scale modes");
  return c;
}

std::map<std::string, std::string> config_to_map(const ExperimentConfig& c) {
  std::map<std::string, std::string> m;
  m["dataset"] = c.dataset.string();
  m["output"] = c.output.string();
  m["seed"] = std::to_string(c.seed);
  m["n_train"] = std::to_string(c.n_train);
  std::vector<std::string> kinds;
  for (auto k : c.kinds) kinds.emplace_back(to_string(k));
  m["kinds"] = join(kinds);
  std::vector<std::string> modes;
  for (auto md : c.modes) modes.emplace_back(mode_name(md));
  m["modes"] = join(modes);
  m["single_scale"] = std::to_string(c.single_scale);
  m["scales"] = join(c.competition_scales);
  for (const auto& [k, v] : c.valid_bins) m["v_" + std::string(to_string(k))] = std::to_string(v);
  m["lambda"] = format_real(c.lambda);
  m["degradations"] = join(c.degradations);
  m["resize"] = c.resize ? std::to_string(c.resize->first) + "x" + std::to_string(c.resize->second) : "none";
  return m;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return config_from_map(parse_key_values(in, path.string()));
}

GrayImage load_sample(const std::filesystem::path& path, const ExperimentConfig& config) {
  GrayImage img = load_pgm(path);
  if (config.resize) return center_crop_resize(img, config.resize->first, config.resize->second);
  return img;
}

void write_split_lists(const DatasetManifest& manifest, const Split& split, const ExperimentConfig& config) {
  std::filesystem::create_directories(config.output);
  write_split_list(split.train, manifest, config, config.output / "split_train.txt");
  write_split_list(split.test, manifest, config, config.output / "split_test.txt");
}

std::filesystem::path model_dir(const ExperimentConfig& config, DescriptorKind kind) {
  return config.output / "model" / std::string(to_string(kind));
}

void train(const ExperimentConfig& config) {
  const DatasetManifest manifest = scan_dataset(config.dataset);
  const Split split = split_dataset(manifest, config.seed, config.n_train);
  const std::vector<GrayImage> images = load_all(split.train, config);
  std::vector<TrainingSample> samples;
  for (std::size_t i = 0; i < images.size(); ++i) samples.push_back({images[i], split.train[i].class_id});

  write_split_lists(manifest, split, config);

  const auto scales = config.required_scales();
  for (DescriptorKind kind : config.kinds) {
    const ScaleBank bank =
        build_bank(samples, class_names(manifest), kind, scales, config.valid_bins.at(kind), config.lambda);
    const auto dir = model_dir(config, kind);
    std::filesystem::remove_all(dir);
    write_bank(bank, dir);
  }
}

std::string column_name(DescriptorKind kind, ScaleMode mode) {
  return std::string(to_string(kind)) + (mode == ScaleMode::single ? "s" : "c");
}

ResultsTable table_from_log(const std::vector<PredictionRecord>& log, const std::vector<std::string>& rows,
                            const std::vector<std::string>& columns) {
  ResultsTable t{rows, columns, Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                      static_cast<Eigen::Index>(columns.size()))};
  Eigen::MatrixXd total = t.accuracy;
  auto index_of = [](const std::vector<std::string>& v, const std::string& s) {
    const auto it = std::find(v.begin(), v.end(), s);
    return it == v.end() ? Eigen::Index(-1) : static_cast<Eigen::Index>(it - v.begin());
  };
  for (const auto& rec : log) {
    const auto r = index_of(rows, rec.degradation);
    const auto c = index_of(columns, column_name(rec.kind, rec.mode));
    if (r < 0 || c < 0) continue;
    total(r, c) += 1.0;
    if (rec.predicted == rec.truth) t.accuracy(r, c) += 1.0;
  }
  for (Eigen::Index i = 0; i < t.accuracy.size(); ++i) {
    t.accuracy.data()[i] = total.data()[i] > 0 ? 100.0 * t.accuracy.data()[i] / total.data()[i] : 0.0;
  }
  return t;
}

void write_predictions_csv(const std::vector<PredictionRecord>& log, std::ostream& out) {
  out << "probe,degradation,kind,mode,predicted,truth,winning_scale,confidence\n";
  for (const auto& r : log) {
    out << csv_field(r.probe) << ',' << csv_field(r.degradation) << ',' << to_string(r.kind) << ','
        << mode_name(r.mode) << ',' << csv_field(r.predicted) << ',' << csv_field(r.truth) << ',' << r.winning_scale
        << ',' << format_real(r.confidence) << '\n';
  }
}

void write_table_csv(const ResultsTable& table, std::ostream& out) {
  out << "degradation";
  for (const auto& c : table.columns) out << ',' << c;
  out << '\n';
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    out << csv_field(table.rows[r]);
    for (Eigen::Index c = 0; c < table.accuracy.cols(); ++c) {
      out << ',' << fixed2(table.accuracy(static_cast<Eigen::Index>(r), c));
    }
    out << '\n';
  }
  if (!table.rows.empty()) {
    out << "average";
    const Eigen::RowVectorXd avg = table.average();
    for (Eigen::Index c = 0; c < avg.size(); ++c) out << ',' << fixed2(avg(c));
    out << '\n';
  }
}

void write_table_text(const ResultsTable& table, std::ostream& out) {
  std::size_t label_width = std::string("average").size();
  for (const auto& r : table.rows) label_width = std::max(label_width, r.size());
  const int cell = 9;
  out << std::left << std::setw(static_cast<int>(label_width)) << "" << std::right;
  for (const auto& c : table.columns) out << std::setw(cell) << c;
  out << '\n';
  auto row = [&](const std::string& label, const Eigen::RowVectorXd& values) {
    out << std::left << std::setw(static_cast<int>(label_width)) << label << std::right;
    for (Eigen::Index c = 0; c < values.size(); ++c) out << std::setw(cell) << fixed2(values(c));
    out << '\n';
  };
  for (std::size_t r = 0; r < table.rows.size(); ++r) row(table.rows[r], table.accuracy.row(static_cast<Eigen::Index>(r)));
  if (!table.rows.empty()) row("average", table.average());
}

EvaluationOutput evaluate(const ExperimentConfig& config, const std::filesystem::path& archive_root) {
  const DatasetManifest manifest = scan_dataset(config.dataset);
  const Split split = split_dataset(manifest, config.seed, config.n_train);
  const std::vector<GrayImage> probes = load_all(split.test, config);
  const auto names = class_names(manifest);

  std::vector<ScaleBank> banks;
  for (DescriptorKind kind : config.kinds) {
    banks.push_back(read_bank(archive_root / std::string(to_string(kind))));
    const ScaleBank& bank = banks.back();
    if (bank.kind != kind) throw ParameterError("archive/config mismatch: archive holds " + std::string(to_string(bank.kind)));
    if (bank.class_names != names) throw ParameterError("archive/config mismatch: class names differ from dataset");
    if (bank.valid_bins != config.valid_bins.at(kind)) throw ParameterError("archive/config mismatch: valid bins differ");
    if (bank.lambda != config.lambda) throw ParameterError("archive/config mismatch: lambda differs");
    const auto have = bank.scales();
    for (int s : config.required_scales()) {
      if (std::find(have.begin(), have.end(), s) == have.end()) {
        throw ParameterError("archive/config mismatch: scale " + std::to_string(s) + " missing");
      }
    }
  }

  std::vector<std::string> rows;
  std::vector<std::optional<DegradationSpec>> specs;
  for (const auto& token : config.degradations) {
    if (token == "clean") {
      specs.emplace_back(std::nullopt);
      rows.emplace_back("clean");
    } else {
      specs.emplace_back(parse_degradation(token));
      rows.push_back(degradation_label(*specs.back()));
    }
    if (std::count(rows.begin(), rows.end(), rows.back()) > 1) {
      throw ParameterError("duplicate degradation row label '" + rows.back() + "'");
    }
  }
  std::vector<std::string> columns;
  for (DescriptorKind kind : config.kinds) {
    for (ScaleMode mode : config.modes) columns.push_back(column_name(kind, mode));
  }

  const auto scales = config.required_scales();
  EvaluationOutput result;
  for (std::size_t d = 0; d < specs.size(); ++d) {
    for (std::size_t p = 0; p < probes.size(); ++p) {
      const GrayImage probe = specs[d] ? degrade(probes[p], *specs[d]) : probes[p];
      const std::string& truth = names[static_cast<std::size_t>(split.test[p].class_id)];
      for (std::size_t k = 0; k < banks.size(); ++k) {
        const ScaleBank& bank = banks[k];
        std::vector<ScaleOutcome> single;
        std::vector<ScaleOutcome> competing;
        for (int s : scales) {
          ScaleOutcome o = recognize_single_scale(bank, s, probe);
          const bool in_competition = std::find(config.competition_scales.begin(), config.competition_scales.end(),
                                                s) != config.competition_scales.end();
          if (s == config.single_scale) single.push_back(o);
          if (in_competition) competing.push_back(std::move(o));
        }
        for (ScaleMode mode : config.modes) {
          const RecognitionResult r = compete(mode == ScaleMode::single ? single : competing);
          result.log.push_back({split.test[p].image.string(), rows[d], bank.kind, mode,
                                names[static_cast<std::size_t>(r.identity)], truth, r.winning_scale, r.confidence});
        }
      }
    }
  }
  result.table = table_from_log(result.log, rows, columns);

  std::filesystem::create_directories(config.output);
  auto open = [&](const char* name) {
    std::ofstream f(config.output / name);
    if (!f) throw IoError("cannot write " + (config.output / name).string());
    return f;
  };
  {
    auto f = open("predictions.csv");
    write_predictions_csv(result.log, f);
  }
  {
    auto f = open("results.csv");
    write_table_csv(result.table, f);
  }
  {
    auto f = open("results.txt");
    write_table_text(result.table, f);
  }
  return result;
}

std::vector<std::filesystem::path> inspect(const InspectRequest& request) {
  std::filesystem::create_directories(request.out_dir);
  std::vector<std::filesystem::path> written;
  const StftPlanes planes = compute_planes(request.image, request.scale);
  if (request.planes) {
    for (std::size_t i = 0; i < 4; ++i) {
      const auto mag = request.out_dir / ("magnitude_u" + std::to_string(i + 1) + ".pgm");
      const auto ph = request.out_dir / ("phase_u" + std::to_string(i + 1) + ".pgm");
      save_pgm(magnitude_image(planes, i), mag);
      save_pgm(phase_image(planes, i), ph);
      written.push_back(mag);
      written.push_back(ph);
    }
  }
  std::vector<int> targets;
  if (request.target) {
    targets.push_back(*request.target);
  } else {
    for (int t = 0; t < target_count(request.kind); ++t) targets.push_back(t);
  }
  for (int t : targets) {
    const LabelImage labels = label_image(planes, request.kind, t);
    std::string stem = merge_map_filename(request.kind, t);
    stem = std::string(to_string(request.kind)) + "_" + stem.substr(6, stem.size() - 6 - 4);  // drop "merge_"/".txt"
    const auto pgm = request.out_dir / (stem + "_labels.pgm");
    save_pgm(label_preview(labels, request.kind), pgm);
    written.push_back(pgm);
    const RegionalHistogramSet hist = regional_histograms(labels, raw_bins(request.kind));
    for (int r = 0; r < kRegionCount; ++r) {
      const auto csv = request.out_dir / (stem + "_hist_r" + std::to_string(r / kRegionGrid) + "_" +
                                          std::to_string(r % kRegionGrid) + ".csv");
      std::ofstream f(csv);
      if (!f) throw IoError("cannot write " + csv.string());
      f << "label,count\n";
      for (int b = 0; b < hist.bins; ++b) f << b << ',' << hist.counts(b, r) << '\n';
      written.push_back(csv);
    }
  }
  if (request.bank != nullptr) {
    const auto result = multiscale_recognize(*request.bank, request.image);
    const auto csv = request.out_dir / "confidences.csv";
    std::ofstream f(csv);
    if (!f) throw IoError("cannot write " + csv.string());
    f << "scale,top_class,confidence\n";
    for (const auto& o : result.per_scale) {
      f << o.scale << ',' << csv_field(request.bank->class_names[static_cast<std::size_t>(o.class_id)]) << ','
        << format_real(o.confidence) << '\n';
    }
    written.push_back(csv);
  }
  return written;
}

void write_synthetic_dataset(const std::filesystem::path& root, int classes, int per_class, int size,
                             std::uint64_t seed) {
  if (classes < 1 || per_class < 1 || size < 8) throw ParameterError("write_synthetic_dataset: invalid shape");
  constexpr int margin = 3;
  const int canvas = size + 2 * margin;
  for (int c = 0; c < classes; ++c) {
    std::mt19937_64 engine(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(c) + 1);
    RealPlane tex = RealPlane::Zero(canvas, canvas);
    for (int g = 0; g < 4; ++g) {
      const double f = uniform(engine, 0.04, 0.22);
      const double theta = uniform(engine, 0.0, std::numbers::pi);
      const double phi = uniform(engine, 0.0, 2.0 * std::numbers::pi);
      const double amp = uniform(engine, 0.4, 1.0);
      for (int y = 0; y < canvas; ++y) {
        for (int x = 0; x < canvas; ++x) {
          tex(y, x) += amp * std::cos(2.0 * std::numbers::pi * f * (x * std::cos(theta) + y * std::sin(theta)) + phi);
        }
      }
    }
    for (int b = 0; b < 14; ++b) {
      const double cy = uniform(engine, 0.0, canvas);
      const double cx = uniform(engine, 0.0, canvas);
      const double s = uniform(engine, 2.0, 7.0);
      const double amp = uniform(engine, 0.6, 1.6) * (uniform01(engine) < 0.5 ? -1.0 : 1.0);
      for (int y = 0; y < canvas; ++y) {
        for (int x = 0; x < canvas; ++x) {
          tex(y, x) += amp * std::exp(-((y - cy) * (y - cy) + (x - cx) * (x - cx)) / (2.0 * s * s));
        }
      }
    }
    tex = 0.1 + 0.8 * (tex - tex.minCoeff()) / (tex.maxCoeff() - tex.minCoeff());

    std::ostringstream cname;
    cname << "class_" << std::setw(2) << std::setfill('0') << c;
    const auto dir = root / cname.str();
    std::filesystem::create_directories(dir);
    for (int i = 0; i < per_class; ++i) {
      const auto oy = static_cast<Eigen::Index>(uniform_below(engine, 2 * margin + 1));
      const auto ox = static_cast<Eigen::Index>(uniform_below(engine, 2 * margin + 1));
      const double gain = uniform(engine, 0.9, 1.1);
      const double bias = uniform(engine, -0.05, 0.05);
      RealPlane sample = tex.block(oy, ox, size, size) * gain + bias;
      for (Eigen::Index k = 0; k < sample.size(); ++k) sample.data()[k] += 0.02 * standard_normal(engine);
      std::ostringstream fname;
      fname << "img_" << std::setw(2) << std::setfill('0') << i << ".pgm";
      save_pgm(clamped_image(sample), dir / fname.str());
    }
  }
}

}  // namespace elfd
