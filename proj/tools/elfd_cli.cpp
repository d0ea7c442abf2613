// Command-line front end: train, evaluate, recognize, degrade, inspect, split, synth.

#include <CLI11.hpp>

#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "elfd/harness.hpp"
#include "elfd/model_io.hpp"

namespace {

using namespace elfd;

// A config file plus one flag per config key; flags win over the file.
struct ConfigOptions {
  std::string config_path;
  std::map<std::string, std::string> overrides;

  void attach(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "key=value config file");
    for (const auto& key : config_keys()) {
      cmd->add_option_function<std::string>("--" + key, [this, key](const std::string& v) { overrides[key] = v; },
                                            "override config key '" + key + "'");
    }
  }

  ExperimentConfig resolve() const {
    std::map<std::string, std::string> values;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw IoError("cannot open config " + config_path);
      values = parse_key_values(in, config_path);
    }
    for (const auto& [k, v] : overrides) values[k] = v;
    ExperimentConfig c = config_from_map(values);
    if (c.dataset.empty()) throw ParameterError("no dataset given (use --dataset or the config file)");
    return c;
  }
};

std::optional<std::pair<int, int>> parse_resize(const std::string& text) {
  if (text.empty()) return std::nullopt;
  return config_from_map({{"resize", text}}).resize;
}

int run_recognize(const std::string& model, const std::string& probe_path, const std::string& mode, int scale,
                  const std::string& degradation, const std::string& resize) {
  const ScaleBank bank = read_bank(model);
  GrayImage probe = load_pgm(probe_path);
  if (const auto r = parse_resize(resize)) probe = center_crop_resize(probe, r->first, r->second);
  if (!degradation.empty()) probe = degrade(probe, parse_degradation(degradation));
  RecognitionResult result;
  if (mode == "single") {
    result = compete({recognize_single_scale(bank, scale, probe)});
  } else {
    result = multiscale_recognize(bank, probe);
  }
  std::cout << "identity=" << bank.class_names[static_cast<std::size_t>(result.identity)]
            << " winning_scale=" << result.winning_scale << " confidence=" << std::setprecision(6)
            << result.confidence << '\n';
  std::cout << "scale,top_class,confidence\n";
  for (const auto& o : result.per_scale) {
    std::cout << o.scale << ',' << bank.class_names[static_cast<std::size_t>(o.class_id)] << ',' << o.confidence
              << (o.degenerate ? ",degenerate" : "") << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Enhanced local frequency descriptor recognition toolkit"};
  app.require_subcommand(1);

  ConfigOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "train per-scale models for every configured descriptor");
  train_opts.attach(train_cmd);

  ConfigOptions eval_opts;
  std::string eval_model;
  auto* eval_cmd = app.add_subcommand("evaluate", "run the degradation protocol and emit result tables");
  eval_opts.attach(eval_cmd);
  eval_cmd->add_option("--model", eval_model, "model archive root (default <output>/model)");

  ConfigOptions split_opts;
  auto* split_cmd = app.add_subcommand("split", "write the seeded train/test lists");
  split_opts.attach(split_cmd);

  std::string rec_model;
  std::string rec_probe;
  std::string rec_mode = "competition";
  int rec_scale = 11;
  std::string rec_degrade;
  std::string rec_resize;
  auto* rec_cmd = app.add_subcommand("recognize", "recognize one probe image");
  rec_cmd->add_option("--model", rec_model, "archive directory of one descriptor kind")->required();
  rec_cmd->add_option("--probe", rec_probe, "probe PGM")->required();
  rec_cmd->add_option("--mode", rec_mode, "single or competition")
      ->check(CLI::IsMember({"single", "competition"}));
  rec_cmd->add_option("--scale", rec_scale, "scale for single mode");
  rec_cmd->add_option("--degrade", rec_degrade, "degradation applied to the probe first");
  rec_cmd->add_option("--resize", rec_resize, "WxH working size");

  std::string deg_spec;
  std::string deg_out_dir;
  std::string deg_output;
  std::vector<std::string> deg_inputs;
  auto* deg_cmd = app.add_subcommand("degrade", "apply a degradation to PGM files");
  deg_cmd->add_option("--spec", deg_spec, "lowres:F | gaussian:SIGMA:SIZE | motion:LEN:ANGLE | kernel:PATH")
      ->required();
  deg_cmd->add_option("--out-dir", deg_out_dir, "output directory (keeps file names)");
  deg_cmd->add_option("--output", deg_output, "output file (single input only)");
  deg_cmd->add_option("inputs", deg_inputs, "input PGM files")->required();

  std::string ins_image;
  int ins_scale = 11;
  std::string ins_kind = "elmd";
  std::string ins_pair;
  int ins_plane = 0;
  bool ins_planes = false;
  std::string ins_model;
  std::string ins_out;
  auto* ins_cmd = app.add_subcommand("inspect", "dump label images, regional histograms and confidences");
  ins_cmd->add_option("--image", ins_image, "input PGM")->required();
  ins_cmd->add_option("--scale", ins_scale, "STFT window size");
  ins_cmd->add_option("--kind", ins_kind, "lmd | lpd | elmd | elpd");
  ins_cmd->add_option("--pair", ins_pair, "frequency pair P,C (1-based) for elmd/elpd");
  ins_cmd->add_option("--plane", ins_plane, "frequency plane 1..4 for lmd/lpd");
  ins_cmd->add_flag("--planes", ins_planes, "also dump magnitude and phase planes");
  ins_cmd->add_option("--model", ins_model, "archive directory; adds confidences.csv");
  ins_cmd->add_option("--out-dir", ins_out, "output directory")->required();

  std::string syn_out;
  int syn_classes = 10;
  int syn_per_class = 10;
  int syn_size = 64;
  std::uint64_t syn_seed = 7;
  auto* syn_cmd = app.add_subcommand("synth", "write a procedural texture dataset");
  syn_cmd->add_option("--out", syn_out, "dataset root")->required();
  syn_cmd->add_option("--classes", syn_classes);
  syn_cmd->add_option("--per-class", syn_per_class);
  syn_cmd->add_option("--size", syn_size);
  syn_cmd->add_option("--seed", syn_seed);

  CLI11_PARSE(app, argc, argv);

  try {
    if (train_cmd->parsed()) {
      const ExperimentConfig cfg = train_opts.resolve();
      train(cfg);
      std::cout << "models written to " << (cfg.output / "model").string() << '\n';
    } else if (eval_cmd->parsed()) {
      const ExperimentConfig cfg = eval_opts.resolve();
      const auto root = eval_model.empty() ? cfg.output / "model" : std::filesystem::path(eval_model);
      const EvaluationOutput out = evaluate(cfg, root);
      write_table_text(out.table, std::cout);
    } else if (split_cmd->parsed()) {
      const ExperimentConfig cfg = split_opts.resolve();
      const DatasetManifest manifest = scan_dataset(cfg.dataset);
      const Split split = split_dataset(manifest, cfg.seed, cfg.n_train);
      write_split_lists(manifest, split, cfg);
      std::cout << split.train.size() << " train, " << split.test.size() << " test\n";
    } else if (rec_cmd->parsed()) {
      return run_recognize(rec_model, rec_probe, rec_mode, rec_scale, rec_degrade, rec_resize);
    } else if (deg_cmd->parsed()) {
      const DegradationSpec spec = parse_degradation(deg_spec);
      if (!deg_output.empty()) {
        if (deg_inputs.size() != 1) throw ParameterError("--output takes exactly one input");
        save_pgm(degrade(load_pgm(deg_inputs[0]), spec), deg_output);
      } else {
        if (deg_out_dir.empty()) throw ParameterError("give --output or --out-dir");
        std::filesystem::create_directories(deg_out_dir);
        for (const auto& in : deg_inputs) {
          save_pgm(degrade(load_pgm(in), spec), std::filesystem::path(deg_out_dir) / std::filesystem::path(in).filename());
        }
      }
    } else if (ins_cmd->parsed()) {
      std::optional<ScaleBank> bank;
      if (!ins_model.empty()) bank = read_bank(ins_model);
      InspectRequest req;
      req.image = load_pgm(ins_image);
      req.scale = ins_scale;
      req.kind = parse_kind(ins_kind);
      req.planes = ins_planes;
      req.out_dir = ins_out;
      req.bank = bank ? &*bank : nullptr;
      if (is_enhanced(req.kind) && !ins_pair.empty()) {
        int p = 0;
        int c = 0;
        char comma = 0;
        std::istringstream ss(ins_pair);
        if (!(ss >> p >> comma >> c) || comma != ',') throw ParameterError("--pair expects P,C");
        const auto pairs = frequency_pairs();
        for (std::size_t t = 0; t < pairs.size(); ++t) {
          if (pairs[t].principal == p - 1 && pairs[t].correlated == c - 1) req.target = static_cast<int>(t);
        }
        if (!req.target) throw ParameterError("--pair must name two distinct frequencies in 1..4");
      } else if (!is_enhanced(req.kind) && ins_plane != 0) {
        if (ins_plane < 1 || ins_plane > 4) throw ParameterError("--plane must be in 1..4");
        req.target = ins_plane - 1;
      }
      for (const auto& f : inspect(req)) std::cout << f.string() << '\n';
    } else if (syn_cmd->parsed()) {
      write_synthetic_dataset(syn_out, syn_classes, syn_per_class, syn_size, syn_seed);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
