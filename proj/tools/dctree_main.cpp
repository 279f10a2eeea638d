// dctree: train / evaluate / verify dynamic compositional tree networks.
//
// Exit codes: 0 success, 2 bad configuration or usage, 3 data error,
// 4 numeric divergence during training, 5 gradient check over tolerance,
// 6 inspect on a static checkpoint.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dctree/analysis.hpp"
#include "dctree/checkpoint.hpp"
#include "dctree/error.hpp"
#include "dctree/gradcheck.hpp"
#include "dctree/toygen.hpp"
#include "dctree/training.hpp"

namespace fs = std::filesystem;
using namespace dctree;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitGradTolerance = 5;
constexpr int kExitStaticCheckpoint = 6;

constexpr double kGradTolerance = 1e-4;

struct TrainFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<uint64_t> seed;
  std::optional<std::string> variant;
  std::optional<std::string> task;
  std::optional<int> d, e, m, z;
  std::optional<double> lr, l2;
  std::optional<int> epochs;
  std::optional<std::string> dataset, dev, embeddings;
};

void add_override_flags(CLI::App* cmd, TrainFlags& flags) {
  cmd->add_option("--config", flags.config_path, "run configuration file")
      ->required();
  cmd->add_option("--out", flags.out_dir, "output directory");
  cmd->add_option("--seed", flags.seed, "override: RNG seed");
  cmd->add_option("--variant", flags.variant,
                  "override: recnn|treelstm|dc-recnn|dc-treelstm");
  cmd->add_option("--task", flags.task, "override: classify|match");
  cmd->add_option("--d", flags.d, "override: composer state size");
  cmd->add_option("--e", flags.e, "override: embedding size");
  cmd->add_option("--m", flags.m, "override: meta state size");
  cmd->add_option("--z", flags.z, "override: controlling vector size");
  cmd->add_option("--lr", flags.lr, "override: learning rate");
  cmd->add_option("--l2", flags.l2, "override: L2 weight");
  cmd->add_option("--epochs", flags.epochs, "override: epoch count");
  cmd->add_option("--dataset", flags.dataset, "override: training set path");
  cmd->add_option("--dev", flags.dev, "override: dev set path");
  cmd->add_option("--embeddings", flags.embeddings,
                  "override: embedding file path");
}

RunConfig resolve_config(const TrainFlags& flags) {
  RunConfig cfg = load_config(flags.config_path);
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.variant) cfg.variant = variant_from_string(*flags.variant);
  if (flags.task) cfg.task = task_from_string(*flags.task);
  if (flags.d) cfg.d = *flags.d;
  if (flags.e) cfg.e = *flags.e;
  if (flags.m) cfg.m = *flags.m;
  if (flags.z) cfg.z = *flags.z;
  if (flags.lr) cfg.lr = *flags.lr;
  if (flags.l2) cfg.l2 = *flags.l2;
  if (flags.epochs) cfg.epochs = *flags.epochs;
  if (flags.dataset) cfg.train_path = *flags.dataset;
  if (flags.dev) cfg.dev_path = *flags.dev;
  if (flags.embeddings) cfg.embeddings_path = *flags.embeddings;
  cfg.validate();
  return cfg;
}

int label_classes_for_loading(const RunConfig& cfg) {
  return cfg.task == Task::kClassify ? cfg.classes : -1;
}

struct LoadedRun {
  Data train;
  std::optional<Data> dev;
};

LoadedRun load_run_data(const RunConfig& cfg) {
  if (cfg.train_path.empty()) {
    throw ConfigError("no training dataset configured (key: dataset)");
  }
  LoadedRun run;
  run.train = load_data(cfg.task, cfg.train_path, label_classes_for_loading(cfg));
  if (!cfg.dev_path.empty()) {
    run.dev = load_data(cfg.task, cfg.dev_path, label_classes_for_loading(cfg));
  }
  return run;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("failed writing " + path.string());
}

int cmd_train(const TrainFlags& flags) {
  const RunConfig cfg = resolve_config(flags);
  const LoadedRun run = load_run_data(cfg);
  TrainResult result = train(cfg, run.train, run.dev ? &*run.dev : nullptr);

  fs::create_directories(flags.out_dir);
  save_checkpoint((fs::path(flags.out_dir) / "checkpoint.json").string(),
                  result.model);
  std::ostringstream metrics;
  write_metrics_csv(metrics, result.history);
  write_file(fs::path(flags.out_dir) / "metrics.csv", metrics.str());

  const EpochMetrics& last = result.history.back();
  std::printf("trained %s (%s) for %d epochs: train_acc %.4f",
              to_string(cfg.variant).c_str(), to_string(cfg.task).c_str(),
              cfg.epochs, last.train_acc);
  if (run.dev) std::printf(", best dev_acc %.4f", result.best_dev_acc);
  std::printf("\ncheckpoint: %s\n",
              (fs::path(flags.out_dir) / "checkpoint.json").string().c_str());
  return kExitOk;
}

int cmd_eval(const std::string& checkpoint_path, const std::string& dataset_path,
             const std::string& out_path) {
  Model model = load_checkpoint(checkpoint_path);
  Data data = load_data(model.task, dataset_path,
                        model.task == Task::kClassify ? model.sizes.classes : -1);
  index_data(data, model.vocab);
  const EvalResult result = evaluate(model, data);
  std::printf("accuracy %.6f over %zu samples\n", result.accuracy, data.size());
  if (!out_path.empty()) {
    std::ostringstream preds;
    write_predictions_jsonl(preds, result.predictions);
    write_file(out_path, preds.str());
    std::printf("predictions: %s\n", out_path.c_str());
  }
  return kExitOk;
}

int cmd_gradcheck(const std::string& variant_name, int d, int m, int z,
                  uint64_t seed) {
  constexpr int kSizeCap = 8;
  if (d > kSizeCap || m > kSizeCap || z > kSizeCap) {
    throw ConfigError("gradcheck sizes are capped at d,m,z <= " +
                      std::to_string(kSizeCap) +
                      " to keep finite differences tractable");
  }
  const Variant variant = variant_from_string(variant_name);

  Rng rng(seed);
  const int vocab_size = 6;
  const BinaryTree tree = make_random_tree(5, vocab_size, rng);

  Sizes sizes;
  sizes.d = d;
  sizes.e = d;
  sizes.m = m;
  sizes.z = z;
  sizes.classes = 2;
  Model model = make_model(variant, Task::kClassify, sizes,
                           make_synthetic_vocab(vocab_size));
  for (const ParamRef& p : model.named_params()) {
    for (double& v : p.tensor->data()) v = rng.uniform(-0.5, 0.5);
  }

  auto params = model.named_params();
  const auto objective = [&]() -> Tensor {
    const Encoding enc = encode_tree(tree, model);
    const Tensor loss = cross_entropy_logits(
        classify_logits(enc.root_state().h, *model.classifier), 1);
    return mul(loss, Tensor::scalar(kFdLossScale));
  };

  const GradCheckReport report = finite_diff_check(objective, params);
  std::vector<std::string> failing;
  for (const GradCheckGroup& group : report.groups) {
    std::printf("%-12s max rel error %.3e\n", group.name.c_str(),
                group.max_rel_error);
    if (!(group.max_rel_error < kGradTolerance)) failing.push_back(group.name);
  }
  std::printf("overall max rel error %.3e (tolerance %.0e)\n",
              report.max_rel_error, kGradTolerance);
  if (!failing.empty()) {
    std::fprintf(stderr, "over tolerance:");
    for (const std::string& name : failing) std::fprintf(stderr, " %s", name.c_str());
    std::fprintf(stderr, "\n");
    return kExitGradTolerance;
  }
  return kExitOk;
}

int cmd_sweep_z(const TrainFlags& flags, std::vector<int> z_values) {
  RunConfig base = resolve_config(flags);
  if (!is_dynamic(base.variant)) {
    throw ConfigError("sweep-z needs a dynamic variant, got " +
                      to_string(base.variant));
  }
  if (base.dev_path.empty()) {
    throw ConfigError("sweep-z needs a dev set (key: dev)");
  }
  if (z_values.empty()) {
    throw ConfigError("sweep-z: empty z list");
  }
  std::set<int> seen;
  for (const int z : z_values) {
    if (z <= 0) throw ConfigError("sweep-z: z values must be positive");
    if (!seen.insert(z).second) {
      throw ConfigError("sweep-z: duplicate z value " + std::to_string(z));
    }
  }

  const LoadedRun run = load_run_data(base);
  std::string csv = "z,dev_acc\n";
  for (const int z : z_values) {
    RunConfig cfg = base;
    cfg.z = z;
    const TrainResult result = train(cfg, run.train, &*run.dev);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%d,%.17g\n", z, result.best_dev_acc);
    csv += buf;
    std::printf("z=%-3d dev_acc %.4f\n", z, result.best_dev_acc);
  }

  fs::create_directories(flags.out_dir);
  const fs::path csv_path = fs::path(flags.out_dir) / "sweep.csv";
  write_file(csv_path, csv);
  std::printf("sweep table: %s\n", csv_path.string().c_str());
  return kExitOk;
}

int cmd_inspect(const std::string& checkpoint_path,
                const std::string& dataset_path, int neuron, int top_n,
                const std::string& out_dir) {
  Model model = load_checkpoint(checkpoint_path);
  if (!is_dynamic(model.variant)) {
    std::fprintf(stderr,
                 "checkpoint holds a static %s model; inspection needs a "
                 "dynamic variant\n",
                 to_string(model.variant).c_str());
    return kExitStaticCheckpoint;
  }
  if (neuron < 0 || neuron >= model.sizes.z) {
    throw ConfigError("neuron " + std::to_string(neuron) +
                      " out of range for z = " + std::to_string(model.sizes.z));
  }
  if (top_n < 0) throw ConfigError("top-n must be >= 0");

  std::vector<Sample> samples = load_tree_dataset(dataset_path, -1);
  for (Sample& s : samples) index_tokens(s.tree, model.vocab);

  const auto records = record_activations(samples, model);

  fs::create_directories(out_dir);
  std::ostringstream csv;
  write_activations_csv(csv, records);
  write_file(fs::path(out_dir) / "activations.csv", csv.str());

  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto doc = export_heatmap(samples[i], model, neuron);
    write_file(fs::path(out_dir) / ("heatmap_" + std::to_string(i) + ".json"),
               doc.dump(1) + "\n");
  }

  std::printf("neuron %d top phrases:\n", neuron);
  for (const auto& [phrase, activation] :
       top_activating_phrases(records, neuron, top_n)) {
    std::printf("  % .6f  %s\n", activation, phrase.c_str());
  }
  std::printf("%zu activation records over %zu samples -> %s\n", records.size(),
              samples.size(), out_dir.c_str());
  return kExitOk;
}

int cmd_count_params(const std::string& variant_name, int d, int e, int m,
                     int z) {
  const Variant variant = variant_from_string(variant_name);
  const ParamCountBreakdown counts = count_params_breakdown(d, e, m, z, variant);
  std::printf("variant %s (d=%d e=%d m=%d z=%d)\n", variant_name.c_str(), d, e,
              m, z);
  std::printf("composition parameters: %lld\n", counts.composition);
  if (counts.meta_core > 0) {
    std::printf("meta core (W_m, b_m):   %lld\n", counts.meta_core);
  }
  if (counts.leaf > 0) {
    std::printf("leaf projection:        %lld\n", counts.leaf);
  }
  std::printf("embedding per word:     %lld\n", counts.embedding_per_word);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dynamic compositional tree networks"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  CLI::App* train_cmd =
      app.add_subcommand("train", "train a model from a config file");
  add_override_flags(train_cmd, train_flags);

  std::string eval_checkpoint, eval_dataset, eval_out;
  CLI::App* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint");
  eval_cmd->add_option("--checkpoint", eval_checkpoint, "checkpoint file")
      ->required();
  eval_cmd->add_option("--dataset", eval_dataset, "dataset file")->required();
  eval_cmd->add_option("--out", eval_out, "write JSON-lines predictions here");

  std::string gc_variant;
  int gc_d = 4, gc_m = 3, gc_z = 2;
  uint64_t gc_seed = 1;
  CLI::App* gc_cmd = app.add_subcommand(
      "gradcheck", "finite-difference check of every parameter group");
  gc_cmd->add_option("--variant", gc_variant, "model variant")->required();
  gc_cmd->add_option("--d", gc_d, "composer state size (<= 8)");
  gc_cmd->add_option("--m", gc_m, "meta state size (<= 8)");
  gc_cmd->add_option("--z", gc_z, "controlling vector size (<= 8)");
  gc_cmd->add_option("--seed", gc_seed, "RNG seed");

  TrainFlags sweep_flags;
  std::vector<int> sweep_z = {5, 10, 15, 20, 25, 30, 35, 40, 45, 50};
  CLI::App* sweep_cmd = app.add_subcommand(
      "sweep-z", "train once per z value and tabulate dev accuracy");
  add_override_flags(sweep_cmd, sweep_flags);
  sweep_cmd->add_option("--z-list", sweep_z, "z values to sweep")
      ->delimiter(',');

  std::string in_checkpoint, in_dataset, in_out = ".";
  int in_neuron = 0, in_top_n = 10;
  CLI::App* inspect_cmd = app.add_subcommand(
      "inspect", "dump controlling-vector activations and heatmaps");
  inspect_cmd->add_option("--checkpoint", in_checkpoint, "checkpoint file")
      ->required();
  inspect_cmd->add_option("--dataset", in_dataset, "tree dataset file")
      ->required();
  inspect_cmd->add_option("--neuron", in_neuron, "neuron index");
  inspect_cmd->add_option("--top-n", in_top_n, "phrases to print");
  inspect_cmd->add_option("--out", in_out, "output directory");

  std::string cp_variant;
  int cp_d = 100, cp_e = 100, cp_m = 20, cp_z = 20;
  CLI::App* cp_cmd =
      app.add_subcommand("count-params", "parameter count breakdown");
  cp_cmd->add_option("--variant", cp_variant, "model variant")->required();
  cp_cmd->add_option("--d", cp_d, "composer state size");
  cp_cmd->add_option("--e", cp_e, "embedding size");
  cp_cmd->add_option("--m", cp_m, "meta state size");
  cp_cmd->add_option("--z", cp_z, "controlling vector size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (train_cmd->parsed()) return cmd_train(train_flags);
    if (eval_cmd->parsed()) return cmd_eval(eval_checkpoint, eval_dataset, eval_out);
    if (gc_cmd->parsed()) return cmd_gradcheck(gc_variant, gc_d, gc_m, gc_z, gc_seed);
    if (sweep_cmd->parsed()) return cmd_sweep_z(sweep_flags, sweep_z);
    if (inspect_cmd->parsed()) {
      return cmd_inspect(in_checkpoint, in_dataset, in_neuron, in_top_n, in_out);
    }
    if (cp_cmd->parsed()) return cmd_count_params(cp_variant, cp_d, cp_e, cp_m, cp_z);
  } catch (const NumericError& e) {
    std::fprintf(stderr, "numeric divergence: %s\n", e.what());
    return kExitNumeric;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return kExitConfig;
  } catch (const ParseError& e) {
    std::fprintf(stderr, "parse error: %s\n", e.what());
    return kExitData;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kExitData;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
  return kExitConfig;
}
