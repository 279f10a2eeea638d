#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dctree/model.hpp"
#include "dctree/rng.hpp"

namespace dctree {

// Everything one run needs. Loadable from a flat key = value file; command
// line flags override file values.
struct RunConfig {
  Variant variant = Variant::kDcTreelstm;
  Task task = Task::kClassify;
  int d = 8;
  int e = 8;
  int m = 4;
  int z = 4;
  int classes = 2;
  double lr = 0.1;
  double l2 = 1e-5;
  int epochs = 10;
  uint64_t seed = 1;
  std::string train_path;       // key: dataset
  std::string dev_path;         // key: dev
  std::string test_path;        // key: test
  std::string embeddings_path;  // key: embeddings
  int eval_every = 1;
  int min_count = 1;
  int merge_hidden = 0;  // 0 -> 2d
  bool merge_extras = false;

  Sizes sizes() const;
  void validate() const;  // ConfigError on out-of-range values
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& in, const std::string& origin);

// Task-tagged dataset; `samples` for classification, `pairs` for matching.
struct Data {
  Task task = Task::kClassify;
  std::vector<Sample> samples;
  std::vector<PairSample> pairs;

  std::size_t size() const {
    return task == Task::kClassify ? samples.size() : pairs.size();
  }
};

Data load_data(Task task, const std::string& path, int classes);
std::vector<std::vector<std::string>> corpus_of(const Data& data);
void index_data(Data& data, const Vocab& vocab);

// -log p_gold with the softmax fused in log space.
// (Declared in tensor.hpp: cross_entropy, cross_entropy_logits.)

// One AdaGrad update on a single parameter: g' = g + l2 * theta;
// accum += g' * g'; theta -= lr * g' / (sqrt(accum) + eps).
void adagrad_step(Tensor& param, const Tensor& grad, Tensor& accum, double lr,
                  double l2, double eps = 1e-8);

// Per-parameter accumulator state over a whole model. Parameters whose
// ParamRef::decay is false (biases, embeddings) get l2 = 0.
class AdaGrad {
 public:
  AdaGrad(double lr, double l2, double eps = 1e-8);
  void init(const std::vector<ParamRef>& params);
  void step(const std::vector<ParamRef>& params, const Gradients& grads);
  const Tensor& accumulator(std::size_t i) const { return accum_[i]; }

 private:
  double lr_;
  double l2_;
  double eps_;
  std::vector<Tensor> accum_;
};

// Uniform [-0.1, 0.1] fill for every non-embedding parameter; embeddings come
// from the embedding file when configured, otherwise the same distribution.
Model init_model(const RunConfig& config, const Vocab& vocab, Rng& rng);

struct EpochMetrics {
  int epoch = 0;  // 1-based
  double train_loss = 0.0;
  double train_acc = 0.0;
  double dev_acc = 0.0;
  bool has_dev = false;
};

struct TrainResult {
  Model model;  // best-dev checkpoint when a dev set was given, else final
  std::vector<EpochMetrics> history;
  double best_dev_acc = 0.0;
};

// Loss of a single sample under the model's task.
Tensor sample_loss(const Model& model, const Data& data, std::size_t index);

// Full training pipeline: vocabulary from the training corpus, seeded
// initialization, then per-sample AdaGrad epochs in seeded shuffled order.
TrainResult train(const RunConfig& config, const Data& train_data,
                  const Data* dev_data);

// The epoch loop on an already-initialized model (datasets already indexed).
TrainResult train_loop(const RunConfig& config, Model model,
                       const Data& train_data, const Data* dev_data, Rng& rng);

struct Prediction {
  int id = 0;
  int gold = 0;
  int predicted = 0;
  std::vector<double> probs;
};

struct EvalResult {
  double accuracy = 0.0;
  std::vector<Prediction> predictions;
};

// Forward-only pass; DataError on an empty dataset.
EvalResult evaluate(const Model& model, const Data& data);

void write_metrics_csv(std::ostream& out, const std::vector<EpochMetrics>& history);
void write_predictions_jsonl(std::ostream& out, const std::vector<Prediction>& preds);

}  // namespace dctree
