#include "dctree/training.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "dctree/error.hpp"

#include <nlohmann/json.hpp>

namespace dctree {

Sizes RunConfig::sizes() const {
  Sizes s;
  s.d = d;
  s.e = e;
  s.m = m;
  s.z = z;
  s.classes = (task == Task::kMatch) ? 3 : classes;
  s.merge_hidden = merge_hidden;
  s.merge_extras = merge_extras;
  return s;
}

void RunConfig::validate() const {
  if (d <= 0 || e <= 0 || m <= 0 || z <= 0) {
    throw ConfigError("sizes d, e, m, z must be positive");
  }
  if (lr <= 0.0) throw ConfigError("lr must be positive");
  if (l2 < 0.0) throw ConfigError("l2 must be non-negative");
  if (epochs <= 0) throw ConfigError("epochs must be positive");
  if (eval_every <= 0) throw ConfigError("eval_every must be positive");
  if (min_count < 1) throw ConfigError("min_count must be >= 1");
  if (task == Task::kClassify && classes < 2) {
    throw ConfigError("classes must be >= 2 for classification");
  }
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

int to_int(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const int out = std::stoi(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": bad integer \"" + v + "\"");
  }
}

double to_double(const std::string& v, const std::string& key) {
  try {
    std::size_t used = 0;
    const double out = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return out;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": bad number \"" + v + "\"");
  }
}

bool to_bool(const std::string& v, const std::string& key) {
  if (v == "1" || v == "true" || v == "yes") return true;
  if (v == "0" || v == "false" || v == "no") return false;
  throw ConfigError("config key " + key + ": bad boolean \"" + v + "\"");
}

}  // namespace

RunConfig parse_config(std::istream& in, const std::string& origin) {
  RunConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "variant") cfg.variant = variant_from_string(value);
    else if (key == "task") cfg.task = task_from_string(value);
    else if (key == "d") cfg.d = to_int(value, key);
    else if (key == "e") cfg.e = to_int(value, key);
    else if (key == "m") cfg.m = to_int(value, key);
    else if (key == "z") cfg.z = to_int(value, key);
    else if (key == "classes") cfg.classes = to_int(value, key);
    else if (key == "lr") cfg.lr = to_double(value, key);
    else if (key == "l2") cfg.l2 = to_double(value, key);
    else if (key == "epochs") cfg.epochs = to_int(value, key);
    else if (key == "seed") cfg.seed = static_cast<uint64_t>(std::stoull(value));
    else if (key == "dataset") cfg.train_path = value;
    else if (key == "dev") cfg.dev_path = value;
    else if (key == "test") cfg.test_path = value;
    else if (key == "embeddings") cfg.embeddings_path = value;
    else if (key == "eval_every") cfg.eval_every = to_int(value, key);
    else if (key == "min_count") cfg.min_count = to_int(value, key);
    else if (key == "merge_hidden") cfg.merge_hidden = to_int(value, key);
    else if (key == "merge_extras") cfg.merge_extras = to_bool(value, key);
    else {
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": unknown key \"" + key + "\"");
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path);
  return parse_config(in, path);
}

Data load_data(Task task, const std::string& path, int classes) {
  Data data;
  data.task = task;
  if (task == Task::kClassify) {
    data.samples = load_tree_dataset(path, classes);
  } else {
    data.pairs = load_pair_dataset(path);
  }
  return data;
}

namespace {

void collect_tokens(const BinaryTree& tree,
                    std::vector<std::vector<std::string>>& corpus) {
  corpus.push_back(tree.tokens);
}

}  // namespace

std::vector<std::vector<std::string>> corpus_of(const Data& data) {
  std::vector<std::vector<std::string>> corpus;
  if (data.task == Task::kClassify) {
    for (const Sample& s : data.samples) collect_tokens(s.tree, corpus);
  } else {
    for (const PairSample& p : data.pairs) {
      collect_tokens(p.tree_a, corpus);
      collect_tokens(p.tree_b, corpus);
    }
  }
  return corpus;
}

void index_data(Data& data, const Vocab& vocab) {
  if (data.task == Task::kClassify) {
    for (Sample& s : data.samples) index_tokens(s.tree, vocab);
  } else {
    for (PairSample& p : data.pairs) {
      index_tokens(p.tree_a, vocab);
      index_tokens(p.tree_b, vocab);
    }
  }
}

void adagrad_step(Tensor& param, const Tensor& grad, Tensor& accum, double lr,
                  double l2, double eps) {
  if (param.rows() != grad.rows() || param.cols() != grad.cols() ||
      param.rows() != accum.rows() || param.cols() != accum.cols()) {
    throw ShapeError("adagrad_step: mismatched shapes " + param.shape_str() +
                     " / " + grad.shape_str() + " / " + accum.shape_str());
  }
  for (int i = 0; i < param.size(); ++i) {
    const double g = grad[i] + l2 * param[i];
    accum[i] += g * g;
    param[i] -= lr * g / (std::sqrt(accum[i]) + eps);
  }
}

AdaGrad::AdaGrad(double lr, double l2, double eps)
    : lr_(lr), l2_(l2), eps_(eps) {}

void AdaGrad::init(const std::vector<ParamRef>& params) {
  accum_.clear();
  accum_.reserve(params.size());
  for (const ParamRef& p : params) {
    accum_.emplace_back(p.tensor->rows(), p.tensor->cols());
  }
}

void AdaGrad::step(const std::vector<ParamRef>& params,
                   const Gradients& grads) {
  for (std::size_t i = 0; i < params.size(); ++i) {
    adagrad_step(*params[i].tensor, grads.of(*params[i].tensor), accum_[i],
                 lr_, params[i].decay ? l2_ : 0.0, eps_);
  }
}

Model init_model(const RunConfig& config, const Vocab& vocab, Rng& rng) {
  config.validate();
  Model model = make_model(config.variant, config.task, config.sizes(), vocab);
  if (!config.embeddings_path.empty()) {
    model.embeddings =
        load_embeddings(config.embeddings_path, model.vocab, config.e, rng);
  } else {
    model.embeddings = random_embeddings(model.vocab, config.e, rng);
  }
  for (const ParamRef& p : model.named_params()) {
    if (p.name == "emb.E") continue;
    for (double& v : p.tensor->data()) v = rng.uniform(-0.1, 0.1);
  }
  return model;
}

Tensor sample_loss(const Model& model, const Data& data, std::size_t index) {
  if (data.task == Task::kClassify) {
    const Sample& s = data.samples[index];
    const Encoding enc = encode_tree(s.tree, model);
    const Tensor logits = classify_logits(enc.root_state().h, *model.classifier);
    return cross_entropy_logits(logits, s.label);
  }
  const PairSample& p = data.pairs[index];
  const Tensor logits = match_pair_logits(p.tree_a, p.tree_b, model);
  return cross_entropy_logits(logits, p.label);
}

namespace {

std::vector<double> sample_probs(const Model& model, const Data& data,
                                 std::size_t index) {
  if (data.task == Task::kClassify) {
    const Sample& s = data.samples[index];
    const Encoding enc = encode_tree(s.tree, model);
    return classify(enc.root_state().h, *model.classifier).data();
  }
  const PairSample& p = data.pairs[index];
  return match_pair(p.tree_a, p.tree_b, model).data();
}

int gold_of(const Data& data, std::size_t index) {
  return data.task == Task::kClassify ? data.samples[index].label
                                      : data.pairs[index].label;
}

int argmax(const std::vector<double>& v) {
  int best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

}  // namespace

EvalResult evaluate(const Model& model, const Data& data) {
  if (data.size() == 0) throw DataError("evaluate: empty dataset");
  EvalResult out;
  int correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    Prediction pred;
    pred.id = static_cast<int>(i);
    pred.gold = gold_of(data, i);
    pred.probs = sample_probs(model, data, i);
    pred.predicted = argmax(pred.probs);
    if (pred.predicted == pred.gold) ++correct;
    out.predictions.push_back(std::move(pred));
  }
  out.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  return out;
}

TrainResult train_loop(const RunConfig& config, Model model,
                       const Data& train_data, const Data* dev_data,
                       Rng& rng) {
  if (train_data.size() == 0) throw DataError("train: empty training set");
  if (train_data.task != config.task ||
      (dev_data != nullptr && dev_data->task != config.task)) {
    throw ConfigError("train: dataset task does not match the configured task");
  }

  std::vector<ParamRef> params = model.named_params();
  AdaGrad opt(config.lr, config.l2);
  opt.init(params);

  std::vector<Tensor*> tensors;
  tensors.reserve(params.size());
  for (const ParamRef& p : params) tensors.push_back(p.tensor);

  TrainResult result;
  Model best = model;
  double best_dev = -1.0;

  std::vector<std::size_t> order(train_data.size());
  std::iota(order.begin(), order.end(), 0);

  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    rng.shuffle(order);
    double loss_sum = 0.0;
    for (const std::size_t idx : order) {
      Tape tape;
      TapeScope scope(tape, tensors);
      const Tensor loss = sample_loss(model, train_data, idx);
      const double value = loss.item();
      if (!std::isfinite(value)) {
        throw NumericError("training loss is not finite at epoch " +
                               std::to_string(epoch),
                           epoch);
      }
      loss_sum += value;
      const Gradients grads = backward(tape, loss);
      opt.step(params, grads);
    }

    EpochMetrics metrics;
    metrics.epoch = epoch;
    metrics.train_loss = loss_sum / static_cast<double>(train_data.size());
    metrics.train_acc = evaluate(model, train_data).accuracy;
    if (dev_data != nullptr &&
        (epoch % config.eval_every == 0 || epoch == config.epochs)) {
      metrics.dev_acc = evaluate(model, *dev_data).accuracy;
      metrics.has_dev = true;
      if (metrics.dev_acc > best_dev) {
        best_dev = metrics.dev_acc;
        best = model;
      }
    }
    result.history.push_back(metrics);
  }

  result.best_dev_acc = best_dev;
  result.model = (dev_data != nullptr) ? std::move(best) : std::move(model);
  return result;
}

TrainResult train(const RunConfig& config, const Data& train_data,
                  const Data* dev_data) {
  config.validate();
  Rng rng(config.seed);
  const Vocab vocab = build_vocab(corpus_of(train_data), config.min_count);

  Data train_ix = train_data;
  index_data(train_ix, vocab);
  std::optional<Data> dev_ix;
  if (dev_data != nullptr) {
    dev_ix = *dev_data;
    index_data(*dev_ix, vocab);
  }

  Model model = init_model(config, vocab, rng);
  return train_loop(config, std::move(model), train_ix,
                    dev_ix ? &*dev_ix : nullptr, rng);
}

void write_metrics_csv(std::ostream& out,
                       const std::vector<EpochMetrics>& history) {
  out << "epoch,train_loss,train_acc,dev_acc\n";
  char buf[64];
  for (const EpochMetrics& m : history) {
    out << m.epoch << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", m.train_loss);
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.17g", m.train_acc);
    out << buf << ',';
    if (m.has_dev) {
      std::snprintf(buf, sizeof(buf), "%.17g", m.dev_acc);
      out << buf;
    }
    out << '\n';
  }
}

void write_predictions_jsonl(std::ostream& out,
                             const std::vector<Prediction>& preds) {
  for (const Prediction& p : preds) {
    nlohmann::ordered_json rec;
    rec["id"] = p.id;
    rec["gold"] = p.gold;
    rec["pred"] = p.predicted;
    rec["probs"] = p.probs;
    out << rec.dump() << '\n';
  }
}

}  // namespace dctree
