#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dctree/error.hpp"
#include "dctree/gradcheck.hpp"
#include "dctree/toygen.hpp"
#include "dctree/training.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace dctree;
using testutil::max_abs_diff;
using testutil::random_tensor;

TEST_CASE("cross entropy closed forms") {
  const Tensor uniform(3, 1, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  CHECK(cross_entropy(uniform, 0).item() ==
        doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(cross_entropy(uniform, 2).item() ==
        doctest::Approx(1.0986122886681098).epsilon(1e-12));

  const Tensor confident(2, 1, {1e-9, 1.0 - 1e-9});
  CHECK(cross_entropy(confident, 1).item() ==
        doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("cross entropy matches the scalar oracle on random logits") {
  Rng rng(300);
  for (int trial = 0; trial < 100; ++trial) {
    const int C = 2 + static_cast<int>(rng.below(5));
    const Tensor logits = random_tensor(C, 1, rng, -4.0, 4.0);
    const int gold = static_cast<int>(rng.below(static_cast<uint64_t>(C)));
    CHECK(std::fabs(cross_entropy_logits(logits, gold).item() -
                    oracle::cross_entropy_logits(logits.data(), gold)) < 1e-12);
    const Tensor probs = softmax(logits);
    CHECK(std::fabs(cross_entropy(probs, gold).item() -
                    oracle::cross_entropy(probs.data(), gold)) < 1e-12);
  }
}

TEST_CASE("adagrad first step approximates a signed step") {
  Tensor theta(3, 1, {1.0, -2.0, 0.5});
  Tensor grad(3, 1, {0.2, -0.4, 0.001});
  Tensor accum(3, 1);
  adagrad_step(theta, grad, accum, 0.1, 0.0, 1e-12);
  CHECK(theta[0] == doctest::Approx(1.0 - 0.1).epsilon(1e-8));
  CHECK(theta[1] == doctest::Approx(-2.0 + 0.1).epsilon(1e-8));
  CHECK(theta[2] == doctest::Approx(0.5 - 0.1).epsilon(1e-6));
}

TEST_CASE("adagrad leaves parameters alone on zero gradients") {
  Tensor theta(2, 2, {1, 2, 3, 4});
  Tensor grad(2, 2);
  Tensor accum(2, 2);
  adagrad_step(theta, grad, accum, 0.1, 0.0);
  CHECK(theta.data() == std::vector<double>{1, 2, 3, 4});
  CHECK(accum.data() == std::vector<double>{0, 0, 0, 0});
}

TEST_CASE("adagrad two-step trace matches the scalar oracle") {
  Rng rng(301);
  for (int trial = 0; trial < 100; ++trial) {
    const double lr = 0.1, l2 = 1e-5, eps = 1e-8;
    Tensor theta = random_tensor(1, 1, rng);
    oracle::Vec otheta = theta.data();
    Tensor accum(1, 1);
    oracle::Vec oaccum = {0.0};
    for (int step = 0; step < 2; ++step) {
      const Tensor grad = random_tensor(1, 1, rng);
      adagrad_step(theta, grad, accum, lr, l2, eps);
      oracle::adagrad_step(otheta, grad.data(), oaccum, lr, l2, eps);
    }
    CHECK(std::fabs(theta.item() - otheta[0]) < 1e-15);
    CHECK(std::fabs(accum.item() - oaccum[0]) < 1e-15);
  }
}

TEST_CASE("adagrad accumulators never decrease") {
  Rng rng(302);
  Tensor theta = random_tensor(4, 1, rng);
  Tensor accum(4, 1);
  std::vector<double> prev = accum.data();
  for (int step = 0; step < 50; ++step) {
    const Tensor grad = random_tensor(4, 1, rng);
    adagrad_step(theta, grad, accum, 0.05, 1e-5);
    for (int i = 0; i < 4; ++i) {
      CHECK(accum[i] >= prev[static_cast<std::size_t>(i)]);
    }
    prev = accum.data();
  }
}

TEST_CASE("adagrad_step validates shapes") {
  Tensor theta(2, 1);
  Tensor grad(3, 1);
  Tensor accum(2, 1);
  CHECK_THROWS_AS(adagrad_step(theta, grad, accum, 0.1, 0.0), ShapeError);
}

namespace {

RunConfig toy_config() {
  RunConfig cfg;
  cfg.variant = Variant::kDcTreelstm;
  cfg.task = Task::kClassify;
  cfg.d = 4;
  cfg.e = 4;
  cfg.m = 2;
  cfg.z = 2;
  cfg.classes = 2;
  cfg.epochs = 2;
  cfg.seed = 5;
  return cfg;
}

Data toy_data(int samples, uint64_t seed) {
  ToyOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  Data data;
  data.task = Task::kClassify;
  data.samples = make_toy_treebank(opt);
  return data;
}

}  // namespace

TEST_CASE("init_params stays in range and is seed-deterministic") {
  const RunConfig cfg = toy_config();
  const Vocab vocab = make_synthetic_vocab(6);

  Rng rng1(9);
  Model m1 = init_model(cfg, vocab, rng1);
  for (const ParamRef& p : m1.named_params()) {
    for (double v : p.tensor->data()) {
      CHECK(v >= -0.1);
      CHECK(v <= 0.1);
    }
  }

  Rng rng2(9);
  Model m2 = init_model(cfg, vocab, rng2);
  auto p1 = m1.named_params();
  auto p2 = m2.named_params();
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i].tensor->data() == p2[i].tensor->data());
  }

  Rng rng3(10);
  Model m3 = init_model(cfg, vocab, rng3);
  bool any_diff = false;
  auto p3 = m3.named_params();
  for (std::size_t i = 0; i < p1.size(); ++i) {
    if (p1[i].tensor->data() != p3[i].tensor->data()) any_diff = true;
  }
  CHECK(any_diff);
}

TEST_CASE("train records one metrics row per epoch") {
  RunConfig cfg = toy_config();
  cfg.epochs = 3;
  const Data data = toy_data(12, 77);
  const TrainResult result = train(cfg, data, nullptr);
  CHECK(result.history.size() == 3);
  for (const EpochMetrics& m : result.history) {
    CHECK(std::isfinite(m.train_loss));
    CHECK(m.train_loss >= 0.0);
    CHECK_FALSE(m.has_dev);
  }
}

TEST_CASE("training loss traces are bit-identical across reruns") {
  RunConfig cfg = toy_config();
  cfg.epochs = 3;
  const Data data = toy_data(10, 78);
  const TrainResult a = train(cfg, data, nullptr);
  const TrainResult b = train(cfg, data, nullptr);
  REQUIRE(a.history.size() == b.history.size());
  for (std::size_t i = 0; i < a.history.size(); ++i) {
    CHECK(a.history[i].train_loss == b.history[i].train_loss);
    CHECK(a.history[i].train_acc == b.history[i].train_acc);
  }
  // checkpoints agree too
  auto pa = const_cast<Model&>(a.model).named_params();
  auto pb = const_cast<Model&>(b.model).named_params();
  for (std::size_t i = 0; i < pa.size(); ++i) {
    CHECK(pa[i].tensor->data() == pb[i].tensor->data());
  }
}

TEST_CASE("train keeps the best-dev checkpoint") {
  RunConfig cfg = toy_config();
  cfg.epochs = 4;
  const Data data = toy_data(16, 79);
  const Data dev = toy_data(8, 80);
  const TrainResult result = train(cfg, data, &dev);
  CHECK(result.best_dev_acc >= 0.0);
  double best_seen = -1.0;
  for (const EpochMetrics& m : result.history) {
    CHECK(m.has_dev);
    best_seen = std::max(best_seen, m.dev_acc);
  }
  CHECK(result.best_dev_acc == best_seen);
}

TEST_CASE("train rejects bad inputs") {
  RunConfig cfg = toy_config();
  Data empty;
  empty.task = Task::kClassify;
  CHECK_THROWS_AS(train(cfg, empty, nullptr), DataError);

  cfg.lr = -1.0;
  CHECK_THROWS_AS(train(cfg, toy_data(4, 81), nullptr), ConfigError);

  RunConfig mismatched = toy_config();
  Data pairs;
  pairs.task = Task::kMatch;
  pairs.pairs.push_back(PairSample{});
  mismatched.task = Task::kClassify;
  Rng rng(1);
  CHECK_THROWS_AS(train_loop(mismatched, Model{}, pairs, nullptr, rng),
                  ConfigError);
}

TEST_CASE("evaluate computes accuracy and is pure") {
  RunConfig cfg = toy_config();
  cfg.epochs = 1;
  const Data data = toy_data(8, 82);
  const TrainResult result = train(cfg, data, nullptr);

  Data indexed = data;
  const Vocab vocab = build_vocab(corpus_of(data), 1);
  index_data(indexed, vocab);
  const EvalResult e1 = evaluate(result.model, indexed);
  const EvalResult e2 = evaluate(result.model, indexed);
  CHECK(e1.accuracy == e2.accuracy);
  CHECK(e1.predictions.size() == 8);
  int correct = 0;
  for (const Prediction& p : e1.predictions) {
    if (p.predicted == p.gold) ++correct;
  }
  CHECK(e1.accuracy == doctest::Approx(correct / 8.0));

  Data empty;
  empty.task = Task::kClassify;
  CHECK_THROWS_AS(evaluate(result.model, empty), DataError);
}

TEST_CASE("end-to-end training-loss gradients pass the oracle on a 5-leaf tree") {
  Rng rng(303);
  Sizes sizes;
  sizes.d = 4;
  sizes.e = 4;
  sizes.m = 3;
  sizes.z = 2;
  sizes.classes = 2;
  const BinaryTree tree = make_random_tree(5, 6, rng);

  for (Variant v : {Variant::kRecnn, Variant::kTreelstm, Variant::kDcRecnn,
                    Variant::kDcTreelstm}) {
    Model model = testutil::random_model(v, Task::kClassify, sizes, 6, rng,
                                         0.3);
    auto params = model.named_params();
    const auto f = [&]() -> Tensor {
      const Encoding enc = encode_tree(tree, model);
      const Tensor loss = cross_entropy_logits(
          classify_logits(enc.root_state().h, *model.classifier), 0);
      return mul(loss, Tensor::scalar(testutil::kFdLossScale));
    };
    const GradCheckReport rep = finite_diff_check(f, params);
    INFO("variant ", to_string(v));
    CHECK(rep.max_rel_error < 1e-4);
  }
}

TEST_CASE("config parsing, overrides-ready defaults, and validation") {
  std::istringstream in(
      "# toy run\n"
      "variant = dc-treelstm\n"
      "task = classify\n"
      "d = 8\n"
      "e = 8\n"
      "m = 4\n"
      "z = 4\n"
      "classes = 2\n"
      "lr = 0.1\n"
      "l2 = 1e-5\n"
      "epochs = 25\n"
      "seed = 7\n"
      "dataset = data/toy/train.txt\n"
      "dev = data/toy/dev.txt\n");
  const RunConfig cfg = parse_config(in, "test");
  CHECK(cfg.variant == Variant::kDcTreelstm);
  CHECK(cfg.d == 8);
  CHECK(cfg.l2 == doctest::Approx(1e-5));
  CHECK(cfg.train_path == "data/toy/train.txt");
  cfg.validate();

  std::istringstream bad("unknown_key = 3\n");
  CHECK_THROWS_AS(parse_config(bad, "test"), ConfigError);
  std::istringstream nokv("just some words\n");
  CHECK_THROWS_AS(parse_config(nokv, "test"), ConfigError);
  std::istringstream badnum("d = banana\n");
  CHECK_THROWS_AS(parse_config(badnum, "test"), ConfigError);
}

TEST_CASE("metrics CSV shape") {
  std::vector<EpochMetrics> history(2);
  history[0] = {1, 0.5, 0.75, 0.0, false};
  history[1] = {2, 0.25, 1.0, 0.5, true};
  std::ostringstream out;
  write_metrics_csv(out, history);
  const std::string text = out.str();
  CHECK(text.find("epoch,train_loss,train_acc,dev_acc\n") == 0);
  CHECK(text.find("\n1,0.5,0.75,\n") != std::string::npos);
  CHECK(text.find("\n2,0.25,1,0.5\n") != std::string::npos);
}
