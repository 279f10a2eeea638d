#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dctree/checkpoint.hpp"
#include "dctree/composers.hpp"
#include "dctree/error.hpp"
#include "dctree/gradcheck.hpp"
#include "dctree/model.hpp"
#include "dctree/toygen.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace dctree;
using testutil::max_abs_diff;
using testutil::random_tensor;
using testutil::to_mat;
using testutil::to_vec;

TEST_CASE("recnn_compose hand cases") {
  // zero parameters -> zero output
  StaticRecnnParams zero{Tensor(2, 4), Tensor(2, 1)};
  const Tensor h = recnn_compose(Tensor::column({0.3, -0.2}),
                                 Tensor::column({1.0, 0.5}), zero);
  CHECK(max_abs_diff(h.data(), {0.0, 0.0}) == 0.0);

  // d = 1, W = [1 1], children 0.5 each -> tanh(1)
  StaticRecnnParams p{Tensor(1, 2, {1, 1}), Tensor(1, 1)};
  const Tensor h1 =
      recnn_compose(Tensor::column({0.5}), Tensor::column({0.5}), p);
  CHECK(h1.item() == doctest::Approx(0.76159415595576485).epsilon(1e-12));
}

TEST_CASE("recnn_compose matches the scalar oracle") {
  Rng rng(101);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(3));
    StaticRecnnParams p{random_tensor(d, 2 * d, rng), random_tensor(d, 1, rng)};
    const Tensor h_l = random_tensor(d, 1, rng);
    const Tensor h_r = random_tensor(d, 1, rng);
    const auto expect =
        oracle::recnn_compose(to_mat(p.W), to_vec(p.b), to_vec(h_l), to_vec(h_r));
    CHECK(max_abs_diff(recnn_compose(h_l, h_r, p).data(), expect) < 1e-14);
  }
}

TEST_CASE("treelstm_compose hand cases") {
  // all zero: gates 0.5, c~ = 0 -> c = 0, h = 0
  StaticTreelstmParams zero{Tensor(5, 3), Tensor(5, 1)};
  const Tensor z1(1, 1);
  const LstmState s0 = treelstm_compose(z1, z1, z1, z1, z1, zero);
  CHECK(s0.c.item() == 0.0);
  CHECK(s0.h.item() == 0.0);

  // c_l = 2 flows through the 0.5 forget gate: c = 1, h = 0.5 tanh(1)
  const LstmState s1 =
      treelstm_compose(z1, z1, z1, Tensor::column({2.0}), z1, zero);
  CHECK(s1.c.item() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(s1.h.item() == doctest::Approx(0.38079707797788243).epsilon(1e-12));
}

TEST_CASE("treelstm_compose matches the scalar oracle") {
  Rng rng(102);
  for (int trial = 0; trial < 20; ++trial) {
    const int d = 2 + static_cast<int>(rng.below(3));
    StaticTreelstmParams p{random_tensor(5 * d, 3 * d, rng),
                           random_tensor(5 * d, 1, rng)};
    const Tensor x = random_tensor(d, 1, rng);
    const Tensor h_l = random_tensor(d, 1, rng);
    const Tensor h_r = random_tensor(d, 1, rng);
    const Tensor c_l = random_tensor(d, 1, rng);
    const Tensor c_r = random_tensor(d, 1, rng);
    const LstmState got = treelstm_compose(x, h_l, h_r, c_l, c_r, p);
    const oracle::LstmOut expect = oracle::treelstm_compose(
        to_mat(p.W), to_vec(p.b), to_vec(x), to_vec(h_l), to_vec(h_r),
        to_vec(c_l), to_vec(c_r));
    CHECK(max_abs_diff(got.h.data(), expect.h) < 1e-14);
    CHECK(max_abs_diff(got.c.data(), expect.c) < 1e-14);
  }
}

TEST_CASE("meta_recnn_step zero cases and oracle") {
  const int d = 2, m = 2, z = 2;
  MetaRecnnParams zero{Tensor(m, 2 * d + 2 * m), Tensor(m, 1), Tensor(z, m)};
  const Tensor hd(d, 1), hm(m, 1);
  const MetaRecnnOut out = meta_recnn_step(hd, hd, hm, hm, zero);
  CHECK(max_abs_diff(out.h_hat.data(), {0, 0}) == 0.0);
  CHECK(max_abs_diff(out.z.data(), {0, 0}) == 0.0);

  Rng rng(103);
  MetaRecnnParams p{random_tensor(m, 2 * d + 2 * m, rng),
                    random_tensor(m, 1, rng), random_tensor(z, m, rng)};
  // W_z = 0 kills z regardless of the hidden state
  MetaRecnnParams pz = p;
  pz.W_z = Tensor(z, m);
  const MetaRecnnOut gated = meta_recnn_step(
      random_tensor(d, 1, rng), random_tensor(d, 1, rng),
      random_tensor(m, 1, rng), random_tensor(m, 1, rng), pz);
  CHECK(max_abs_diff(gated.z.data(), {0, 0}) == 0.0);

  for (int trial = 0; trial < 20; ++trial) {
    const Tensor h_l = random_tensor(d, 1, rng), h_r = random_tensor(d, 1, rng);
    const Tensor hh_l = random_tensor(m, 1, rng), hh_r = random_tensor(m, 1, rng);
    const MetaRecnnOut got = meta_recnn_step(h_l, h_r, hh_l, hh_r, p);
    const oracle::MetaRecnnOut expect = oracle::meta_recnn_step(
        to_mat(p.W_m), to_vec(p.b_m), to_mat(p.W_z), to_vec(h_l), to_vec(h_r),
        to_vec(hh_l), to_vec(hh_r));
    CHECK(max_abs_diff(got.h_hat.data(), expect.h_hat) < 1e-14);
    CHECK(max_abs_diff(got.z.data(), expect.z) < 1e-14);
  }
}

TEST_CASE("meta_treelstm_step zero case, hand case, oracle") {
  const int d = 1, m = 1, z = 1;
  MetaTreelstmParams zero{Tensor(5 * m, 3 * d + 2 * m), Tensor(5 * m, 1),
                          Tensor(z, m)};
  const Tensor xd(d, 1), hm(m, 1);
  const MetaTreelstmOut o0 =
      meta_treelstm_step(xd, xd, xd, hm, hm, hm, hm, zero);
  CHECK(o0.h_hat.item() == 0.0);
  CHECK(o0.c_hat.item() == 0.0);
  CHECK(o0.z.item() == 0.0);

  // meta cell state flows through the 0.5 forget gate
  MetaTreelstmParams wz = zero;
  wz.W_z = Tensor(z, m, {2.0});
  const MetaTreelstmOut o1 = meta_treelstm_step(
      xd, xd, xd, hm, hm, Tensor::column({2.0}), hm, wz);
  CHECK(o1.c_hat.item() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(o1.h_hat.item() == doctest::Approx(0.38079707797788243).epsilon(1e-12));
  CHECK(o1.z.item() == doctest::Approx(2.0 * 0.38079707797788243).epsilon(1e-12));

  Rng rng(104);
  const int d2 = 3, m2 = 2, z2 = 2;
  MetaTreelstmParams p{random_tensor(5 * m2, 3 * d2 + 2 * m2, rng),
                       random_tensor(5 * m2, 1, rng),
                       random_tensor(z2, m2, rng)};
  for (int trial = 0; trial < 20; ++trial) {
    const Tensor x = random_tensor(d2, 1, rng);
    const Tensor h_l = random_tensor(d2, 1, rng), h_r = random_tensor(d2, 1, rng);
    const Tensor hh_l = random_tensor(m2, 1, rng), hh_r = random_tensor(m2, 1, rng);
    const Tensor ch_l = random_tensor(m2, 1, rng), ch_r = random_tensor(m2, 1, rng);
    const MetaTreelstmOut got =
        meta_treelstm_step(x, h_l, h_r, hh_l, hh_r, ch_l, ch_r, p);
    const oracle::MetaLstmOut expect = oracle::meta_treelstm_step(
        to_mat(p.W_m), to_vec(p.b_m), to_mat(p.W_z), to_vec(x), to_vec(h_l),
        to_vec(h_r), to_vec(hh_l), to_vec(hh_r), to_vec(ch_l), to_vec(ch_r));
    CHECK(max_abs_diff(got.h_hat.data(), expect.h_hat) < 1e-14);
    CHECK(max_abs_diff(got.c_hat.data(), expect.c_hat) < 1e-14);
    CHECK(max_abs_diff(got.z.data(), expect.z) < 1e-14);
  }
}

TEST_CASE("generate_recnn_params structure") {
  const int d = 3, z = 3;
  Rng rng(105);
  RecnnGeneratorParams g{random_tensor(d, z, rng), random_tensor(d, z, rng),
                         random_tensor(z, d, rng), random_tensor(z, d, rng),
                         random_tensor(d, z, rng), random_tensor(d, z, rng)};

  // z = 0 -> W(z) = 0 and b(z) = 0
  const auto [W0, b0] = generate_recnn_params(Tensor(z, 1), g);
  CHECK(W0.rows() == d);
  CHECK(W0.cols() == 2 * d);
  for (double v : W0.data()) CHECK(v == 0.0);
  for (double v : b0.data()) CHECK(v == 0.0);

  // identity construction: P = Q = I, z = ones -> [I | I]
  Tensor eye(d, d);
  for (int i = 0; i < d; ++i) eye.at(i, i) = 1.0;
  RecnnGeneratorParams gid{eye, eye, eye, eye, Tensor(d, z), Tensor(d, z)};
  const auto [Wi, bi] = generate_recnn_params(Tensor::column({1, 1, 1}), gid);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c < 2 * d; ++c) {
      const double expect = (c % d == r) ? 1.0 : 0.0;
      CHECK(Wi.at(r, c) == expect);
    }
  }

  // oracle equivalence
  const Tensor zv = random_tensor(z, 1, rng);
  const auto [W, b] = generate_recnn_params(zv, g);
  CHECK(max_abs_diff(W, oracle::gen_recnn_W(to_mat(g.P_l), to_mat(g.Q_l),
                                            to_mat(g.P_r), to_mat(g.Q_r),
                                            to_vec(zv))) < 1e-14);
  CHECK(max_abs_diff(b.data(), oracle::gen_recnn_b(to_mat(g.B_l), to_mat(g.B_r),
                                                   to_vec(zv))) < 1e-14);
}

TEST_CASE("generated recnn blocks have rank at most z") {
  const int d = 8, z = 3;
  Rng rng(106);
  RecnnGeneratorParams g{random_tensor(d, z, rng), random_tensor(d, z, rng),
                         random_tensor(z, d, rng), random_tensor(z, d, rng),
                         random_tensor(d, z, rng), random_tensor(d, z, rng)};
  const Tensor zv = random_tensor(z, 1, rng);
  const auto [W, b] = generate_recnn_params(zv, g);
  for (int block = 0; block < 2; ++block) {
    oracle::Mat sub(d, oracle::Vec(d));
    for (int r = 0; r < d; ++r) {
      for (int c = 0; c < d; ++c) {
        sub[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
            W.at(r, block * d + c);
      }
    }
    const auto sv = oracle::singular_values(sub);
    for (std::size_t i = static_cast<std::size_t>(z); i < sv.size(); ++i) {
      CHECK(sv[i] < 1e-10);
    }
    CHECK(sv[0] > 1e-3);  // not trivially zero
  }
}

TEST_CASE("generate_treelstm_params matches the oracle and stacks gates") {
  const int d = 3, z = 2;
  Rng rng(107);
  TreelstmGeneratorParams g;
  std::vector<oracle::GateGen> og;
  for (auto& gate : g.gates) {
    gate = TreelstmGateGenerator{
        random_tensor(d, z, rng), random_tensor(d, z, rng),
        random_tensor(d, z, rng), random_tensor(z, d, rng),
        random_tensor(z, d, rng), random_tensor(z, d, rng),
        random_tensor(d, z, rng)};
    og.push_back({to_mat(gate.P_x), to_mat(gate.Q_x), to_mat(gate.P_l),
                  to_mat(gate.Q_l), to_mat(gate.P_r), to_mat(gate.Q_r),
                  to_mat(gate.B)});
  }
  const Tensor zv = random_tensor(z, 1, rng);
  const auto [W, b] = generate_treelstm_params(zv, g);
  CHECK(W.rows() == 5 * d);
  CHECK(W.cols() == 3 * d);
  CHECK(b.rows() == 5 * d);
  CHECK(max_abs_diff(W, oracle::gen_treelstm_W(og, to_vec(zv))) < 1e-14);
  CHECK(max_abs_diff(b.data(), oracle::gen_treelstm_b(og, to_vec(zv))) < 1e-14);

  const auto [W0, b0] = generate_treelstm_params(Tensor(z, 1), g);
  for (double v : W0.data()) CHECK(v == 0.0);
  for (double v : b0.data()) CHECK(v == 0.0);
}

TEST_CASE("count_params reproduces the published comparison") {
  CHECK(count_params(100, 100, 20, 20, Variant::kDcRecnn) == 12400);
  CHECK(count_params(100, 100, 20, 20, Variant::kRecnn) == 20100);
  CHECK(count_params(1, 1, 1, 1, Variant::kDcRecnn) == 7);
  CHECK(count_params(100, 100, 20, 20, Variant::kDcRecnn) <
        count_params(100, 100, 20, 20, Variant::kRecnn));

  CHECK(count_params(4, 4, 3, 2, Variant::kTreelstm) == 15 * 16 + 20);
  CHECK(count_params(4, 4, 3, 2, Variant::kDcTreelstm) == 35 * 8 + 6);
  CHECK_THROWS_AS(count_params(0, 1, 1, 1, Variant::kRecnn), ConfigError);
}

TEST_CASE("encode_tree single- and two-leaf hand cases") {
  Rng rng(108);
  Sizes sizes;
  sizes.d = 3;
  sizes.e = 2;
  sizes.m = 2;
  sizes.z = 2;
  sizes.classes = 2;
  Model model = testutil::random_model(Variant::kRecnn, Task::kClassify, sizes,
                                       4, rng);

  BinaryTree leaf_tree = binarize(parse_sexpr("(0 w1)"));
  index_tokens(leaf_tree, model.vocab);
  const Encoding enc = encode_tree(leaf_tree, model);
  const std::size_t row = static_cast<std::size_t>(model.vocab.lookup("w1"));
  const auto expect = oracle::tanh(oracle::add(
      oracle::matvec(to_mat(model.leaf->W),
                     testutil::to_mat(model.embeddings)[row]),
      to_vec(model.leaf->b)));
  CHECK(max_abs_diff(enc.root_state().h.data(), expect) < 1e-14);

  BinaryTree two = binarize(parse_sexpr("(1 (0 w1) (0 w2))"));
  index_tokens(two, model.vocab);
  const Encoding enc2 = encode_tree(two, model);
  const auto& root_node = two.nodes[static_cast<std::size_t>(two.root)];
  const Tensor via_compose = recnn_compose(
      enc2.states[static_cast<std::size_t>(root_node.left)].h,
      enc2.states[static_cast<std::size_t>(root_node.right)].h, *model.recnn);
  CHECK(max_abs_diff(enc2.root_state().h.data(), via_compose.data()) == 0.0);
}

TEST_CASE("encode_tree matches the end-to-end oracles on random trees") {
  Rng rng(109);
  Sizes sizes;
  sizes.d = 4;
  sizes.e = 4;
  sizes.m = 3;
  sizes.z = 2;
  sizes.classes = 2;

  for (int trial = 0; trial < 5; ++trial) {
    const int leaves = 3 + static_cast<int>(rng.below(5));
    const BinaryTree tree = make_random_tree(leaves, 6, rng);

    Model recnn = testutil::random_model(Variant::kRecnn, Task::kClassify,
                                         sizes, 6, rng);
    CHECK(max_abs_diff(
              encode_tree(tree, recnn).root_state().h.data(),
              oracle::encode_recnn(tree, testutil::oracle_view_recnn(recnn),
                                   testutil::to_mat(recnn.embeddings))) < 1e-13);

    Model lstm = testutil::random_model(Variant::kTreelstm, Task::kClassify,
                                        sizes, 6, rng);
    const oracle::LstmOut lo = oracle::encode_treelstm(
        tree, testutil::oracle_view_treelstm(lstm),
        testutil::to_mat(lstm.embeddings));
    const Encoding le = encode_tree(tree, lstm);
    CHECK(max_abs_diff(le.root_state().h.data(), lo.h) < 1e-13);
    CHECK(max_abs_diff(le.root_state().c.data(), lo.c) < 1e-13);

    Model dcr = testutil::random_model(Variant::kDcRecnn, Task::kClassify,
                                       sizes, 6, rng);
    CHECK(max_abs_diff(
              encode_tree(tree, dcr).root_state().h.data(),
              oracle::encode_dc_recnn(tree, testutil::oracle_view_dc_recnn(dcr),
                                      testutil::to_mat(dcr.embeddings))) < 1e-13);

    Model dcl = testutil::random_model(Variant::kDcTreelstm, Task::kClassify,
                                       sizes, 6, rng);
    const oracle::LstmOut dlo = oracle::encode_dc_treelstm(
        tree, testutil::oracle_view_dc_treelstm(dcl),
        testutil::to_mat(dcl.embeddings));
    const Encoding dle = encode_tree(tree, dcl);
    CHECK(max_abs_diff(dle.root_state().h.data(), dlo.h) < 1e-13);
    CHECK(max_abs_diff(dle.root_state().c.data(), dlo.c) < 1e-13);
  }
}

TEST_CASE("encode_tree state shapes are sound for all variants") {
  Rng rng(110);
  Sizes sizes;
  sizes.d = 5;
  sizes.e = 3;  // e != d for the RecNN family
  sizes.m = 4;
  sizes.z = 2;
  sizes.classes = 2;
  const BinaryTree tree = make_random_tree(6, 5, rng);

  for (Variant v : {Variant::kRecnn, Variant::kDcRecnn}) {
    Model model = testutil::random_model(v, Task::kClassify, sizes, 5, rng);
    const Encoding enc = encode_tree(tree, model);
    for (const NodeState& s : enc.states) {
      CHECK(s.h.rows() == sizes.d);
      CHECK(s.h.cols() == 1);
      if (v == Variant::kDcRecnn) {
        CHECK(s.h_hat.rows() == sizes.m);
        CHECK(s.z.rows() == sizes.z);
      }
    }
  }

  Sizes lstm_sizes = sizes;
  lstm_sizes.e = lstm_sizes.d;
  for (Variant v : {Variant::kTreelstm, Variant::kDcTreelstm}) {
    Model model = testutil::random_model(v, Task::kClassify, lstm_sizes, 5, rng);
    const Encoding enc = encode_tree(tree, model);
    for (const NodeState& s : enc.states) {
      CHECK(s.h.rows() == lstm_sizes.d);
      CHECK(s.c.rows() == lstm_sizes.d);
      if (v == Variant::kDcTreelstm) {
        CHECK(s.h_hat.rows() == lstm_sizes.m);
        CHECK(s.c_hat.rows() == lstm_sizes.m);
        CHECK(s.z.rows() == lstm_sizes.z);
      }
    }
  }
}

TEST_CASE("reduction property: zero W_z and B blocks degenerate the dynamics") {
  Rng rng(111);
  Sizes sizes;
  sizes.d = 4;
  sizes.e = 4;
  sizes.m = 3;
  sizes.z = 2;
  sizes.classes = 2;
  const BinaryTree tree = make_random_tree(5, 5, rng);

  Model dcr = testutil::random_model(Variant::kDcRecnn, Task::kClassify, sizes,
                                     5, rng);
  dcr.meta_recnn->W_z = Tensor(sizes.z, sizes.m);
  dcr.recnn_gen->B_l = Tensor(sizes.d, sizes.z);
  dcr.recnn_gen->B_r = Tensor(sizes.d, sizes.z);
  dcr.leaf_gen->B = Tensor(sizes.d, sizes.z);
  const Encoding enc = encode_tree(tree, dcr);
  for (const NodeState& s : enc.states) {
    for (double v : s.z.data()) CHECK(v == 0.0);
    for (double v : s.h.data()) CHECK(v == 0.0);
  }

  Model dcl = testutil::random_model(Variant::kDcTreelstm, Task::kClassify,
                                     sizes, 5, rng);
  dcl.meta_treelstm->W_z = Tensor(sizes.z, sizes.m);
  for (auto& gate : dcl.treelstm_gen->gates) gate.B = Tensor(sizes.d, sizes.z);
  const Encoding encl = encode_tree(tree, dcl);
  for (const NodeState& s : encl.states) {
    for (double v : s.z.data()) CHECK(v == 0.0);
    // all-zero W(z): every gate pre-activation is 0, so c~ = 0 and c = 0
    for (double v : s.c.data()) CHECK(v == 0.0);
    for (double v : s.h.data()) CHECK(v == 0.0);
  }
}

TEST_CASE("encode_tree is deterministic") {
  Rng rng(112);
  Sizes sizes;
  sizes.d = 4;
  sizes.e = 4;
  sizes.m = 3;
  sizes.z = 2;
  sizes.classes = 2;
  const BinaryTree tree = make_random_tree(6, 5, rng);
  Model model = testutil::random_model(Variant::kDcTreelstm, Task::kClassify,
                                       sizes, 5, rng);
  const Encoding a = encode_tree(tree, model);
  const Encoding b = encode_tree(tree, model);
  CHECK(a.root_state().h.data() == b.root_state().h.data());
  CHECK(a.root_state().z.data() == b.root_state().z.data());
}

TEST_CASE("gradients flow through every parameter group (one tree per variant)") {
  Rng rng(113);
  Sizes sizes;
  sizes.d = 3;
  sizes.e = 3;
  sizes.m = 2;
  sizes.z = 2;
  sizes.classes = 2;
  const BinaryTree tree = make_random_tree(5, 5, rng);

  for (Variant v : {Variant::kRecnn, Variant::kTreelstm, Variant::kDcRecnn,
                    Variant::kDcTreelstm}) {
    Model model = testutil::random_model(v, Task::kClassify, sizes, 5, rng);
    const auto params = model.named_params();
    const auto f = [&]() -> Tensor {
      const Encoding enc = encode_tree(tree, model);
      const Tensor loss = cross_entropy_logits(
          classify_logits(enc.root_state().h, *model.classifier), 1);
      // Exact power-of-two scaling keeps finite-difference roundoff below
      // the checker's absolute floor; the chain rule being verified is the
      // same.
      return mul(loss, Tensor::scalar(testutil::kFdLossScale));
    };
    const GradCheckReport rep = finite_diff_check(f, params);
    INFO("variant ", to_string(v), " worst ", rep.max_rel_error);
    CHECK(rep.max_rel_error < 1e-4);
  }
}

TEST_CASE("make_model validates sizes") {
  Sizes sizes;
  sizes.d = 4;
  sizes.e = 3;
  sizes.m = 2;
  sizes.z = 2;
  sizes.classes = 2;
  CHECK_THROWS_AS(make_model(Variant::kTreelstm, Task::kClassify, sizes, Vocab()),
                  ConfigError);
  sizes.e = 4;
  sizes.classes = 1;
  CHECK_THROWS_AS(make_model(Variant::kRecnn, Task::kClassify, sizes, Vocab()),
                  ConfigError);
}

TEST_CASE("checkpoint round-trips byte-identically and fails loudly") {
  Rng rng(114);
  Sizes sizes;
  sizes.d = 3;
  sizes.e = 3;
  sizes.m = 2;
  sizes.z = 2;
  sizes.classes = 2;
  Model model = testutil::random_model(Variant::kDcTreelstm, Task::kClassify,
                                       sizes, 5, rng);
  const std::string path = "/tmp/dctree_test_ckpt.json";
  save_checkpoint(path, model);
  Model loaded = load_checkpoint(path);
  CHECK(loaded.variant == model.variant);
  CHECK(loaded.vocab.size() == model.vocab.size());

  auto p1 = model.named_params();
  auto p2 = loaded.named_params();
  REQUIRE(p1.size() == p2.size());
  for (std::size_t i = 0; i < p1.size(); ++i) {
    CHECK(p1[i].name == p2[i].name);
    CHECK(p1[i].tensor->data() == p2[i].tensor->data());
  }

  // a second save of the loaded model is byte-identical
  const std::string path2 = "/tmp/dctree_test_ckpt2.json";
  save_checkpoint(path2, loaded);
  std::ifstream f1(path), f2(path2);
  std::stringstream s1, s2;
  s1 << f1.rdbuf();
  s2 << f2.rdbuf();
  CHECK(s1.str() == s2.str());

  // corrupt a shape -> loud failure
  std::string text = s1.str();
  const std::size_t pos = text.find("\"shape\": [\n    3,");
  REQUIRE(pos != std::string::npos);
  text.replace(pos + 15, 1, "4");
  {
    std::ofstream out(path2);
    out << text;
  }
  CHECK_THROWS_AS(load_checkpoint(path2), DataError);
  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"), DataError);
}
