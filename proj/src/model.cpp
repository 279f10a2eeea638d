#include "dctree/model.hpp"

#include <functional>

#include "dctree/error.hpp"

namespace dctree {

namespace {

Tensor embedding_column(const Tensor& embeddings, int token) {
  if (token < 0 || token >= embeddings.rows()) {
    throw Error("token id " + std::to_string(token) +
                " outside the embedding matrix (" + embeddings.shape_str() +
                "); was the tree indexed against the vocabulary?");
  }
  return transpose(slice_rows(embeddings, token, token + 1));
}

}  // namespace

int Model::merge_width() const {
  const int base = sizes.merge_extras ? 4 * sizes.d : 2 * sizes.d;
  return base;
}

std::vector<ParamRef> Model::named_params() {
  std::vector<ParamRef> out;
  auto push = [&out](const char* name, Tensor& t, bool decay) {
    out.push_back(ParamRef{name, &t, decay});
  };

  push("emb.E", embeddings, false);
  if (leaf) {
    push("leaf.W", leaf->W, true);
    push("leaf.b", leaf->b, false);
  }
  if (recnn) {
    push("recnn.W", recnn->W, true);
    push("recnn.b", recnn->b, false);
  }
  if (treelstm) {
    push("lstm.W", treelstm->W, true);
    push("lstm.b", treelstm->b, false);
  }
  if (meta_recnn) {
    push("meta.W_m", meta_recnn->W_m, true);
    push("meta.b_m", meta_recnn->b_m, false);
    push("meta.W_z", meta_recnn->W_z, true);
  }
  if (meta_treelstm) {
    push("meta.W_m", meta_treelstm->W_m, true);
    push("meta.b_m", meta_treelstm->b_m, false);
    push("meta.W_z", meta_treelstm->W_z, true);
  }
  if (recnn_gen) {
    push("gen.P_l", recnn_gen->P_l, true);
    push("gen.Q_l", recnn_gen->Q_l, true);
    push("gen.P_r", recnn_gen->P_r, true);
    push("gen.Q_r", recnn_gen->Q_r, true);
    push("gen.B_l", recnn_gen->B_l, true);
    push("gen.B_r", recnn_gen->B_r, true);
  }
  if (leaf_gen) {
    push("leafgen.P", leaf_gen->P, true);
    push("leafgen.Q", leaf_gen->Q, true);
    push("leafgen.B", leaf_gen->B, true);
  }
  if (treelstm_gen) {
    for (std::size_t g = 0; g < treelstm_gen->gates.size(); ++g) {
      TreelstmGateGenerator& gate = treelstm_gen->gates[g];
      const std::string prefix = std::string("gen.") + kGateNames[g] + ".";
      auto pushg = [&out, &prefix](const char* field, Tensor& t) {
        out.push_back(ParamRef{prefix + field, &t, true});
      };
      pushg("P_x", gate.P_x);
      pushg("Q_x", gate.Q_x);
      pushg("P_l", gate.P_l);
      pushg("Q_l", gate.Q_l);
      pushg("P_r", gate.P_r);
      pushg("Q_r", gate.Q_r);
      pushg("B", gate.B);
    }
  }
  if (classifier) {
    push("clf.W_t", classifier->W_t, true);
    push("clf.b_t", classifier->b_t, false);
  }
  if (matcher) {
    push("match.W_h", matcher->W_h, true);
    push("match.b_h", matcher->b_h, false);
    push("match.W_o", matcher->W_o, true);
    push("match.b_o", matcher->b_o, false);
  }
  return out;
}

std::vector<Tensor*> Model::param_tensors() {
  std::vector<Tensor*> out;
  for (const ParamRef& p : named_params()) out.push_back(p.tensor);
  return out;
}

Model make_model(Variant variant, Task task, const Sizes& sizes, Vocab vocab) {
  const int d = sizes.d, e = sizes.e, m = sizes.m, z = sizes.z;
  if (d <= 0 || e <= 0) throw ConfigError("model sizes d and e must be positive");
  if (is_dynamic(variant) && (m <= 0 || z <= 0)) {
    throw ConfigError("dynamic variants require positive m and z");
  }
  const bool lstm_family =
      variant == Variant::kTreelstm || variant == Variant::kDcTreelstm;
  if (lstm_family && e != d) {
    throw ConfigError(
        "the TreeLSTM family requires e == d (leaves feed the embedding "
        "straight into the cell); got d=" +
        std::to_string(d) + ", e=" + std::to_string(e));
  }
  if (task == Task::kClassify && sizes.classes < 2) {
    throw ConfigError("classification requires at least 2 classes");
  }

  Model model;
  model.variant = variant;
  model.task = task;
  model.sizes = sizes;
  model.vocab = std::move(vocab);
  model.embeddings = Tensor(model.vocab.size(), e);

  switch (variant) {
    case Variant::kRecnn:
      model.leaf = LeafProjParams{Tensor(d, e), Tensor(d, 1)};
      model.recnn = StaticRecnnParams{Tensor(d, 2 * d), Tensor(d, 1)};
      break;
    case Variant::kTreelstm:
      model.treelstm = StaticTreelstmParams{Tensor(5 * d, 3 * d), Tensor(5 * d, 1)};
      break;
    case Variant::kDcRecnn:
      model.meta_recnn =
          MetaRecnnParams{Tensor(m, 2 * d + 2 * m), Tensor(m, 1), Tensor(z, m)};
      model.recnn_gen = RecnnGeneratorParams{
          Tensor(d, z), Tensor(d, z), Tensor(z, d),
          Tensor(z, d), Tensor(d, z), Tensor(d, z)};
      model.leaf_gen =
          RecnnLeafGeneratorParams{Tensor(d, z), Tensor(z, e), Tensor(d, z)};
      break;
    case Variant::kDcTreelstm: {
      model.meta_treelstm = MetaTreelstmParams{
          Tensor(5 * m, 3 * d + 2 * m), Tensor(5 * m, 1), Tensor(z, m)};
      TreelstmGeneratorParams gen;
      for (auto& gate : gen.gates) {
        gate = TreelstmGateGenerator{Tensor(d, z), Tensor(d, z), Tensor(d, z),
                                     Tensor(z, d), Tensor(z, d), Tensor(z, d),
                                     Tensor(d, z)};
      }
      model.treelstm_gen = std::move(gen);
      break;
    }
  }

  if (task == Task::kClassify) {
    model.classifier =
        ClassifierParams{Tensor(sizes.classes, d), Tensor(sizes.classes, 1)};
  } else {
    const int p = sizes.merge_hidden > 0 ? sizes.merge_hidden : 2 * d;
    model.sizes.merge_hidden = p;
    model.matcher = MatcherParams{Tensor(p, model.merge_width()), Tensor(p, 1),
                                  Tensor(3, p), Tensor(3, 1)};
  }
  return model;
}

namespace {

struct RecnnGateParams {
  const StaticRecnnParams* params;
};

// One recursive walk per variant; all four share the leaf embedding lookup.
struct TreeEncoder {
  const BinaryTree& tree;
  const Model& model;
  Encoding& out;

  NodeState& state(int id) { return out.states[static_cast<std::size_t>(id)]; }

  Tensor leaf_embedding(int id) {
    return embedding_column(model.embeddings,
                            tree.nodes[static_cast<std::size_t>(id)].token);
  }

  void encode_recnn(int id) {
    const auto& node = tree.nodes[static_cast<std::size_t>(id)];
    if (tree.is_leaf(id)) {
      const Tensor x = leaf_embedding(id);
      state(id).h = tanh(add(matmul(model.leaf->W, x), model.leaf->b));
      return;
    }
    encode_recnn(node.left);
    encode_recnn(node.right);
    state(id).h =
        recnn_compose(state(node.left).h, state(node.right).h, *model.recnn);
  }

  void encode_treelstm(int id) {
    const auto& node = tree.nodes[static_cast<std::size_t>(id)];
    const int d = model.sizes.d;
    const Tensor zero(d, 1);
    if (tree.is_leaf(id)) {
      const Tensor x = leaf_embedding(id);
      const LstmState s =
          treelstm_compose(x, zero, zero, zero, zero, *model.treelstm);
      state(id).h = s.h;
      state(id).c = s.c;
      return;
    }
    encode_treelstm(node.left);
    encode_treelstm(node.right);
    const NodeState& l = state(node.left);
    const NodeState& r = state(node.right);
    const LstmState s =
        treelstm_compose(zero, l.h, r.h, l.c, r.c, *model.treelstm);
    state(id).h = s.h;
    state(id).c = s.c;
  }

  void encode_dc_recnn(int id) {
    const auto& node = tree.nodes[static_cast<std::size_t>(id)];
    const Tensor zero_d(model.sizes.d, 1);
    const Tensor zero_m(model.sizes.m, 1);
    if (tree.is_leaf(id)) {
      const MetaRecnnOut mo =
          meta_recnn_step(zero_d, zero_d, zero_m, zero_m, *model.meta_recnn);
      const auto [W, b] = generate_leaf_params(mo.z, *model.leaf_gen);
      const Tensor x = leaf_embedding(id);
      state(id).h = tanh(add(matmul(W, x), b));
      state(id).h_hat = mo.h_hat;
      state(id).z = mo.z;
      return;
    }
    encode_dc_recnn(node.left);
    encode_dc_recnn(node.right);
    const NodeState& l = state(node.left);
    const NodeState& r = state(node.right);
    const MetaRecnnOut mo =
        meta_recnn_step(l.h, r.h, l.h_hat, r.h_hat, *model.meta_recnn);
    const auto [W, b] = generate_recnn_params(mo.z, *model.recnn_gen);
    state(id).h = recnn_compose(l.h, r.h, StaticRecnnParams{W, b});
    state(id).h_hat = mo.h_hat;
    state(id).z = mo.z;
  }

  void encode_dc_treelstm(int id) {
    const auto& node = tree.nodes[static_cast<std::size_t>(id)];
    const int d = model.sizes.d;
    const Tensor zero_d(d, 1);
    const Tensor zero_m(model.sizes.m, 1);
    if (tree.is_leaf(id)) {
      const Tensor x = leaf_embedding(id);
      const MetaTreelstmOut mo =
          meta_treelstm_step(x, zero_d, zero_d, zero_m, zero_m, zero_m, zero_m,
                             *model.meta_treelstm);
      const auto [W, b] = generate_treelstm_params(mo.z, *model.treelstm_gen);
      const LstmState s = treelstm_compose(x, zero_d, zero_d, zero_d, zero_d,
                                           StaticTreelstmParams{W, b});
      state(id) = NodeState{s.h, s.c, mo.h_hat, mo.c_hat, mo.z};
      return;
    }
    encode_dc_treelstm(node.left);
    encode_dc_treelstm(node.right);
    const NodeState& l = state(node.left);
    const NodeState& r = state(node.right);
    const MetaTreelstmOut mo =
        meta_treelstm_step(zero_d, l.h, r.h, l.h_hat, r.h_hat, l.c_hat,
                           r.c_hat, *model.meta_treelstm);
    const auto [W, b] = generate_treelstm_params(mo.z, *model.treelstm_gen);
    const LstmState s = treelstm_compose(zero_d, l.h, r.h, l.c, r.c,
                                         StaticTreelstmParams{W, b});
    state(id) = NodeState{s.h, s.c, mo.h_hat, mo.c_hat, mo.z};
  }
};

}  // namespace

Encoding encode_tree(const BinaryTree& tree, const Model& model) {
  if (tree.root < 0 || tree.nodes.empty()) {
    throw Error("encode_tree: empty tree");
  }
  Encoding out;
  out.states.resize(tree.nodes.size());
  out.root = tree.root;
  TreeEncoder enc{tree, model, out};
  switch (model.variant) {
    case Variant::kRecnn: enc.encode_recnn(tree.root); break;
    case Variant::kTreelstm: enc.encode_treelstm(tree.root); break;
    case Variant::kDcRecnn: enc.encode_dc_recnn(tree.root); break;
    case Variant::kDcTreelstm: enc.encode_dc_treelstm(tree.root); break;
  }
  return out;
}

namespace {

Tensor merge_features(const Tensor& h_a, const Tensor& h_b, bool extras) {
  Tensor merged = concat_rows(h_a, h_b);
  if (extras) {
    merged = concat_rows(merged, concat_rows(sub(h_a, h_b), mul(h_a, h_b)));
  }
  return merged;
}

}  // namespace

Tensor match_pair_logits(const BinaryTree& tree_a, const BinaryTree& tree_b,
                         const Model& model) {
  if (!model.matcher) {
    throw ConfigError("match_pair requires a model built for the match task");
  }
  const Encoding enc_a = encode_tree(tree_a, model);
  const Encoding enc_b = encode_tree(tree_b, model);
  const Tensor merged = merge_features(enc_a.root_state().h,
                                       enc_b.root_state().h,
                                       model.sizes.merge_extras);
  return matcher_logits(merged, *model.matcher);
}

Tensor match_pair(const BinaryTree& tree_a, const BinaryTree& tree_b,
                  const Model& model) {
  return softmax(match_pair_logits(tree_a, tree_b, model));
}

}  // namespace dctree
