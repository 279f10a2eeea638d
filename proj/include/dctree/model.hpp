#pragma once

#include <optional>
#include <vector>

#include "dctree/composers.hpp"
#include "dctree/tasks.hpp"
#include "dctree/treebank.hpp"

namespace dctree {

struct Sizes {
  int d = 0;
  int e = 0;
  int m = 0;
  int z = 0;
  int classes = 0;
  int merge_hidden = 0;       // 0 means the default 2d
  bool merge_extras = false;  // add difference and product merge features
};

// One model instance: variant, sizes, vocabulary, embeddings, and the
// parameter blocks that variant and task require. All tensors are plain
// values; a training step temporarily binds them to a tape.
struct Model {
  Variant variant = Variant::kRecnn;
  Task task = Task::kClassify;
  Sizes sizes;
  Vocab vocab;
  Tensor embeddings;  // |V| x e

  std::optional<LeafProjParams> leaf;
  std::optional<StaticRecnnParams> recnn;
  std::optional<StaticTreelstmParams> treelstm;
  std::optional<MetaRecnnParams> meta_recnn;
  std::optional<RecnnGeneratorParams> recnn_gen;
  std::optional<RecnnLeafGeneratorParams> leaf_gen;
  std::optional<MetaTreelstmParams> meta_treelstm;
  std::optional<TreelstmGeneratorParams> treelstm_gen;
  std::optional<ClassifierParams> classifier;
  std::optional<MatcherParams> matcher;

  int merge_width() const;

  // Canonically named parameter list in a fixed order (embeddings first).
  std::vector<ParamRef> named_params();
  std::vector<Tensor*> param_tensors();
};

// Allocates all parameter blocks for the variant/task with zero values.
// Throws ConfigError on inconsistent sizes (the TreeLSTM family requires
// e == d because leaves feed the embedding straight into the cell).
Model make_model(Variant variant, Task task, const Sizes& sizes, Vocab vocab);

struct Encoding {
  std::vector<NodeState> states;  // aligned with tree.nodes
  int root = -1;

  const NodeState& root_state() const {
    return states[static_cast<std::size_t>(root)];
  }
};

// Bottom-up pass over a binarized, token-indexed tree. Dynamic variants run
// the meta step on the child states first, generate that node's composer
// weights from the controlling vector, then apply the composer.
Encoding encode_tree(const BinaryTree& tree, const Model& model);

// Probability distribution over the 3 matching classes for a sentence pair.
// Both trees are encoded by the same model, so one meta network drives the
// generated parameters of both sentences.
Tensor match_pair(const BinaryTree& tree_a, const BinaryTree& tree_b,
                  const Model& model);

// Logits variant used by the fused training loss.
Tensor match_pair_logits(const BinaryTree& tree_a, const BinaryTree& tree_b,
                         const Model& model);

}  // namespace dctree
