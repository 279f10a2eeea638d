#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dctree/rng.hpp"
#include "dctree/tensor.hpp"

namespace dctree {

// Raw parse of one s-expression: `(LABEL child child)` or `(LABEL token)`.
struct LabeledTree {
  std::string label;
  std::string token;  // leaves only
  std::vector<LabeledTree> children;

  bool is_leaf() const { return children.empty(); }
};

LabeledTree parse_sexpr(std::string_view text);
std::string to_sexpr(const LabeledTree& tree);

// Binarized constituency tree over one sentence. Nodes are stored in
// post-order (children always precede their parent; the root is last).
struct BinaryTree {
  struct Node {
    int parent = -1;
    int left = -1;
    int right = -1;
    int token = -1;  // vocab id at leaves, set by index_tokens
    std::optional<int> label;
    int span_begin = 0;  // token offsets [begin, end)
    int span_end = 0;
  };

  std::vector<Node> nodes;
  std::vector<std::string> tokens;  // the sentence, leaf order
  int root = -1;

  bool is_leaf(int i) const { return nodes[static_cast<std::size_t>(i)].left < 0; }
  int node_count() const { return static_cast<int>(nodes.size()); }
  int leaf_count() const { return static_cast<int>(tokens.size()); }
  std::string phrase(int i) const;  // tokens under node i, space-joined
};

// Left-branching binarization with unary-chain collapse. N-ary nodes fold
// into unlabeled intermediates; a unary parent passes its label down, the
// outermost label winning over the whole chain.
BinaryTree binarize(const LabeledTree& tree);

class Vocab {
 public:
  static constexpr int kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocab();

  int add(const std::string& token);          // appends if absent
  int lookup(const std::string& token) const;  // kUnk if absent
  int size() const { return static_cast<int>(tokens_.size()); }
  const std::string& token(int id) const { return tokens_[static_cast<std::size_t>(id)]; }
  const std::vector<std::string>& tokens() const { return tokens_; }

 private:
  std::unordered_map<std::string, int> index_;
  std::vector<std::string> tokens_;
};

// Tokens with frequency >= min_count, indexed from 1 in first-appearance
// order. Index 0 is the unknown-word slot.
Vocab build_vocab(const std::vector<std::vector<std::string>>& corpus,
                  int min_count);

// |V| x e embedding matrix. Rows for tokens present in the file are copied;
// rows for missing tokens and for the unknown-word slot are sampled uniformly
// from [-0.1, 0.1]. File lines are `token v1 ... ve`.
Tensor load_embeddings(const std::string& path, const Vocab& vocab, int e,
                       Rng& rng);
Tensor random_embeddings(const Vocab& vocab, int e, Rng& rng);

struct Sample {
  BinaryTree tree;
  int label = 0;
};

struct PairSample {
  BinaryTree tree_a;
  BinaryTree tree_b;
  int label = 0;
};

// Pair labels use a fixed mapping.
inline constexpr int kEntailment = 0;
inline constexpr int kContradiction = 1;
inline constexpr int kNeutral = 2;
int pair_label_from_string(const std::string& s);  // DataError when unknown

// One s-expression per line; the root label is the class id. A negative
// `classes` disables label-range validation.
std::vector<Sample> load_tree_dataset(std::istream& in, int classes);
std::vector<Sample> load_tree_dataset(const std::string& path, int classes);

// Tab-separated `sexpr_a<TAB>sexpr_b<TAB>label` lines.
std::vector<PairSample> load_pair_dataset(std::istream& in);
std::vector<PairSample> load_pair_dataset(const std::string& path);

// Fills leaf token ids from the vocabulary.
void index_tokens(BinaryTree& tree, const Vocab& vocab);

}  // namespace dctree
