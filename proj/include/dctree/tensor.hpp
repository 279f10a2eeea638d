#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace dctree {

class Tape;

// Dense double-precision matrix, row-major. Vectors are n x 1 columns and
// scalars 1 x 1. A tensor may carry a handle into a Tape; any operation whose
// operands are attached to a tape is recorded there so that backward() can
// later replay it in reverse.
class Tensor {
 public:
  Tensor() = default;
  Tensor(int rows, int cols);  // zero-filled
  Tensor(int rows, int cols, std::vector<double> values);

  static Tensor zeros(int rows, int cols);
  static Tensor scalar(double v);
  static Tensor column(std::vector<double> values);  // n x 1

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  int size() const { return rows_ * cols_; }
  bool is_scalar() const { return rows_ == 1 && cols_ == 1; }

  double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
  double operator[](int i) const { return data_[static_cast<std::size_t>(i)]; }
  double& operator[](int i) { return data_[static_cast<std::size_t>(i)]; }

  // Value of a 1x1 tensor; throws ShapeError otherwise.
  double item() const;

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  bool on_tape() const { return tape_ != nullptr; }
  Tape* tape() const { return tape_; }
  int node() const { return node_; }

  std::string shape_str() const;  // e.g. "3x4"

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
  Tape* tape_ = nullptr;
  int node_ = -1;

  friend class Tape;
};

// A named, optimizable parameter tensor. `decay` marks tensors subject to L2
// regularization (weight matrices; biases and embeddings are exempt).
struct ParamRef {
  std::string name;
  Tensor* tensor = nullptr;
  bool decay = true;
};

enum class Op : uint8_t {
  kLeaf,
  kMatmul,
  kAdd,
  kSub,
  kMul,
  kTanh,
  kSigmoid,
  kConcatRows,
  kConcatCols,
  kSliceRows,
  kDiagFromVector,
  kTranspose,
  kSum,
  kSoftmax,
  kNegLogPick,          // cross_entropy(probs, gold)
  kCrossEntropyLogits,  // fused log-softmax + pick
};

// Record of one forward pass. Nodes are stored in creation order, which is a
// topological order by construction; backward() walks it in reverse. A tape
// is single-threaded and good for one forward/backward round.
class Tape {
 public:
  Tape() = default;
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  struct Node {
    Op op;
    int a = -1;
    int b = -1;
    int rows = 0;
    int cols = 0;
    int i0 = 0;  // op immediate (slice begin, gold index)
    int i1 = 0;  // op immediate (slice end)
    std::vector<double> value;
    std::vector<double> grad;
  };

  int size() const { return static_cast<int>(nodes_.size()); }
  const Node& node_at(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  Node& node_at(int id) { return nodes_[static_cast<std::size_t>(id)]; }

  // Records `value` as a leaf and returns a tensor attached to it.
  Tensor leaf(const Tensor& value);

  // Attaches an existing tensor in place as a leaf node.
  void bind(Tensor& t);
  static void unbind(Tensor& t);

  // Internal: used by the tensor operations.
  int record(Op op, int a, int b, int rows, int cols, int i0, int i1,
             const std::vector<double>& value);
  Tensor attach(int id);  // tensor view of an already-recorded node

 private:
  std::vector<Node> nodes_;
};

// Binds a set of parameter tensors to a tape for one recorded evaluation and
// detaches them again on destruction. Parameter values must not be mutated
// between binding and backward().
class TapeScope {
 public:
  TapeScope(Tape& tape, const std::vector<Tensor*>& params);
  TapeScope(const TapeScope&) = delete;
  TapeScope& operator=(const TapeScope&) = delete;
  ~TapeScope();

 private:
  std::vector<Tensor*> params_;
};

// Gradients of a scalar loss with respect to every node of a tape.
class Gradients {
 public:
  const Tensor& of(const Tensor& t) const;  // by the tensor's node handle
  const Tensor& of_node(int id) const;
  bool has(const Tensor& t) const;

 private:
  std::vector<Tensor> grads_;
  friend Gradients backward(Tape& tape, const Tensor& loss);
};

// Reverse pass from a scalar loss recorded on `tape`. Every leaf gets a
// gradient of its own shape (zeros when unreachable from the loss).
Gradients backward(Tape& tape, const Tensor& loss);

// Primitive operations. All record onto the operands' tape when one is
// attached; value-only otherwise.
Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);  // elementwise
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor concat_rows(const Tensor& a, const Tensor& b);
Tensor concat_cols(const Tensor& a, const Tensor& b);
Tensor slice_rows(const Tensor& a, int begin, int end);  // rows [begin, end)
Tensor diag_from_vector(const Tensor& v);                // n x 1 -> n x n
Tensor transpose(const Tensor& a);
Tensor sum(const Tensor& a);  // scalar

// Softmax over a column vector, computed with max subtraction.
Tensor softmax(const Tensor& logits);

// -log(probs[gold]); `probs` is a column of probabilities.
Tensor cross_entropy(const Tensor& probs, int gold);

// logsumexp(logits) - logits[gold]; the numerically stable fused form used by
// the training loop.
Tensor cross_entropy_logits(const Tensor& logits, int gold);

}  // namespace dctree
