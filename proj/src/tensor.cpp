#include "dctree/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "dctree/error.hpp"

namespace dctree {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ShapeError(msg);
}

double stable_sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Softmax of a flat vector with max subtraction.
std::vector<double> softmax_values(const std::vector<double>& x) {
  double mx = x[0];
  for (double v : x) mx = std::max(mx, v);
  std::vector<double> out(x.size());
  double denom = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = std::exp(x[i] - mx);
    denom += out[i];
  }
  for (double& v : out) v /= denom;
  return out;
}

double logsumexp(const std::vector<double>& x) {
  double mx = x[0];
  for (double v : x) mx = std::max(mx, v);
  double s = 0.0;
  for (double v : x) s += std::exp(v - mx);
  return mx + std::log(s);
}

// Resolves the tape shared by two operands; throws if they disagree.
Tape* common_tape(const Tensor& a, const Tensor& b) {
  if (a.on_tape() && b.on_tape() && a.tape() != b.tape()) {
    throw Error("operands are recorded on different tapes");
  }
  return a.on_tape() ? a.tape() : b.tape();
}

// Node id of `t` on `tape`; untaped operands are registered as constants.
int input_node(Tape& tape, const Tensor& t) {
  if (t.on_tape()) return t.node();
  return tape.record(Op::kLeaf, -1, -1, t.rows(), t.cols(), 0, 0, t.data());
}

Tensor make_result(Tape* tape, Op op, const Tensor& a, const Tensor& b,
                   int rows, int cols, int i0, int i1,
                   std::vector<double> value) {
  if (tape == nullptr) {
    return Tensor(rows, cols, std::move(value));
  }
  const int na = input_node(*tape, a);
  const int nb = (b.size() > 0 || b.on_tape()) ? input_node(*tape, b) : -1;
  const int id = tape->record(op, na, nb, rows, cols, i0, i1, value);
  return tape->attach(id);
}

}  // namespace

Tensor::Tensor(int rows, int cols)
    : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {}

Tensor::Tensor(int rows, int cols, std::vector<double> values)
    : rows_(rows), cols_(cols), data_(std::move(values)) {
  if (static_cast<std::size_t>(rows_) * cols_ != data_.size()) {
    throw ShapeError("tensor data length " + std::to_string(data_.size()) +
                     " does not match shape " + shape_str());
  }
}

Tensor Tensor::zeros(int rows, int cols) { return Tensor(rows, cols); }

Tensor Tensor::scalar(double v) { return Tensor(1, 1, {v}); }

Tensor Tensor::column(std::vector<double> values) {
  const int n = static_cast<int>(values.size());
  return Tensor(n, 1, std::move(values));
}

double Tensor::item() const {
  if (!is_scalar()) {
    throw ShapeError("item() requires a 1x1 tensor, got " + shape_str());
  }
  return data_[0];
}

std::string Tensor::shape_str() const {
  return std::to_string(rows_) + "x" + std::to_string(cols_);
}

int Tape::record(Op op, int a, int b, int rows, int cols, int i0, int i1,
                 const std::vector<double>& value) {
  Node n;
  n.op = op;
  n.a = a;
  n.b = b;
  n.rows = rows;
  n.cols = cols;
  n.i0 = i0;
  n.i1 = i1;
  n.value = value;
  nodes_.push_back(std::move(n));
  return static_cast<int>(nodes_.size()) - 1;
}

Tensor Tape::leaf(const Tensor& value) {
  Tensor out = value;
  bind(out);
  return out;
}

Tensor Tape::attach(int id) {
  const Node& n = nodes_[static_cast<std::size_t>(id)];
  Tensor t(n.rows, n.cols, n.value);
  t.tape_ = this;
  t.node_ = id;
  return t;
}

void Tape::bind(Tensor& t) {
  t.node_ = record(Op::kLeaf, -1, -1, t.rows(), t.cols(), 0, 0, t.data());
  t.tape_ = this;
}

void Tape::unbind(Tensor& t) {
  t.tape_ = nullptr;
  t.node_ = -1;
}

TapeScope::TapeScope(Tape& tape, const std::vector<Tensor*>& params)
    : params_(params) {
  for (Tensor* p : params_) tape.bind(*p);
}

TapeScope::~TapeScope() {
  for (Tensor* p : params_) Tape::unbind(*p);
}

const Tensor& Gradients::of(const Tensor& t) const {
  if (!t.on_tape()) throw Error("gradient lookup for a tensor that is not on a tape");
  return of_node(t.node());
}

const Tensor& Gradients::of_node(int id) const {
  if (id < 0 || id >= static_cast<int>(grads_.size())) {
    throw Error("gradient lookup for unknown node " + std::to_string(id));
  }
  return grads_[static_cast<std::size_t>(id)];
}

bool Gradients::has(const Tensor& t) const {
  return t.on_tape() && t.node() >= 0 && t.node() < static_cast<int>(grads_.size());
}

namespace {

// Accumulates `src` into `dst` (same length).
void axpy(std::vector<double>& dst, const std::vector<double>& src) {
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += src[i];
}

}  // namespace

Gradients backward(Tape& tape, const Tensor& loss) {
  if (!loss.on_tape() || loss.tape() != &tape) {
    throw Error("backward: loss is not recorded on this tape");
  }
  if (!loss.is_scalar()) {
    throw ShapeError("backward: loss must be scalar, got " + loss.shape_str());
  }

  const int n = tape.size();
  for (int id = 0; id < n; ++id) {
    Tape::Node& nd = tape.node_at(id);
    nd.grad.assign(nd.value.size(), 0.0);
  }
  tape.node_at(loss.node()).grad[0] = 1.0;

  for (int id = loss.node(); id >= 0; --id) {
    const Tape::Node& nd = tape.node_at(id);
    const std::vector<double>& g = nd.grad;
    switch (nd.op) {
      case Op::kLeaf:
        break;
      case Op::kMatmul: {
        Tape::Node& na = tape.node_at(nd.a);
        Tape::Node& nb = tape.node_at(nd.b);
        const int m = na.rows, k = na.cols, c = nb.cols;
        // dA += G * B^T, dB += A^T * G
        for (int i = 0; i < m; ++i) {
          for (int j = 0; j < k; ++j) {
            double s = 0.0;
            for (int t = 0; t < c; ++t) {
              s += g[static_cast<std::size_t>(i) * c + t] *
                   nb.value[static_cast<std::size_t>(j) * c + t];
            }
            na.grad[static_cast<std::size_t>(i) * k + j] += s;
          }
        }
        for (int i = 0; i < k; ++i) {
          for (int j = 0; j < c; ++j) {
            double s = 0.0;
            for (int t = 0; t < m; ++t) {
              s += na.value[static_cast<std::size_t>(t) * k + i] *
                   g[static_cast<std::size_t>(t) * c + j];
            }
            nb.grad[static_cast<std::size_t>(i) * c + j] += s;
          }
        }
        break;
      }
      case Op::kAdd:
        axpy(tape.node_at(nd.a).grad, g);
        axpy(tape.node_at(nd.b).grad, g);
        break;
      case Op::kSub: {
        axpy(tape.node_at(nd.a).grad, g);
        std::vector<double>& gb = tape.node_at(nd.b).grad;
        for (std::size_t i = 0; i < gb.size(); ++i) gb[i] -= g[i];
        break;
      }
      case Op::kMul: {
        Tape::Node& na = tape.node_at(nd.a);
        Tape::Node& nb = tape.node_at(nd.b);
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.grad[i] += g[i] * nb.value[i];
          nb.grad[i] += g[i] * na.value[i];
        }
        break;
      }
      case Op::kTanh: {
        Tape::Node& na = tape.node_at(nd.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.grad[i] += g[i] * (1.0 - nd.value[i] * nd.value[i]);
        }
        break;
      }
      case Op::kSigmoid: {
        Tape::Node& na = tape.node_at(nd.a);
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.grad[i] += g[i] * nd.value[i] * (1.0 - nd.value[i]);
        }
        break;
      }
      case Op::kConcatRows: {
        Tape::Node& na = tape.node_at(nd.a);
        Tape::Node& nb = tape.node_at(nd.b);
        for (std::size_t i = 0; i < na.grad.size(); ++i) na.grad[i] += g[i];
        for (std::size_t i = 0; i < nb.grad.size(); ++i) {
          nb.grad[i] += g[na.grad.size() + i];
        }
        break;
      }
      case Op::kConcatCols: {
        Tape::Node& na = tape.node_at(nd.a);
        Tape::Node& nb = tape.node_at(nd.b);
        const int ca = na.cols, cb = nb.cols;
        for (int r = 0; r < nd.rows; ++r) {
          for (int c = 0; c < ca; ++c) {
            na.grad[static_cast<std::size_t>(r) * ca + c] +=
                g[static_cast<std::size_t>(r) * (ca + cb) + c];
          }
          for (int c = 0; c < cb; ++c) {
            nb.grad[static_cast<std::size_t>(r) * cb + c] +=
                g[static_cast<std::size_t>(r) * (ca + cb) + ca + c];
          }
        }
        break;
      }
      case Op::kSliceRows: {
        Tape::Node& na = tape.node_at(nd.a);
        const std::size_t offset = static_cast<std::size_t>(nd.i0) * na.cols;
        for (std::size_t i = 0; i < g.size(); ++i) na.grad[offset + i] += g[i];
        break;
      }
      case Op::kDiagFromVector: {
        Tape::Node& na = tape.node_at(nd.a);
        for (int i = 0; i < nd.rows; ++i) {
          na.grad[static_cast<std::size_t>(i)] +=
              g[static_cast<std::size_t>(i) * nd.cols + i];
        }
        break;
      }
      case Op::kTranspose: {
        Tape::Node& na = tape.node_at(nd.a);
        for (int r = 0; r < nd.rows; ++r) {
          for (int c = 0; c < nd.cols; ++c) {
            na.grad[static_cast<std::size_t>(c) * na.cols + r] +=
                g[static_cast<std::size_t>(r) * nd.cols + c];
          }
        }
        break;
      }
      case Op::kSum: {
        Tape::Node& na = tape.node_at(nd.a);
        for (double& v : na.grad) v += g[0];
        break;
      }
      case Op::kSoftmax: {
        Tape::Node& na = tape.node_at(nd.a);
        double dot = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) dot += g[i] * nd.value[i];
        for (std::size_t i = 0; i < g.size(); ++i) {
          na.grad[i] += nd.value[i] * (g[i] - dot);
        }
        break;
      }
      case Op::kNegLogPick: {
        Tape::Node& na = tape.node_at(nd.a);
        const std::size_t gold = static_cast<std::size_t>(nd.i0);
        na.grad[gold] += -g[0] / na.value[gold];
        break;
      }
      case Op::kCrossEntropyLogits: {
        Tape::Node& na = tape.node_at(nd.a);
        const std::vector<double> p = softmax_values(na.value);
        for (std::size_t i = 0; i < p.size(); ++i) {
          const double onehot = (static_cast<int>(i) == nd.i0) ? 1.0 : 0.0;
          na.grad[i] += g[0] * (p[i] - onehot);
        }
        break;
      }
    }
  }

  Gradients out;
  out.grads_.reserve(static_cast<std::size_t>(n));
  for (int id = 0; id < n; ++id) {
    Tape::Node& nd = tape.node_at(id);
    out.grads_.emplace_back(nd.rows, nd.cols, std::move(nd.grad));
    nd.grad.clear();
  }
  return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.rows(), "matmul: inner dimensions disagree, " +
                                    a.shape_str() + " vs " + b.shape_str());
  const int m = a.rows(), k = a.cols(), n = b.cols();
  std::vector<double> out(static_cast<std::size_t>(m) * n, 0.0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int t = 0; t < k; ++t) {
        s += a.data()[static_cast<std::size_t>(i) * k + t] *
             b.data()[static_cast<std::size_t>(t) * n + j];
      }
      out[static_cast<std::size_t>(i) * n + j] = s;
    }
  }
  return make_result(common_tape(a, b), Op::kMatmul, a, b, m, n, 0, 0,
                     std::move(out));
}

namespace {

Tensor pointwise2(Op op, const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(),
          "elementwise op: shapes disagree, " + a.shape_str() + " vs " +
              b.shape_str());
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    switch (op) {
      case Op::kAdd: out[i] = a.data()[i] + b.data()[i]; break;
      case Op::kSub: out[i] = a.data()[i] - b.data()[i]; break;
      case Op::kMul: out[i] = a.data()[i] * b.data()[i]; break;
      default: break;
    }
  }
  return make_result(common_tape(a, b), op, a, b, a.rows(), a.cols(), 0, 0,
                     std::move(out));
}

Tensor pointwise1(Op op, const Tensor& a) {
  std::vector<double> out(a.data().size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = (op == Op::kTanh) ? std::tanh(a.data()[i])
                               : stable_sigmoid(a.data()[i]);
  }
  return make_result(a.tape(), op, a, Tensor(), a.rows(), a.cols(), 0, 0,
                     std::move(out));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) { return pointwise2(Op::kAdd, a, b); }
Tensor sub(const Tensor& a, const Tensor& b) { return pointwise2(Op::kSub, a, b); }
Tensor mul(const Tensor& a, const Tensor& b) { return pointwise2(Op::kMul, a, b); }
Tensor tanh(const Tensor& a) { return pointwise1(Op::kTanh, a); }
Tensor sigmoid(const Tensor& a) { return pointwise1(Op::kSigmoid, a); }

Tensor concat_rows(const Tensor& a, const Tensor& b) {
  require(a.cols() == b.cols(), "concat_rows: column counts disagree, " +
                                    a.shape_str() + " vs " + b.shape_str());
  std::vector<double> out;
  out.reserve(a.data().size() + b.data().size());
  out.insert(out.end(), a.data().begin(), a.data().end());
  out.insert(out.end(), b.data().begin(), b.data().end());
  return make_result(common_tape(a, b), Op::kConcatRows, a, b,
                     a.rows() + b.rows(), a.cols(), 0, 0, std::move(out));
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  require(a.rows() == b.rows(), "concat_cols: row counts disagree, " +
                                    a.shape_str() + " vs " + b.shape_str());
  const int rows = a.rows(), ca = a.cols(), cb = b.cols();
  std::vector<double> out(static_cast<std::size_t>(rows) * (ca + cb));
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < ca; ++c) {
      out[static_cast<std::size_t>(r) * (ca + cb) + c] = a.at(r, c);
    }
    for (int c = 0; c < cb; ++c) {
      out[static_cast<std::size_t>(r) * (ca + cb) + ca + c] = b.at(r, c);
    }
  }
  return make_result(common_tape(a, b), Op::kConcatCols, a, b, rows, ca + cb,
                     0, 0, std::move(out));
}

Tensor slice_rows(const Tensor& a, int begin, int end) {
  if (begin < 0 || end > a.rows() || begin >= end) {
    throw ShapeError("slice_rows: range [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") out of bounds for " +
                     a.shape_str());
  }
  std::vector<double> out(a.data().begin() + static_cast<std::ptrdiff_t>(begin) * a.cols(),
                          a.data().begin() + static_cast<std::ptrdiff_t>(end) * a.cols());
  return make_result(a.tape(), Op::kSliceRows, a, Tensor(), end - begin,
                     a.cols(), begin, end, std::move(out));
}

Tensor diag_from_vector(const Tensor& v) {
  require(v.cols() == 1, "diag_from_vector: expected a column vector, got " +
                             v.shape_str());
  const int n = v.rows();
  std::vector<double> out(static_cast<std::size_t>(n) * n, 0.0);
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(i) * n + i] = v.data()[static_cast<std::size_t>(i)];
  }
  return make_result(v.tape(), Op::kDiagFromVector, v, Tensor(), n, n, 0, 0,
                     std::move(out));
}

Tensor transpose(const Tensor& a) {
  std::vector<double> out(a.data().size());
  for (int r = 0; r < a.rows(); ++r) {
    for (int c = 0; c < a.cols(); ++c) {
      out[static_cast<std::size_t>(c) * a.rows() + r] = a.at(r, c);
    }
  }
  return make_result(a.tape(), Op::kTranspose, a, Tensor(), a.cols(), a.rows(),
                     0, 0, std::move(out));
}

Tensor sum(const Tensor& a) {
  double s = 0.0;
  for (double v : a.data()) s += v;
  return make_result(a.tape(), Op::kSum, a, Tensor(), 1, 1, 0, 0, {s});
}

Tensor softmax(const Tensor& logits) {
  require(logits.cols() == 1 && logits.rows() >= 1,
          "softmax: expected a column vector, got " + logits.shape_str());
  return make_result(logits.tape(), Op::kSoftmax, logits, Tensor(),
                     logits.rows(), 1, 0, 0, softmax_values(logits.data()));
}

Tensor cross_entropy(const Tensor& probs, int gold) {
  require(probs.cols() == 1, "cross_entropy: expected a column vector, got " +
                                 probs.shape_str());
  if (gold < 0 || gold >= probs.rows()) {
    throw Error("cross_entropy: gold label " + std::to_string(gold) +
                " out of range for " + std::to_string(probs.rows()) +
                " classes");
  }
  const double loss = -std::log(probs.data()[static_cast<std::size_t>(gold)]);
  return make_result(probs.tape(), Op::kNegLogPick, probs, Tensor(), 1, 1,
                     gold, 0, {loss});
}

Tensor cross_entropy_logits(const Tensor& logits, int gold) {
  require(logits.cols() == 1, "cross_entropy_logits: expected a column vector, got " +
                                  logits.shape_str());
  if (gold < 0 || gold >= logits.rows()) {
    throw Error("cross_entropy_logits: gold label " + std::to_string(gold) +
                " out of range for " + std::to_string(logits.rows()) +
                " classes");
  }
  const double loss =
      logsumexp(logits.data()) - logits.data()[static_cast<std::size_t>(gold)];
  return make_result(logits.tape(), Op::kCrossEntropyLogits, logits, Tensor(),
                     1, 1, gold, 0, {loss});
}

}  // namespace dctree
