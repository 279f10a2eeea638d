#include "dctree/composers.hpp"

#include "dctree/error.hpp"

namespace dctree {

bool is_dynamic(Variant v) {
  return v == Variant::kDcRecnn || v == Variant::kDcTreelstm;
}

std::string to_string(Variant v) {
  switch (v) {
    case Variant::kRecnn: return "recnn";
    case Variant::kTreelstm: return "treelstm";
    case Variant::kDcRecnn: return "dc-recnn";
    case Variant::kDcTreelstm: return "dc-treelstm";
  }
  return "?";
}

Variant variant_from_string(const std::string& s) {
  if (s == "recnn") return Variant::kRecnn;
  if (s == "treelstm") return Variant::kTreelstm;
  if (s == "dc-recnn") return Variant::kDcRecnn;
  if (s == "dc-treelstm") return Variant::kDcTreelstm;
  throw ConfigError("unknown variant \"" + s +
                    "\" (expected recnn|treelstm|dc-recnn|dc-treelstm)");
}

Tensor recnn_compose(const Tensor& h_l, const Tensor& h_r,
                     const StaticRecnnParams& p) {
  return tanh(add(matmul(p.W, concat_rows(h_l, h_r)), p.b));
}

namespace {

// Splits a 5d pre-activation into the fixed gate order and applies the cell.
LstmState lstm_cell(const Tensor& pre, const Tensor& c_l, const Tensor& c_r,
                    int d) {
  const Tensor c_tilde = tanh(slice_rows(pre, 0, d));
  const Tensor o = sigmoid(slice_rows(pre, d, 2 * d));
  const Tensor i = sigmoid(slice_rows(pre, 2 * d, 3 * d));
  const Tensor f_l = sigmoid(slice_rows(pre, 3 * d, 4 * d));
  const Tensor f_r = sigmoid(slice_rows(pre, 4 * d, 5 * d));
  const Tensor c = add(add(mul(c_tilde, i), mul(c_l, f_l)), mul(c_r, f_r));
  const Tensor h = mul(o, tanh(c));
  return {h, c};
}

}  // namespace

LstmState treelstm_compose(const Tensor& x, const Tensor& h_l,
                           const Tensor& h_r, const Tensor& c_l,
                           const Tensor& c_r, const StaticTreelstmParams& p) {
  if (p.W.rows() % 5 != 0) {
    throw ShapeError("treelstm_compose: W rows must be 5d, got " +
                     p.W.shape_str());
  }
  const int d = p.W.rows() / 5;
  const Tensor input = concat_rows(concat_rows(x, h_l), h_r);
  const Tensor pre = add(matmul(p.W, input), p.b);
  return lstm_cell(pre, c_l, c_r, d);
}

MetaRecnnOut meta_recnn_step(const Tensor& h_l, const Tensor& h_r,
                             const Tensor& h_hat_l, const Tensor& h_hat_r,
                             const MetaRecnnParams& p) {
  const Tensor joint =
      concat_rows(concat_rows(h_l, h_r), concat_rows(h_hat_l, h_hat_r));
  const Tensor h_hat = tanh(add(matmul(p.W_m, joint), p.b_m));
  const Tensor z = matmul(p.W_z, h_hat);
  return {h_hat, z};
}

MetaTreelstmOut meta_treelstm_step(const Tensor& x, const Tensor& h_l,
                                   const Tensor& h_r, const Tensor& h_hat_l,
                                   const Tensor& h_hat_r, const Tensor& c_hat_l,
                                   const Tensor& c_hat_r,
                                   const MetaTreelstmParams& p) {
  if (p.W_m.rows() % 5 != 0) {
    throw ShapeError("meta_treelstm_step: W_m rows must be 5m, got " +
                     p.W_m.shape_str());
  }
  const int m = p.W_m.rows() / 5;
  const Tensor joint = concat_rows(
      x, concat_rows(concat_rows(h_l, h_r), concat_rows(h_hat_l, h_hat_r)));
  const Tensor pre = add(matmul(p.W_m, joint), p.b_m);
  const LstmState s = lstm_cell(pre, c_hat_l, c_hat_r, m);
  const Tensor z = matmul(p.W_z, s.h);
  return {s.h, s.c, z};
}

std::pair<Tensor, Tensor> generate_recnn_params(const Tensor& z,
                                                const RecnnGeneratorParams& g) {
  const Tensor D = diag_from_vector(z);
  const Tensor W_l = matmul(matmul(g.P_l, D), g.Q_l);
  const Tensor W_r = matmul(matmul(g.P_r, D), g.Q_r);
  const Tensor W = concat_cols(W_l, W_r);
  const Tensor b = add(matmul(g.B_l, z), matmul(g.B_r, z));
  return {W, b};
}

std::pair<Tensor, Tensor> generate_treelstm_params(
    const Tensor& z, const TreelstmGeneratorParams& g) {
  const Tensor D = diag_from_vector(z);
  Tensor W;
  Tensor b;
  for (std::size_t gate = 0; gate < g.gates.size(); ++gate) {
    const TreelstmGateGenerator& gg = g.gates[gate];
    const Tensor W_x = matmul(matmul(gg.P_x, D), gg.Q_x);
    const Tensor W_l = matmul(matmul(gg.P_l, D), gg.Q_l);
    const Tensor W_r = matmul(matmul(gg.P_r, D), gg.Q_r);
    const Tensor W_gate = concat_cols(concat_cols(W_x, W_l), W_r);
    const Tensor b_gate = matmul(gg.B, z);
    W = (gate == 0) ? W_gate : concat_rows(W, W_gate);
    b = (gate == 0) ? b_gate : concat_rows(b, b_gate);
  }
  return {W, b};
}

std::pair<Tensor, Tensor> generate_leaf_params(
    const Tensor& z, const RecnnLeafGeneratorParams& g) {
  const Tensor D = diag_from_vector(z);
  const Tensor W = matmul(matmul(g.P, D), g.Q);
  const Tensor b = matmul(g.B, z);
  return {W, b};
}

long long count_params(int d, int e, int m, int z, Variant v) {
  return count_params_breakdown(d, e, m, z, v).composition;
}

ParamCountBreakdown count_params_breakdown(int d, int e, int m, int z,
                                           Variant v) {
  if (d <= 0 || e <= 0 || m <= 0 || z <= 0) {
    throw ConfigError("count_params: sizes must be positive");
  }
  const long long dl = d, el = e, ml = m, zl = z;
  ParamCountBreakdown out;
  out.embedding_per_word = el;
  switch (v) {
    case Variant::kRecnn:
      out.composition = 2 * dl * dl + dl;
      out.leaf = dl * el + dl;
      break;
    case Variant::kTreelstm:
      out.composition = 15 * dl * dl + 5 * dl;
      break;
    case Variant::kDcRecnn:
      out.composition = 6 * dl * zl + ml * zl;
      out.meta_core = ml * (2 * dl + 2 * ml) + ml;
      out.leaf = 2 * dl * zl + zl * el;
      break;
    case Variant::kDcTreelstm:
      out.composition = 35 * dl * zl + ml * zl;
      out.meta_core = 5 * ml * (3 * dl + 2 * ml) + 5 * ml;
      break;
  }
  return out;
}

}  // namespace dctree
