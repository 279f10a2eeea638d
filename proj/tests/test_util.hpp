#pragma once

#include <cmath>
#include <vector>

#include "dctree/gradcheck.hpp"
#include "dctree/model.hpp"
#include "dctree/rng.hpp"
#include "dctree/tensor.hpp"
#include "dctree/toygen.hpp"
#include "oracles.hpp"

namespace testutil {

using dctree::kFdLossScale;

inline void fill_uniform(dctree::Tensor& t, dctree::Rng& rng, double lo = -1.0,
                         double hi = 1.0) {
  for (double& v : t.data()) v = rng.uniform(lo, hi);
}

inline dctree::Tensor random_tensor(int rows, int cols, dctree::Rng& rng,
                                    double lo = -1.0, double hi = 1.0) {
  dctree::Tensor t(rows, cols);
  fill_uniform(t, rng, lo, hi);
  return t;
}

inline oracle::Mat to_mat(const dctree::Tensor& t) {
  oracle::Mat out(static_cast<std::size_t>(t.rows()),
                  oracle::Vec(static_cast<std::size_t>(t.cols())));
  for (int r = 0; r < t.rows(); ++r) {
    for (int c = 0; c < t.cols(); ++c) out[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] = t.at(r, c);
  }
  return out;
}

inline oracle::Vec to_vec(const dctree::Tensor& t) { return t.data(); }

inline double max_abs_diff(const std::vector<double>& a,
                           const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    worst = std::max(worst, std::fabs(a[i] - b[i]));
  }
  return worst;
}

inline double max_abs_diff(const dctree::Tensor& t, const oracle::Mat& m) {
  double worst = 0.0;
  for (int r = 0; r < t.rows(); ++r) {
    for (int c = 0; c < t.cols(); ++c) {
      worst = std::max(worst, std::fabs(t.at(r, c) -
                                        m[static_cast<std::size_t>(r)]
                                         [static_cast<std::size_t>(c)]));
    }
  }
  return worst;
}

// Plain-loop views of a model's parameters for the oracle encoders.
inline oracle::RecnnModel oracle_view_recnn(const dctree::Model& model) {
  return {to_mat(model.leaf->W), to_vec(model.leaf->b), to_mat(model.recnn->W),
          to_vec(model.recnn->b)};
}

inline oracle::TreelstmModel oracle_view_treelstm(const dctree::Model& model) {
  return {to_mat(model.treelstm->W), to_vec(model.treelstm->b)};
}

inline oracle::DcRecnnModel oracle_view_dc_recnn(const dctree::Model& model) {
  const auto& g = *model.recnn_gen;
  const auto& lg = *model.leaf_gen;
  return {to_mat(model.meta_recnn->W_m), to_vec(model.meta_recnn->b_m),
          to_mat(model.meta_recnn->W_z), to_mat(g.P_l),  to_mat(g.Q_l),
          to_mat(g.P_r),                 to_mat(g.Q_r),  to_mat(g.B_l),
          to_mat(g.B_r),                 to_mat(lg.P),   to_mat(lg.Q),
          to_mat(lg.B)};
}

inline oracle::DcTreelstmModel oracle_view_dc_treelstm(
    const dctree::Model& model) {
  oracle::DcTreelstmModel out;
  out.W_m = to_mat(model.meta_treelstm->W_m);
  out.b_m = to_vec(model.meta_treelstm->b_m);
  out.W_z = to_mat(model.meta_treelstm->W_z);
  for (const auto& gate : model.treelstm_gen->gates) {
    out.gates.push_back({to_mat(gate.P_x), to_mat(gate.Q_x), to_mat(gate.P_l),
                         to_mat(gate.Q_l), to_mat(gate.P_r), to_mat(gate.Q_r),
                         to_mat(gate.B)});
  }
  return out;
}

// Uniformly initialized model over the synthetic w0..w{V-1} vocabulary.
inline dctree::Model random_model(dctree::Variant variant, dctree::Task task,
                                  const dctree::Sizes& sizes, int vocab_size,
                                  dctree::Rng& rng, double scale = 0.5) {
  dctree::Model model = dctree::make_model(
      variant, task, sizes, dctree::make_synthetic_vocab(vocab_size));
  for (const dctree::ParamRef& p : model.named_params()) {
    fill_uniform(*p.tensor, rng, -scale, scale);
  }
  return model;
}

}  // namespace testutil
