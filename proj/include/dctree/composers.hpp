#pragma once

#include <array>
#include <string>
#include <utility>

#include "dctree/tensor.hpp"

namespace dctree {

enum class Variant {
  kRecnn,
  kTreelstm,
  kDcRecnn,
  kDcTreelstm,
};

bool is_dynamic(Variant v);
std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

// ---------------------------------------------------------------------------
// Parameter blocks.
//
// Sizes: d = composer state, e = embedding width, m = meta state, z = width
// of the controlling vector that the dynamic weights are generated from.
// ---------------------------------------------------------------------------

struct StaticRecnnParams {
  Tensor W;  // d x 2d
  Tensor b;  // d x 1
};

struct StaticTreelstmParams {
  Tensor W;  // 5d x 3d
  Tensor b;  // 5d x 1
};

// Leaf projection for the RecNN family, h = tanh(W x + b).
struct LeafProjParams {
  Tensor W;  // d x e
  Tensor b;  // d x 1
};

struct MetaRecnnParams {
  Tensor W_m;  // m x (2d + 2m)
  Tensor b_m;  // m x 1
  Tensor W_z;  // z x m
};

struct MetaTreelstmParams {
  Tensor W_m;  // 5m x (3d + 2m)
  Tensor b_m;  // 5m x 1
  Tensor W_z;  // z x m
};

struct RecnnGeneratorParams {
  Tensor P_l, P_r;  // d x z
  Tensor Q_l, Q_r;  // z x d
  Tensor B_l, B_r;  // d x z
};

// Generator for the leaf projection of the dynamic RecNN.
struct RecnnLeafGeneratorParams {
  Tensor P;  // d x z
  Tensor Q;  // z x e
  Tensor B;  // d x z
};

// One generated gate: W* = [P_x D(z) Q_x | P_l D(z) Q_l | P_r D(z) Q_r],
// b* = B z.
struct TreelstmGateGenerator {
  Tensor P_x, P_l, P_r;  // d x z
  Tensor Q_x, Q_l, Q_r;  // z x d
  Tensor B;              // d x z
};

// Gate order is fixed as (c, o, i, f_l, f_r), matching the row layout of the
// composed 5d pre-activation.
inline constexpr std::array<const char*, 5> kGateNames = {"c", "o", "i", "fl",
                                                          "fr"};

struct TreelstmGeneratorParams {
  std::array<TreelstmGateGenerator, 5> gates;
};

// Per-node forward state. Which fields are populated depends on the variant:
// h always; c for the TreeLSTM family; h_hat/z for dynamic variants; c_hat
// for the dynamic TreeLSTM.
struct NodeState {
  Tensor h;
  Tensor c;
  Tensor h_hat;
  Tensor c_hat;
  Tensor z;
};

// ---------------------------------------------------------------------------
// Composition steps.
// ---------------------------------------------------------------------------

// h = tanh(W [h_l; h_r] + b)
Tensor recnn_compose(const Tensor& h_l, const Tensor& h_r,
                     const StaticRecnnParams& p);

struct LstmState {
  Tensor h;
  Tensor c;
};

// Gate block [c~; o; i; f_l; f_r] = [tanh;sig;sig;sig;sig](W [x; h_l; h_r] + b);
// c = c~ (*) i + c_l (*) f_l + c_r (*) f_r; h = o (*) tanh(c).
LstmState treelstm_compose(const Tensor& x, const Tensor& h_l,
                           const Tensor& h_r, const Tensor& c_l,
                           const Tensor& c_r, const StaticTreelstmParams& p);

struct MetaRecnnOut {
  Tensor h_hat;  // m x 1
  Tensor z;      // z x 1
};

// h_hat = tanh(W_m [h_l; h_r; h_hat_l; h_hat_r] + b_m); z = W_z h_hat.
MetaRecnnOut meta_recnn_step(const Tensor& h_l, const Tensor& h_r,
                             const Tensor& h_hat_l, const Tensor& h_hat_r,
                             const MetaRecnnParams& p);

struct MetaTreelstmOut {
  Tensor h_hat;  // m x 1
  Tensor c_hat;  // m x 1
  Tensor z;      // z x 1
};

// TreeLSTM cell over the meta state with input [x; h_l; h_r; h_hat_l;
// h_hat_r]; z = W_z h_hat.
MetaTreelstmOut meta_treelstm_step(const Tensor& x, const Tensor& h_l,
                                   const Tensor& h_r, const Tensor& h_hat_l,
                                   const Tensor& h_hat_r, const Tensor& c_hat_l,
                                   const Tensor& c_hat_r,
                                   const MetaTreelstmParams& p);

// W(z) = [P_l D(z) Q_l | P_r D(z) Q_r] (d x 2d); b(z) = B_l z + B_r z.
std::pair<Tensor, Tensor> generate_recnn_params(const Tensor& z,
                                                const RecnnGeneratorParams& g);

// Per-gate blocks stacked in gate order: W(z) is 5d x 3d, b(z) is 5d x 1.
std::pair<Tensor, Tensor> generate_treelstm_params(
    const Tensor& z, const TreelstmGeneratorParams& g);

// W(z) = P D(z) Q (d x e); b(z) = B z.
std::pair<Tensor, Tensor> generate_leaf_params(
    const Tensor& z, const RecnnLeafGeneratorParams& g);

// ---------------------------------------------------------------------------
// Parameter counting.
// ---------------------------------------------------------------------------

struct ParamCountBreakdown {
  long long composition = 0;  // headline count used for model comparison
  long long meta_core = 0;    // W_m and b_m of the meta network
  long long leaf = 0;         // leaf projection (RecNN family)
  long long embedding_per_word = 0;
};

// Headline composition-parameter count: 2d^2 + d for the RecNN, 6dz + mz for
// the dynamic RecNN, 15d^2 + 5d for the TreeLSTM, 35dz + mz for the dynamic
// TreeLSTM.
long long count_params(int d, int e, int m, int z, Variant v);
ParamCountBreakdown count_params_breakdown(int d, int e, int m, int z,
                                           Variant v);

}  // namespace dctree
