#pragma once

#include <string>

#include "dctree/tensor.hpp"

namespace dctree {

enum class Task {
  kClassify,
  kMatch,
};

std::string to_string(Task t);
Task task_from_string(const std::string& s);

struct ClassifierParams {
  Tensor W_t;  // C x d
  Tensor b_t;  // C x 1
};

// Merge MLP for sentence-pair matching: one tanh hidden layer over the
// concatenated root states, then a 3-way softmax readout.
struct MatcherParams {
  Tensor W_h;  // p x merge-width
  Tensor b_h;  // p x 1
  Tensor W_o;  // 3 x p
  Tensor b_o;  // 3 x 1
};

// softmax(W_t h + b_t), computed with max subtraction.
Tensor classify(const Tensor& root_h, const ClassifierParams& p);

// Logits before the softmax; the training loss fuses these with the softmax.
Tensor classify_logits(const Tensor& root_h, const ClassifierParams& p);

// MLP over an already-merged feature vector.
Tensor matcher_logits(const Tensor& merged, const MatcherParams& p);

}  // namespace dctree
