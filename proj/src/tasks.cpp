#include "dctree/tasks.hpp"

#include "dctree/error.hpp"

namespace dctree {

std::string to_string(Task t) {
  return t == Task::kClassify ? "classify" : "match";
}

Task task_from_string(const std::string& s) {
  if (s == "classify") return Task::kClassify;
  if (s == "match") return Task::kMatch;
  throw ConfigError("unknown task \"" + s + "\" (expected classify|match)");
}

Tensor classify_logits(const Tensor& root_h, const ClassifierParams& p) {
  return add(matmul(p.W_t, root_h), p.b_t);
}

Tensor classify(const Tensor& root_h, const ClassifierParams& p) {
  return softmax(classify_logits(root_h, p));
}

Tensor matcher_logits(const Tensor& merged, const MatcherParams& p) {
  const Tensor hidden = tanh(add(matmul(p.W_h, merged), p.b_h));
  return add(matmul(p.W_o, hidden), p.b_o);
}

}  // namespace dctree
