#pragma once

#include <functional>
#include <string>
#include <vector>

#include "dctree/tensor.hpp"

namespace dctree {

// Scalar objective evaluated from the current values of a parameter set.
// When the parameters are bound to a tape the returned tensor is on-tape.
using Objective = std::function<Tensor()>;

// Central differences at eps quantize in steps of ulp(|f|)/(2 eps), which for
// an O(1) loss sits above the checker's 1e-8 relative-error floor. Scaling a
// bounded objective by this exact power of two as its final op pushes the
// whole accumulated roundoff below the floor; the chain rule under test is
// unchanged. Apply as mul(loss, Tensor::scalar(kFdLossScale)).
inline constexpr double kFdLossScale = 1.0 / 64.0;

struct GradCheckGroup {
  std::string name;
  double max_rel_error = 0.0;
};

struct GradCheckReport {
  double max_rel_error = 0.0;
  std::vector<GradCheckGroup> groups;  // one per parameter

  bool ok(double tol) const { return max_rel_error < tol; }
};

// Analytic gradients of f with respect to each parameter, via one recorded
// forward pass and a tape backward. One flat gradient per parameter, in
// parameter order.
std::vector<std::vector<double>> analytic_gradients(
    const Objective& f, const std::vector<ParamRef>& params);

// Central-difference gradients, (f(t+eps) - f(t-eps)) / (2 eps) per entry.
std::vector<std::vector<double>> numeric_gradients(
    const Objective& f, const std::vector<ParamRef>& params, double eps);

// max over entries of |a - n| / max(|a|, |n|, 1e-8).
double max_rel_error(const std::vector<double>& analytic,
                     const std::vector<double>& numeric);

// Compares analytic and central-difference gradients of f over `params`.
// f must be deterministic; this is verified by evaluating it twice and
// throwing OracleError on a bitwise mismatch.
GradCheckReport finite_diff_check(const Objective& f,
                                  const std::vector<ParamRef>& params,
                                  double eps = 1e-5);

}  // namespace dctree
