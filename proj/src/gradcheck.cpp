#include "dctree/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "dctree/error.hpp"

namespace dctree {

std::vector<std::vector<double>> analytic_gradients(
    const Objective& f, const std::vector<ParamRef>& params) {
  Tape tape;
  std::vector<Tensor*> tensors;
  tensors.reserve(params.size());
  for (const ParamRef& p : params) tensors.push_back(p.tensor);
  TapeScope scope(tape, tensors);
  const Tensor loss = f();
  const Gradients grads = backward(tape, loss);
  std::vector<std::vector<double>> out;
  out.reserve(params.size());
  for (const ParamRef& p : params) out.push_back(grads.of(*p.tensor).data());
  return out;
}

std::vector<std::vector<double>> numeric_gradients(
    const Objective& f, const std::vector<ParamRef>& params, double eps) {
  if (eps <= 0.0) throw OracleError("numeric_gradients: eps must be positive");
  std::vector<std::vector<double>> out;
  out.reserve(params.size());
  for (const ParamRef& p : params) {
    std::vector<double> g(p.tensor->data().size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      double& entry = p.tensor->data()[i];
      const double saved = entry;
      entry = saved + eps;
      const double up = f().item();
      entry = saved - eps;
      const double down = f().item();
      entry = saved;
      g[i] = (up - down) / (2.0 * eps);
    }
    out.push_back(std::move(g));
  }
  return out;
}

double max_rel_error(const std::vector<double>& analytic,
                     const std::vector<double>& numeric) {
  double worst = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    const double denom =
        std::max({std::fabs(analytic[i]), std::fabs(numeric[i]), 1e-8});
    worst = std::max(worst, std::fabs(analytic[i] - numeric[i]) / denom);
  }
  return worst;
}

GradCheckReport finite_diff_check(const Objective& f,
                                  const std::vector<ParamRef>& params,
                                  double eps) {
  const double v1 = f().item();
  const double v2 = f().item();
  if (std::memcmp(&v1, &v2, sizeof(double)) != 0) {
    throw OracleError(
        "finite_diff_check: objective is not deterministic (two evaluations "
        "disagree)");
  }

  const auto analytic = analytic_gradients(f, params);
  const auto numeric = numeric_gradients(f, params, eps);

  GradCheckReport report;
  for (std::size_t i = 0; i < params.size(); ++i) {
    GradCheckGroup group;
    group.name = params[i].name;
    group.max_rel_error = max_rel_error(analytic[i], numeric[i]);
    report.max_rel_error = std::max(report.max_rel_error, group.max_rel_error);
    report.groups.push_back(std::move(group));
  }
  return report;
}

}  // namespace dctree
