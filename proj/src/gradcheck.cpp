#include "crossner/gradcheck.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "crossner/error.h"
#include "crossner/rng.h"

namespace crossner {

double gradient_relative_error(double analytic, double numeric) {
  const double denom = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / denom;
}

namespace {

void record(GradCheckReport& report, double analytic, double numeric, const std::string& where) {
  const double rel = gradient_relative_error(analytic, numeric);
  report.max_absolute_error = std::max(report.max_absolute_error, std::abs(analytic - numeric));
  if (report.entries_checked == 0 || rel > report.max_relative_error) {
    report.max_relative_error = rel;
    report.worst_entry = where;
  }
  ++report.entries_checked;
}

}  // namespace

GradCheckReport finite_difference_check(const TensorFunction& f, const Tensor<double>& at,
                                        double tol, double step) {
  Parameter<double> x{"x", at, Tensor<double>(at.rows(), at.cols()), true};
  auto evaluate = [&](const Tensor<double>& point) {
    Graph<double> g;
    Var<double> y = f(g, g.constant(point));
    return y.value().item();
  };
  if (evaluate(at) != evaluate(at)) {
    throw ContractError("finite_difference_check: function is not deterministic (dropout active?)");
  }

  Graph<double> g;
  Var<double> y = f(g, g.param(x));
  if (y.rows() != 1 || y.cols() != 1) throw ContractError("finite_difference_check: f must be scalar");
  g.backward(y);

  GradCheckReport report;
  Tensor<double> probe = at;
  for (std::size_t i = 0; i < at.size(); ++i) {
    probe[i] = at[i] + step;
    const double up = evaluate(probe);
    probe[i] = at[i] - step;
    const double down = evaluate(probe);
    probe[i] = at[i];
    record(report, x.grad[i], (up - down) / (2 * step), "x[" + std::to_string(i) + "]");
  }
  report.passed = report.max_relative_error <= tol;
  return report;
}

GradCheckReport check_parameter_gradients(ParameterStore<double>& store, const LossFunction& loss,
                                          double tol, std::size_t max_entries_per_param,
                                          std::uint64_t seed, double step) {
  auto evaluate = [&] {
    Graph<double> g;
    return loss(g).value().item();
  };
  if (evaluate() != evaluate()) {
    throw ContractError("check_parameter_gradients: loss is not deterministic (dropout active?)");
  }

  store.zero_grad();
  {
    Graph<double> g;
    g.backward(loss(g));
  }

  Rng rng(seed);
  GradCheckReport report;
  for (Parameter<double>& p : store) {
    if (!p.trainable) continue;
    std::vector<std::size_t> entries(p.value.size());
    std::iota(entries.begin(), entries.end(), 0);
    if (max_entries_per_param != 0 && entries.size() > max_entries_per_param) {
      rng.shuffle(entries);
      entries.resize(max_entries_per_param);
    }
    for (std::size_t i : entries) {
      const double original = p.value[i];
      p.value[i] = original + step;
      const double up = evaluate();
      p.value[i] = original - step;
      const double down = evaluate();
      p.value[i] = original;
      record(report, p.grad[i], (up - down) / (2 * step), p.name + "[" + std::to_string(i) + "]");
    }
  }
  report.passed = report.max_relative_error <= tol;
  return report;
}

}  // namespace crossner
