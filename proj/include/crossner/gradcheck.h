#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "crossner/graph.h"

namespace crossner {

struct GradCheckReport {
  double max_relative_error = 0.0;
  double max_absolute_error = 0.0;
  std::size_t entries_checked = 0;
  std::string worst_entry;
  bool passed = false;
};

// Relative error with a small floor on the denominator so that entries whose
// true gradient is ~0 are judged on absolute error instead.
double gradient_relative_error(double analytic, double numeric);

using TensorFunction = std::function<Var<double>(Graph<double>&, Var<double>)>;
using LossFunction = std::function<Var<double>(Graph<double>&)>;

// Compares the backward-pass gradient of scalar f at `at` against central
// differences. f must be deterministic; a function that returns different
// values for the same input (e.g. active dropout) is rejected.
GradCheckReport finite_difference_check(const TensorFunction& f, const Tensor<double>& at,
                                        double tol, double step = 1e-5);

// Same check over the trainable parameters of a store. At most
// `max_entries_per_param` entries of each parameter are probed (chosen with
// `seed`); 0 probes every entry.
GradCheckReport check_parameter_gradients(ParameterStore<double>& store, const LossFunction& loss,
                                          double tol, std::size_t max_entries_per_param = 0,
                                          std::uint64_t seed = 0, double step = 1e-5);

}  // namespace crossner
