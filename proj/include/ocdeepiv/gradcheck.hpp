#pragma once

#include <functional>
#include <string>
#include <vector>

#include "ocdeepiv/matrix.hpp"

namespace ocdeepiv {

struct GradCheckResult {
  std::string name;
  double max_rel_err;
  bool pass;
};

// Central differences with step h on every entry of param; the loss functor
// must re-read param on each call. Returns the max relative error
// |a-n| / max(|a|,|n|,1e-8) against analytic_grad.
double fd_max_rel_error(Matrix& param, const Matrix& analytic_grad,
                        const std::function<double()>& loss, double h = 1e-5);

// Fixed-seed gradient checks over the layer menu and the full treatment
// network (dropout mask frozen). scope: "all" or one of linear, batchnorm,
// layernorm, relu, dropout, mse, ortho, net; "layer:<name>" also accepted.
std::vector<GradCheckResult> run_grad_checks(const std::string& scope,
                                             double tol = 1e-5);

}  // namespace ocdeepiv
