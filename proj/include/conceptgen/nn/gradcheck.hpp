#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "conceptgen/nn/chain.hpp"

namespace conceptgen::nn {

struct GradCheckResult {
    double max_rel_error = 0.0;
    std::string worst_location;  // "<param block>[index]"
};

// Central finite differences against the supplied analytic gradient.
// `loss_fn` re-evaluates the loss with the current parameter values; the
// params views are perturbed in place and restored. `analytic` is flattened
// in params order. Relative error uses max(|analytic|, |numeric|, floor) as
// the denominator; the floor keeps FD round-off noise on near-zero gradients
// from registering as disagreement.
GradCheckResult gradient_check(const std::vector<ParamView>& params,
                               const std::function<double()>& loss_fn,
                               std::span<const double> analytic, double epsilon = 1e-5,
                               double denom_floor = 1e-3);

}  // namespace conceptgen::nn
