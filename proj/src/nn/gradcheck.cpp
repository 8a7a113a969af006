#include "conceptgen/nn/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "conceptgen/errors.hpp"

namespace conceptgen::nn {

GradCheckResult gradient_check(const std::vector<ParamView>& params,
                               const std::function<double()>& loss_fn,
                               std::span<const double> analytic, double epsilon,
                               double denom_floor) {
    if (epsilon <= 0.0) throw InputError("gradient_check: epsilon must be > 0");
    std::size_t total = 0;
    for (const auto& p : params) total += p.size;
    if (analytic.size() != total) {
        throw InputError("gradient_check: analytic gradient has " +
                         std::to_string(analytic.size()) + " entries, params have " +
                         std::to_string(total));
    }

    GradCheckResult result;
    std::size_t flat = 0;
    for (const auto& p : params) {
        for (std::size_t i = 0; i < p.size; ++i, ++flat) {
            const double saved = p.data[i];
            p.data[i] = saved + epsilon;
            const double loss_plus = loss_fn();
            p.data[i] = saved - epsilon;
            const double loss_minus = loss_fn();
            p.data[i] = saved;
            const double numeric = (loss_plus - loss_minus) / (2.0 * epsilon);
            const double a = analytic[flat];
            const double denom = std::max({std::abs(a), std::abs(numeric), denom_floor});
            const double rel = std::abs(a - numeric) / denom;
            if (rel > result.max_rel_error) {
                result.max_rel_error = rel;
                result.worst_location = p.name + "[" + std::to_string(i) + "]";
            }
        }
    }
    return result;
}

}  // namespace conceptgen::nn
