#include "conceptgen/nn/adam.hpp"

#include <cmath>
#include <string>

#include "conceptgen/errors.hpp"

namespace conceptgen::nn {

void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state) {
    if (params.size() != grads.size()) {
        throw InputError("adam_step: params/grads size mismatch (" +
                         std::to_string(params.size()) + " vs " + std::to_string(grads.size()) +
                         ")");
    }
    if (state.first_moment.size() != params.size()) {
        throw InputError("adam_step: state sized for " +
                         std::to_string(state.first_moment.size()) + " params, got " +
                         std::to_string(params.size()));
    }
    for (std::size_t i = 0; i < grads.size(); ++i) {
        if (!std::isfinite(grads[i])) {
            throw NumericError("non-finite gradient at parameter " + std::to_string(i) +
                               " (step " + std::to_string(state.step + 1) + "), training aborted");
        }
    }
    state.step += 1;
    const double bc1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < params.size(); ++i) {
        double& m = state.first_moment[i];
        double& v = state.second_moment[i];
        m = state.beta1 * m + (1.0 - state.beta1) * grads[i];
        v = state.beta2 * v + (1.0 - state.beta2) * grads[i] * grads[i];
        const double m_hat = m / bc1;
        const double v_hat = v / bc2;
        params[i] -= state.learning_rate * m_hat / (std::sqrt(v_hat) + state.epsilon);
    }
}

}  // namespace conceptgen::nn
