#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace conceptgen::nn {

// Adam with bias correction. beta defaults are the standard values; the
// learning rate is the caller's to set.
struct AdamState {
    std::vector<double> first_moment;
    std::vector<double> second_moment;
    std::uint64_t step = 0;
    double learning_rate = 3e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t param_count, double lr = 3e-4)
        : first_moment(param_count, 0.0), second_moment(param_count, 0.0), learning_rate(lr) {}
};

// One update over a flat parameter view. Throws NumericError on non-finite
// gradients (training aborted with a diagnostic naming the offending index).
void adam_step(std::span<double> params, std::span<const double> grads, AdamState& state);

}  // namespace conceptgen::nn
