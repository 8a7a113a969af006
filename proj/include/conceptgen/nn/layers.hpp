#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "conceptgen/nn/matrix.hpp"
#include "conceptgen/nn/rng.hpp"

namespace conceptgen::nn {

enum class Activation : std::uint8_t { identity = 0, relu = 1, sigmoid = 2 };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

double sigmoid(double x);

// Sigmoid outputs are clamped away from {0,1} before any logarithm.
constexpr double kProbClamp = 1e-7;
double clamp_probability(double p);

// Fully connected layer: output = activation(input * W^T + bias).
struct DenseLayer {
    Matrix weights;             // out x in
    std::vector<double> bias;   // out
    Activation activation = Activation::identity;

    DenseLayer() = default;
    DenseLayer(std::size_t out_dim, std::size_t in_dim, Activation act);

    std::size_t in_dim() const { return weights.cols; }
    std::size_t out_dim() const { return weights.rows; }
    std::size_t param_count() const { return weights.size() + bias.size(); }
};

// Kaiming-uniform, scaled by fan-in; biases start at zero.
void init_kaiming_uniform(DenseLayer& layer, Rng& rng);

struct DenseCache {
    Matrix input;           // batch x in
    Matrix pre_activation;  // batch x out
};

// Returns activation(input * W^T + b); fills `cache` for backprop if given.
Matrix forward_dense(const DenseLayer& layer, const Matrix& input, DenseCache* cache = nullptr);

struct DenseGradients {
    Matrix input;              // batch x in
    Matrix weights;            // out x in
    std::vector<double> bias;  // out
};

// Exact analytic gradients of the forward map. grad_output is d(loss)/d(output).
DenseGradients backward_dense(const DenseLayer& layer, const DenseCache& cache,
                              const Matrix& grad_output);

// Backward of the linear part only: caller supplies d(loss)/d(pre_activation).
// Used where the activation derivative is fused into the loss (sigmoid + BCE,
// softmax + cross-entropy).
DenseGradients backward_dense_linear(const DenseLayer& layer, const DenseCache& cache,
                                     const Matrix& grad_pre);

// i.i.d. N(0,1) draws through the deterministic Rng.
std::vector<double> sample_standard_normal(Rng& rng, std::size_t n);

}  // namespace conceptgen::nn
