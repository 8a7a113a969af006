#include "conceptgen/nn/layers.hpp"

#include <algorithm>
#include <cmath>

#include "conceptgen/errors.hpp"

namespace conceptgen::nn {

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::identity: return "identity";
        case Activation::relu: return "relu";
        case Activation::sigmoid: return "sigmoid";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "identity") return Activation::identity;
    if (name == "relu") return Activation::relu;
    if (name == "sigmoid") return Activation::sigmoid;
    throw InputError("unknown activation: " + name);
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

double clamp_probability(double p) {
    return std::clamp(p, kProbClamp, 1.0 - kProbClamp);
}

DenseLayer::DenseLayer(std::size_t out_dim, std::size_t in_dim, Activation act)
    : weights(out_dim, in_dim, 0.0), bias(out_dim, 0.0), activation(act) {}

void init_kaiming_uniform(DenseLayer& layer, Rng& rng) {
    const double fan_in = static_cast<double>(std::max<std::size_t>(layer.in_dim(), 1));
    const double bound = std::sqrt(6.0 / fan_in);
    for (double& w : layer.weights.values) w = rng.next_uniform(-bound, bound);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
}

namespace {

void apply_activation(Activation act, const Matrix& pre, Matrix& out) {
    out = pre;
    switch (act) {
        case Activation::identity:
            break;
        case Activation::relu:
            for (double& v : out.values) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::sigmoid:
            for (double& v : out.values) v = sigmoid(v);
            break;
    }
}

// d(activation)/d(pre), applied in place to grad.
void apply_activation_grad(Activation act, const Matrix& pre, Matrix& grad) {
    switch (act) {
        case Activation::identity:
            break;
        case Activation::relu:
            for (std::size_t i = 0; i < grad.values.size(); ++i) {
                if (pre.values[i] <= 0.0) grad.values[i] = 0.0;
            }
            break;
        case Activation::sigmoid:
            for (std::size_t i = 0; i < grad.values.size(); ++i) {
                const double s = sigmoid(pre.values[i]);
                grad.values[i] *= s * (1.0 - s);
            }
            break;
    }
}

}  // namespace

Matrix forward_dense(const DenseLayer& layer, const Matrix& input, DenseCache* cache) {
    if (input.cols != layer.in_dim()) {
        throw InputError("dense forward shape mismatch: input " + input.shape() +
                         " vs weights " + layer.weights.shape() + " (expected input cols " +
                         std::to_string(layer.in_dim()) + ")");
    }
    Matrix pre = multiply_nt(input, layer.weights);
    for (std::size_t r = 0; r < pre.rows; ++r) {
        double* row = pre.values.data() + r * pre.cols;
        for (std::size_t c = 0; c < pre.cols; ++c) row[c] += layer.bias[c];
    }
    Matrix out;
    apply_activation(layer.activation, pre, out);
    if (cache != nullptr) {
        cache->input = input;
        cache->pre_activation = std::move(pre);
    }
    return out;
}

DenseGradients backward_dense(const DenseLayer& layer, const DenseCache& cache,
                              const Matrix& grad_output) {
    require_shape(grad_output, cache.pre_activation.rows, cache.pre_activation.cols,
                  "dense backward grad_output");
    Matrix grad_pre = grad_output;
    apply_activation_grad(layer.activation, cache.pre_activation, grad_pre);
    return backward_dense_linear(layer, cache, grad_pre);
}

DenseGradients backward_dense_linear(const DenseLayer& layer, const DenseCache& cache,
                                     const Matrix& grad_pre) {
    require_shape(grad_pre, cache.input.rows, layer.out_dim(), "dense backward grad_pre");
    DenseGradients grads;
    grads.weights = multiply_tn(grad_pre, cache.input);  // out x in
    grads.bias = column_sums(grad_pre);
    grads.input = multiply(grad_pre, layer.weights);  // batch x in
    return grads;
}

std::vector<double> sample_standard_normal(Rng& rng, std::size_t n) {
    if (n < 1) throw InputError("sample_standard_normal requires n >= 1");
    return rng.normal_vector(n);
}

}  // namespace conceptgen::nn
