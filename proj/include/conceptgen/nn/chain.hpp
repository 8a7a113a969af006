#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conceptgen/nn/layers.hpp"

namespace conceptgen::nn {

// Flat view into one named parameter block (a weight matrix or a bias).
struct ParamView {
    std::string name;
    double* data = nullptr;
    std::size_t size = 0;
};

std::vector<ParamView> layer_params(DenseLayer& layer, const std::string& prefix);

// Sequential stack of named dense layers. Named layers are what TCAV probes.
struct LayerChain {
    struct Entry {
        std::string name;
        DenseLayer layer;
    };
    std::vector<Entry> layers;

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::size_t param_count() const;
    // Index of a named layer; throws InputError listing available names.
    std::size_t layer_index(const std::string& name) const;
    std::vector<ParamView> params();
};

struct ChainCaches {
    std::vector<DenseCache> per_layer;
    Matrix output;
};

Matrix chain_forward(const LayerChain& chain, const Matrix& input, ChainCaches* caches = nullptr);

// Forward pass truncated after the named layer (inclusive).
Matrix chain_forward_until(const LayerChain& chain, const Matrix& input,
                           const std::string& layer_name);

struct ChainGradients {
    std::vector<DenseGradients> per_layer;
    Matrix input;  // gradient w.r.t. the chain input
};

// Backprop from d(loss)/d(output) through the whole chain.
ChainGradients chain_backward(const LayerChain& chain, const ChainCaches& caches,
                              const Matrix& grad_output);

// Backprop from the output down to (and excluding) the named layer: returns
// the gradient w.r.t. that layer's post-activation output.
Matrix chain_backward_to_layer(const LayerChain& chain, const ChainCaches& caches,
                               const Matrix& grad_output, const std::string& layer_name);

// ---------------------------------------------------------------------------
// Checkpoint file: versioned binary container with named layer shapes, flat
// parameter arrays and the originating seed. Round-trips bit-exactly.
// ---------------------------------------------------------------------------

struct Checkpoint {
    std::uint64_t seed = 0;
    std::vector<LayerChain::Entry> layers;
};

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& ckpt);
Checkpoint deserialize_checkpoint(const std::vector<unsigned char>& bytes);

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::string& path);

// 16-hex-digit fingerprint of the serialized parameter bytes.
std::string checkpoint_hash(const Checkpoint& ckpt);

}  // namespace conceptgen::nn
