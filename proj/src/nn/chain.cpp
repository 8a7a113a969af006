#include "conceptgen/nn/chain.hpp"

#include <cstring>
#include <fstream>

#include "conceptgen/errors.hpp"
#include "conceptgen/hash.hpp"

namespace conceptgen::nn {

std::vector<ParamView> layer_params(DenseLayer& layer, const std::string& prefix) {
    return {
        {prefix + ".weights", layer.weights.values.data(), layer.weights.values.size()},
        {prefix + ".bias", layer.bias.data(), layer.bias.size()},
    };
}

std::size_t LayerChain::input_dim() const {
    return layers.empty() ? 0 : layers.front().layer.in_dim();
}

std::size_t LayerChain::output_dim() const {
    return layers.empty() ? 0 : layers.back().layer.out_dim();
}

std::size_t LayerChain::param_count() const {
    std::size_t n = 0;
    for (const auto& e : layers) n += e.layer.param_count();
    return n;
}

std::size_t LayerChain::layer_index(const std::string& name) const {
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].name == name) return i;
    }
    std::string available;
    for (const auto& e : layers) {
        if (!available.empty()) available += ", ";
        available += e.name;
    }
    throw InputError("unknown layer '" + name + "' (available: " + available + ")");
}

std::vector<ParamView> LayerChain::params() {
    std::vector<ParamView> out;
    for (auto& e : layers) {
        for (auto& p : layer_params(e.layer, e.name)) out.push_back(p);
    }
    return out;
}

Matrix chain_forward(const LayerChain& chain, const Matrix& input, ChainCaches* caches) {
    Matrix current = input;
    if (caches != nullptr) {
        caches->per_layer.assign(chain.layers.size(), DenseCache{});
    }
    for (std::size_t i = 0; i < chain.layers.size(); ++i) {
        DenseCache* cache = caches != nullptr ? &caches->per_layer[i] : nullptr;
        current = forward_dense(chain.layers[i].layer, current, cache);
    }
    if (caches != nullptr) caches->output = current;
    return current;
}

Matrix chain_forward_until(const LayerChain& chain, const Matrix& input,
                           const std::string& layer_name) {
    const std::size_t until = chain.layer_index(layer_name);
    Matrix current = input;
    for (std::size_t i = 0; i <= until; ++i) {
        current = forward_dense(chain.layers[i].layer, current);
    }
    return current;
}

ChainGradients chain_backward(const LayerChain& chain, const ChainCaches& caches,
                              const Matrix& grad_output) {
    if (caches.per_layer.size() != chain.layers.size()) {
        throw InputError("chain_backward: cache/layer count mismatch");
    }
    ChainGradients grads;
    grads.per_layer.resize(chain.layers.size());
    Matrix upstream = grad_output;
    for (std::size_t i = chain.layers.size(); i-- > 0;) {
        grads.per_layer[i] = backward_dense(chain.layers[i].layer, caches.per_layer[i], upstream);
        upstream = grads.per_layer[i].input;
    }
    grads.input = std::move(upstream);
    return grads;
}

Matrix chain_backward_to_layer(const LayerChain& chain, const ChainCaches& caches,
                               const Matrix& grad_output, const std::string& layer_name) {
    const std::size_t target = chain.layer_index(layer_name);
    Matrix upstream = grad_output;
    for (std::size_t i = chain.layers.size(); i-- > target + 1;) {
        DenseGradients g =
            backward_dense(chain.layers[i].layer, caches.per_layer[i], upstream);
        upstream = std::move(g.input);
    }
    return upstream;
}

// ---------------------------------------------------------------------------
// checkpoint serialization
// ---------------------------------------------------------------------------

namespace {

constexpr char kMagic[8] = {'C', 'G', 'N', 'N', 'C', 'K', 'P', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xFF));
}

void put_doubles(std::vector<unsigned char>& out, const std::vector<double>& v) {
    const std::size_t offset = out.size();
    out.resize(offset + v.size() * sizeof(double));
    std::memcpy(out.data() + offset, v.data(), v.size() * sizeof(double));
}

class Reader {
public:
    explicit Reader(const std::vector<unsigned char>& bytes) : bytes_(bytes) {}

    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }

    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
        return v;
    }

    std::string str(std::size_t n) {
        need(n);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
        pos_ += n;
        return s;
    }

    void doubles(std::vector<double>& out, std::size_t n) {
        need(n * sizeof(double));
        out.resize(n);
        std::memcpy(out.data(), bytes_.data() + pos_, n * sizeof(double));
        pos_ += n * sizeof(double);
    }

    bool done() const { return pos_ == bytes_.size(); }

private:
    void need(std::size_t n) {
        if (pos_ + n > bytes_.size()) throw InputError("truncated checkpoint data");
    }

    const std::vector<unsigned char>& bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

std::vector<unsigned char> serialize_checkpoint(const Checkpoint& ckpt) {
    std::vector<unsigned char> out;
    out.insert(out.end(), kMagic, kMagic + sizeof(kMagic));
    put_u32(out, 1);  // format version
    put_u64(out, ckpt.seed);
    put_u32(out, static_cast<std::uint32_t>(ckpt.layers.size()));
    for (const auto& e : ckpt.layers) {
        put_u32(out, static_cast<std::uint32_t>(e.name.size()));
        out.insert(out.end(), e.name.begin(), e.name.end());
        put_u32(out, static_cast<std::uint32_t>(e.layer.out_dim()));
        put_u32(out, static_cast<std::uint32_t>(e.layer.in_dim()));
        out.push_back(static_cast<unsigned char>(e.layer.activation));
        put_doubles(out, e.layer.weights.values);
        put_doubles(out, e.layer.bias);
    }
    return out;
}

Checkpoint deserialize_checkpoint(const std::vector<unsigned char>& bytes) {
    if (bytes.size() < sizeof(kMagic) || std::memcmp(bytes.data(), kMagic, sizeof(kMagic)) != 0) {
        throw InputError("not a checkpoint file (bad magic)");
    }
    Reader r(bytes);
    r.str(sizeof(kMagic));
    const std::uint32_t version = r.u32();
    if (version != 1) {
        throw InputError("unsupported checkpoint version " + std::to_string(version));
    }
    Checkpoint ckpt;
    ckpt.seed = r.u64();
    const std::uint32_t n_layers = r.u32();
    ckpt.layers.reserve(n_layers);
    for (std::uint32_t i = 0; i < n_layers; ++i) {
        LayerChain::Entry e;
        const std::uint32_t name_len = r.u32();
        e.name = r.str(name_len);
        const std::uint32_t out_dim = r.u32();
        const std::uint32_t in_dim = r.u32();
        const std::string act = r.str(1);
        e.layer = DenseLayer(out_dim, in_dim, static_cast<Activation>(act[0]));
        r.doubles(e.layer.weights.values, static_cast<std::size_t>(out_dim) * in_dim);
        r.doubles(e.layer.bias, out_dim);
        if (!all_finite(e.layer.weights) || !all_finite(e.layer.bias)) {
            throw NumericError("checkpoint layer '" + e.name + "' has non-finite parameters");
        }
        ckpt.layers.push_back(std::move(e));
    }
    if (!r.done()) throw InputError("trailing bytes in checkpoint file");
    return ckpt;
}

void save_checkpoint(const std::string& path, const Checkpoint& ckpt) {
    const auto bytes = serialize_checkpoint(ckpt);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("cannot open checkpoint for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out.good()) throw InputError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open checkpoint: " + path);
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return deserialize_checkpoint(bytes);
}

std::string checkpoint_hash(const Checkpoint& ckpt) {
    const auto bytes = serialize_checkpoint(ckpt);
    return hash_hex(fnv1a64(bytes.data(), bytes.size()));
}

}  // namespace conceptgen::nn
