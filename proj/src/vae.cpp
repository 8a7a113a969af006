#include "conceptgen/vae.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <unordered_map>

#include "conceptgen/errors.hpp"
#include "conceptgen/metrics.hpp"
#include "conceptgen/text.hpp"

namespace conceptgen {

using nn::DenseCache;
using nn::DenseGradients;
using nn::Matrix;

std::vector<nn::ParamView> VaeModel::params() {
    std::vector<nn::ParamView> out;
    auto append = [&out](nn::DenseLayer& layer, const char* name) {
        for (auto& view : nn::layer_params(layer, name)) out.push_back(view);
    };
    append(enc_hidden, "enc_hidden");
    append(enc_mu, "enc_mu");
    append(enc_logvar, "enc_logvar");
    append(dec_hidden, "dec_hidden");
    append(dec_out, "dec_out");
    return out;
}

nn::Checkpoint VaeModel::to_checkpoint(std::uint64_t seed) const {
    nn::Checkpoint ckpt;
    ckpt.seed = seed;
    ckpt.layers = {
        {"enc_hidden", enc_hidden}, {"enc_mu", enc_mu},  {"enc_logvar", enc_logvar},
        {"dec_hidden", dec_hidden}, {"dec_out", dec_out},
    };
    return ckpt;
}

VaeModel VaeModel::from_checkpoint(const nn::Checkpoint& ckpt) {
    auto find = [&ckpt](const std::string& name) -> const nn::DenseLayer& {
        for (const auto& e : ckpt.layers) {
            if (e.name == name) return e.layer;
        }
        throw InputError("checkpoint is not a VAE model: missing layer '" + name + "'");
    };
    VaeModel model;
    model.enc_hidden = find("enc_hidden");
    model.enc_mu = find("enc_mu");
    model.enc_logvar = find("enc_logvar");
    model.dec_hidden = find("dec_hidden");
    model.dec_out = find("dec_out");
    if (model.enc_mu.out_dim() != model.enc_logvar.out_dim() ||
        model.enc_mu.out_dim() != model.dec_hidden.in_dim() ||
        model.dec_out.out_dim() != model.enc_hidden.in_dim()) {
        throw InputError("checkpoint VAE layer shapes are inconsistent");
    }
    return model;
}

std::string VaeModel::hash() const { return nn::checkpoint_hash(to_checkpoint(0)); }

VaeModel init_vae(std::size_t input_dim, const VaeConfig& config, nn::Rng& rng) {
    if (input_dim == 0) throw InputError("init_vae: input dimension is zero");
    if (config.latent_dim == 0 || config.hidden_dim == 0) {
        throw InputError("init_vae: latent/hidden dimensions must be positive");
    }
    VaeModel model;
    model.enc_hidden = nn::DenseLayer(config.hidden_dim, input_dim, nn::Activation::relu);
    model.enc_mu = nn::DenseLayer(config.latent_dim, config.hidden_dim, nn::Activation::identity);
    model.enc_logvar =
        nn::DenseLayer(config.latent_dim, config.hidden_dim, nn::Activation::identity);
    model.dec_hidden = nn::DenseLayer(config.hidden_dim, config.latent_dim, nn::Activation::relu);
    model.dec_out = nn::DenseLayer(input_dim, config.hidden_dim, nn::Activation::sigmoid);
    nn::init_kaiming_uniform(model.enc_hidden, rng);
    nn::init_kaiming_uniform(model.enc_mu, rng);
    nn::init_kaiming_uniform(model.enc_logvar, rng);
    nn::init_kaiming_uniform(model.dec_hidden, rng);
    nn::init_kaiming_uniform(model.dec_out, rng);
    return model;
}

// ---------------------------------------------------------------------------
// inference
// ---------------------------------------------------------------------------

EncodeResult encode(const VaeModel& model, const Matrix& inputs) {
    if (inputs.cols != model.input_dim()) {
        throw InputError("encode: input width " + std::to_string(inputs.cols) +
                         " does not match model D=" + std::to_string(model.input_dim()));
    }
    const Matrix hidden = nn::forward_dense(model.enc_hidden, inputs);
    EncodeResult out;
    out.mu = nn::forward_dense(model.enc_mu, hidden);
    out.logvar = nn::forward_dense(model.enc_logvar, hidden);
    return out;
}

EncodeResult encode(const VaeModel& model, const AttributeVector& x) {
    Matrix row(1, x.size());
    for (std::size_t i = 0; i < x.size(); ++i) row.values[i] = static_cast<double>(x.bits[i]);
    return encode(model, row);
}

Matrix reparameterize(const Matrix& mu, const Matrix& logvar, nn::Rng& rng) {
    if (mu.rows != logvar.rows || mu.cols != logvar.cols) {
        throw InputError("reparameterize: mu " + mu.shape() + " vs logvar " + logvar.shape());
    }
    Matrix z = mu;
    for (std::size_t i = 0; i < z.values.size(); ++i) {
        z.values[i] += std::exp(0.5 * logvar.values[i]) * rng.next_normal();
    }
    return z;
}

Matrix decode(const VaeModel& model, const Matrix& latents) {
    if (latents.cols != model.latent_dim()) {
        throw InputError("decode: latent width " + std::to_string(latents.cols) +
                         " does not match model L=" + std::to_string(model.latent_dim()));
    }
    const Matrix hidden = nn::forward_dense(model.dec_hidden, latents);
    Matrix probs = nn::forward_dense(model.dec_out, hidden);
    for (double& p : probs.values) p = nn::clamp_probability(p);
    return probs;
}

std::vector<double> decode(const VaeModel& model, const std::vector<double>& latent) {
    const Matrix probs = decode(model, Matrix::from_row(latent));
    return probs.values;
}

VaeLoss vae_loss(const Matrix& targets, const Matrix& probabilities, const Matrix& mu,
                 const Matrix& logvar, double beta) {
    if (targets.rows != probabilities.rows || targets.cols != probabilities.cols) {
        throw InputError("vae_loss: targets " + targets.shape() + " vs probabilities " +
                         probabilities.shape());
    }
    const double batch = static_cast<double>(targets.rows);
    double bce = 0.0;
    for (std::size_t i = 0; i < targets.values.size(); ++i) {
        const double x = targets.values[i];
        const double p = nn::clamp_probability(probabilities.values[i]);
        bce -= x * std::log(p) + (1.0 - x) * std::log(1.0 - p);
    }
    bce /= batch;
    double kl = 0.0;
    for (std::size_t i = 0; i < mu.values.size(); ++i) {
        const double m = mu.values[i];
        const double lv = logvar.values[i];
        kl += -0.5 * (1.0 + lv - m * m - std::exp(lv));
    }
    kl /= batch;
    return {bce, kl, bce + beta * kl};
}

AttributeVector reconstruct(const VaeModel& model, const AttributeVector& x, double threshold,
                            nn::Rng* sampling_rng) {
    if (threshold <= 0.0 || threshold >= 1.0) {
        throw InputError("reconstruct: threshold must lie in (0,1)");
    }
    EncodeResult enc = encode(model, x);
    Matrix latent = sampling_rng != nullptr ? reparameterize(enc.mu, enc.logvar, *sampling_rng)
                                            : enc.mu;
    const Matrix probs = decode(model, latent);
    AttributeVector out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out.bits[i] = probs.values[i] > threshold ? 1 : 0;
    }
    return out;
}

// ---------------------------------------------------------------------------
// training
// ---------------------------------------------------------------------------

VaeLoss vae_forward_backward(VaeModel& model, const Matrix& batch, const Matrix& eps, double beta,
                             std::vector<double>* grads_out) {
    const double batch_size = static_cast<double>(batch.rows);

    DenseCache cache_enc_hidden, cache_mu, cache_logvar, cache_dec_hidden, cache_dec_out;
    const Matrix hidden = nn::forward_dense(model.enc_hidden, batch, &cache_enc_hidden);
    const Matrix mu = nn::forward_dense(model.enc_mu, hidden, &cache_mu);
    const Matrix logvar = nn::forward_dense(model.enc_logvar, hidden, &cache_logvar);

    nn::require_shape(eps, mu.rows, mu.cols, "vae reparameterization noise");
    Matrix z = mu;
    for (std::size_t i = 0; i < z.values.size(); ++i) {
        z.values[i] += std::exp(0.5 * logvar.values[i]) * eps.values[i];
    }

    const Matrix dec_hidden = nn::forward_dense(model.dec_hidden, z, &cache_dec_hidden);
    const Matrix probs = nn::forward_dense(model.dec_out, dec_hidden, &cache_dec_out);

    const VaeLoss loss = vae_loss(batch, probs, mu, logvar, beta);
    if (grads_out == nullptr) return loss;

    // d(bce)/d(pre-sigmoid logits) = (p - x) / B
    Matrix grad_logits(probs.rows, probs.cols);
    for (std::size_t i = 0; i < probs.values.size(); ++i) {
        grad_logits.values[i] = (probs.values[i] - batch.values[i]) / batch_size;
    }
    DenseGradients g_dec_out =
        nn::backward_dense_linear(model.dec_out, cache_dec_out, grad_logits);
    DenseGradients g_dec_hidden =
        nn::backward_dense(model.dec_hidden, cache_dec_hidden, g_dec_out.input);

    // Through z = mu + exp(logvar/2) * eps, plus the beta-weighted KL terms.
    Matrix grad_mu = g_dec_hidden.input;
    Matrix grad_logvar(logvar.rows, logvar.cols);
    for (std::size_t i = 0; i < grad_logvar.values.size(); ++i) {
        const double sigma_eps = z.values[i] - mu.values[i];  // exp(logvar/2) * eps
        grad_logvar.values[i] = g_dec_hidden.input.values[i] * 0.5 * sigma_eps;
        grad_mu.values[i] += beta * mu.values[i] / batch_size;
        grad_logvar.values[i] +=
            beta * (std::exp(logvar.values[i]) - 1.0) * 0.5 / batch_size;
    }

    DenseGradients g_mu = nn::backward_dense_linear(model.enc_mu, cache_mu, grad_mu);
    DenseGradients g_logvar =
        nn::backward_dense_linear(model.enc_logvar, cache_logvar, grad_logvar);
    const Matrix grad_hidden = nn::add(g_mu.input, g_logvar.input);
    DenseGradients g_enc_hidden =
        nn::backward_dense(model.enc_hidden, cache_enc_hidden, grad_hidden);

    grads_out->clear();
    auto append_layer = [grads_out](const DenseGradients& g) {
        grads_out->insert(grads_out->end(), g.weights.values.begin(), g.weights.values.end());
        grads_out->insert(grads_out->end(), g.bias.begin(), g.bias.end());
    };
    // Same order as VaeModel::params().
    append_layer(g_enc_hidden);
    append_layer(g_mu);
    append_layer(g_logvar);
    append_layer(g_dec_hidden);
    append_layer(g_dec_out);
    return loss;
}

Matrix dataset_to_matrix(const std::vector<AttributeVector>& dataset) {
    if (dataset.empty()) throw InputError("dataset is empty");
    const std::size_t dim = dataset.front().size();
    Matrix out(dataset.size(), dim);
    for (std::size_t r = 0; r < dataset.size(); ++r) {
        if (dataset[r].size() != dim) {
            throw InputError("dataset vector " + std::to_string(r) + " has length " +
                             std::to_string(dataset[r].size()) + ", expected " +
                             std::to_string(dim));
        }
        for (std::size_t c = 0; c < dim; ++c) {
            out(r, c) = static_cast<double>(dataset[r].bits[c]);
        }
    }
    return out;
}

double duplicate_fraction_of_samples(const VaeModel& model, std::size_t n, double threshold,
                                     nn::Rng& rng) {
    std::unordered_map<std::string, std::size_t> counts;
    std::size_t mode = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<double> z = rng.normal_vector(model.latent_dim());
        const std::vector<double> probs = decode(model, z);
        std::string k(probs.size(), '0');
        for (std::size_t d = 0; d < probs.size(); ++d) {
            if (probs[d] > threshold) k[d] = '1';
        }
        mode = std::max(mode, ++counts[k]);
    }
    return static_cast<double>(mode) / static_cast<double>(n);
}

namespace {

double mean_val_jaccard(const VaeModel& model, const std::vector<AttributeVector>& dataset,
                        const std::vector<std::size_t>& indices, double threshold) {
    if (indices.empty()) return 0.0;
    double sum = 0.0;
    for (std::size_t idx : indices) {
        sum += jaccard(reconstruct(model, dataset[idx], threshold), dataset[idx]);
    }
    return sum / static_cast<double>(indices.size());
}

}  // namespace

TrainResult train_vae(const std::vector<AttributeVector>& dataset, const VaeConfig& config) {
    if (dataset.empty()) throw InputError("train_vae: dataset is empty");
    if (config.epochs == 0) throw InputError("train_vae: epochs must be >= 1");
    if (config.batch_size == 0) throw InputError("train_vae: batch size must be >= 1");
    if (config.learning_rate <= 0.0) throw InputError("train_vae: learning rate must be > 0");
    if (config.beta < 0.0) throw InputError("train_vae: beta must be >= 0");

    const std::size_t dim = dataset.front().size();
    nn::Rng rng(config.seed);
    TrainResult result;
    result.model = init_vae(dim, config, rng);

    // Deterministic validation split.
    std::vector<std::size_t> order(dataset.size());
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::size_t val_count = 0;
    if (config.validation_fraction > 0.0 && dataset.size() >= 2) {
        val_count = static_cast<std::size_t>(
            std::llround(config.validation_fraction * static_cast<double>(dataset.size())));
        val_count = std::clamp<std::size_t>(val_count, 1, dataset.size() - 1);
    }
    std::vector<std::size_t> val_indices(order.begin(), order.begin() + val_count);
    std::vector<std::size_t> train_indices(order.begin() + val_count, order.end());
    result.trace.train_count = train_indices.size();
    result.trace.validation_count = val_indices.size();

    const Matrix all = dataset_to_matrix(dataset);
    std::vector<double> grads;
    std::size_t total_params = 0;
    for (const auto& p : result.model.params()) total_params += p.size;
    nn::AdamState adam(total_params, config.learning_rate);
    std::vector<double> flat_params(total_params);

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        rng.shuffle(train_indices);
        double epoch_bce = 0.0;
        double epoch_kl = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < train_indices.size();
             start += config.batch_size) {
            const std::size_t count =
                std::min(config.batch_size, train_indices.size() - start);
            Matrix batch(count, dim);
            for (std::size_t r = 0; r < count; ++r) {
                const std::size_t src = train_indices[start + r];
                std::copy_n(all.values.data() + src * dim, dim, batch.values.data() + r * dim);
            }
            Matrix eps(count, config.latent_dim);
            for (double& e : eps.values) e = rng.next_normal();

            const VaeLoss loss =
                vae_forward_backward(result.model, batch, eps, config.beta, &grads);
            if (!std::isfinite(loss.total)) {
                throw NumericError("train_vae: non-finite loss at epoch " +
                                   std::to_string(epoch + 1) + ", batch " +
                                   std::to_string(start / config.batch_size + 1));
            }
            const double weight = static_cast<double>(count);
            epoch_bce += loss.bce * weight;
            epoch_kl += loss.kl * weight;
            seen += count;

            auto params = result.model.params();
            std::size_t offset = 0;
            for (const auto& p : params) {
                std::copy_n(p.data, p.size, flat_params.data() + offset);
                offset += p.size;
            }
            nn::adam_step(flat_params, grads, adam);
            offset = 0;
            for (auto& p : params) {
                std::copy_n(flat_params.data() + offset, p.size, p.data);
                offset += p.size;
            }
        }
        EpochStats stats;
        stats.bce = epoch_bce / static_cast<double>(std::max<std::size_t>(seen, 1));
        stats.kl = epoch_kl / static_cast<double>(std::max<std::size_t>(seen, 1));
        stats.total = stats.bce + config.beta * stats.kl;
        stats.val_jaccard =
            mean_val_jaccard(result.model, dataset, val_indices, config.threshold);
        result.trace.epochs.push_back(stats);
    }

    // Final validation metrics (posterior-mean reconstruction).
    const auto& final_val = val_indices.empty() ? train_indices : val_indices;
    double jac = 0.0;
    double ham = 0.0;
    double bce = 0.0;
    for (std::size_t idx : final_val) {
        const AttributeVector rec = reconstruct(result.model, dataset[idx], config.threshold);
        jac += jaccard(rec, dataset[idx]);
        ham += hamming(rec, dataset[idx]);
        EncodeResult enc = encode(result.model, dataset[idx]);
        const Matrix probs = decode(result.model, enc.mu);
        Matrix target(1, dim);
        for (std::size_t c = 0; c < dim; ++c) {
            target.values[c] = static_cast<double>(dataset[idx].bits[c]);
        }
        bce += vae_loss(target, probs, enc.mu, enc.logvar, 0.0).bce;
    }
    const double denom = static_cast<double>(std::max<std::size_t>(final_val.size(), 1));
    result.trace.final_val_jaccard = jac / denom;
    result.trace.final_val_hamming = ham / denom;
    result.trace.final_val_bce = bce / denom;

    // Model-collapse detector: a majority of identical prior samples means
    // the decoder degenerated to a handful of popular combinations.
    nn::Rng collapse_rng(config.seed, 0x636f6c6cULL);  // fixed detector stream
    result.trace.collapse_duplicate_fraction =
        duplicate_fraction_of_samples(result.model, 1000, config.threshold, collapse_rng);
    result.trace.collapse_warning = result.trace.collapse_duplicate_fraction > 0.5;

    return result;
}

void write_trace_csv(const std::string& path, const TrainingTrace& trace) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open trace for writing: " + path);
    out << "epoch,bce,kl,total,val_jaccard\n";
    for (std::size_t i = 0; i < trace.epochs.size(); ++i) {
        const auto& e = trace.epochs[i];
        out << (i + 1) << "," << format_double(e.bce) << "," << format_double(e.kl) << ","
            << format_double(e.total) << "," << format_double(e.val_jaccard) << "\n";
    }
    if (!out.good()) throw InputError("failed writing " + path);
}

void write_latent_csv(const std::string& path, const VaeModel& model,
                      const std::vector<DistilledRecord>& records,
                      const ConceptTaxonomy& taxonomy) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open latent export for writing: " + path);
    out << "id";
    for (std::size_t j = 0; j < model.latent_dim(); ++j) out << ",mu_" << (j + 1);
    out << ",dominant_category\n";
    for (const auto& record : records) {
        const AttributeVector vec = encode_multihot(record.attributes, taxonomy);
        const EncodeResult enc = encode(model, vec);
        std::vector<std::size_t> per_category(taxonomy.categories().size(), 0);
        for (const auto& attr : record.attributes) {
            per_category[taxonomy.category_index_of(attr)] += 1;
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < per_category.size(); ++c) {
            if (per_category[c] > per_category[best]) best = c;
        }
        out << record.id;
        for (std::size_t j = 0; j < model.latent_dim(); ++j) {
            out << "," << format_double(enc.mu.values[j]);
        }
        out << "," << taxonomy.categories()[best].name << "\n";
    }
    if (!out.good()) throw InputError("failed writing " + path);
}

}  // namespace conceptgen
