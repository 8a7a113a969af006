#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conceptgen/nn/chain.hpp"
#include "conceptgen/nn/layers.hpp"
#include "conceptgen/nn/rng.hpp"
#include "conceptgen/taxonomy.hpp"

namespace conceptgen {

struct VaeConfig {
    double beta = 0.25;
    double learning_rate = 3e-4;
    std::size_t epochs = 110;
    std::size_t batch_size = 32;
    std::size_t latent_dim = 128;
    std::size_t hidden_dim = 512;
    std::uint64_t seed = 0;
    double threshold = 0.5;
    double validation_fraction = 0.1;
    // Reconstruction normally uses the posterior mean; this switches to a
    // sampled latent instead.
    bool sample_reconstruction = false;
};

// Encoder D -> hidden (relu) -> {mu, logvar} heads; symmetric decoder
// latent -> hidden (relu) -> D (sigmoid).
struct VaeModel {
    nn::DenseLayer enc_hidden;
    nn::DenseLayer enc_mu;
    nn::DenseLayer enc_logvar;
    nn::DenseLayer dec_hidden;
    nn::DenseLayer dec_out;

    std::size_t input_dim() const { return enc_hidden.in_dim(); }
    std::size_t hidden_dim() const { return enc_hidden.out_dim(); }
    std::size_t latent_dim() const { return enc_mu.out_dim(); }

    std::vector<nn::ParamView> params();
    nn::Checkpoint to_checkpoint(std::uint64_t seed) const;
    static VaeModel from_checkpoint(const nn::Checkpoint& ckpt);
    std::string hash() const;
};

VaeModel init_vae(std::size_t input_dim, const VaeConfig& config, nn::Rng& rng);

struct EpochStats {
    double bce = 0.0;
    double kl = 0.0;
    double total = 0.0;
    double val_jaccard = 0.0;
};

struct TrainingTrace {
    std::vector<EpochStats> epochs;
    bool collapse_warning = false;
    double collapse_duplicate_fraction = 0.0;
    std::size_t train_count = 0;
    std::size_t validation_count = 0;
    double final_val_jaccard = 0.0;
    double final_val_hamming = 0.0;
    double final_val_bce = 0.0;
};

struct VaeLoss {
    double bce = 0.0;
    double kl = 0.0;
    double total = 0.0;
};

// --------------------------------------------------------------------------
// inference
// --------------------------------------------------------------------------

struct EncodeResult {
    nn::Matrix mu;      // batch x L
    nn::Matrix logvar;  // batch x L
};

EncodeResult encode(const VaeModel& model, const nn::Matrix& inputs);
EncodeResult encode(const VaeModel& model, const AttributeVector& x);

// z = mu + exp(logvar/2) * eps, eps ~ N(0, I).
nn::Matrix reparameterize(const nn::Matrix& mu, const nn::Matrix& logvar, nn::Rng& rng);

// Per-attribute Bernoulli probabilities, clamped into (0, 1).
nn::Matrix decode(const VaeModel& model, const nn::Matrix& latents);
std::vector<double> decode(const VaeModel& model, const std::vector<double>& latent);

// BCE summed over dimensions and averaged over the batch; analytic KL against
// the unit Gaussian, also batch-averaged; total = bce + beta * kl.
VaeLoss vae_loss(const nn::Matrix& targets, const nn::Matrix& probabilities,
                 const nn::Matrix& mu, const nn::Matrix& logvar, double beta);

AttributeVector reconstruct(const VaeModel& model, const AttributeVector& x, double threshold,
                            nn::Rng* sampling_rng = nullptr);

// --------------------------------------------------------------------------
// training
// --------------------------------------------------------------------------

// One forward/backward pass; used by train() and by the gradient checks.
// Gradients are flattened in model.params() order.
VaeLoss vae_forward_backward(VaeModel& model, const nn::Matrix& batch, const nn::Matrix& eps,
                             double beta, std::vector<double>* grads_out);

struct TrainResult {
    VaeModel model;
    TrainingTrace trace;
};

// Minibatch Adam on the beta-weighted loss; the whole trajectory is a pure
// function of (dataset, config.seed).
TrainResult train_vae(const std::vector<AttributeVector>& dataset, const VaeConfig& config);

nn::Matrix dataset_to_matrix(const std::vector<AttributeVector>& dataset);

// Trace CSV: epoch,bce,kl,total,val_jaccard
void write_trace_csv(const std::string& path, const TrainingTrace& trace);

// Latent CSV for external 2-D projection: record id, posterior mean, and the
// record's dominant category (most represented; ties to the earlier one).
void write_latent_csv(const std::string& path, const VaeModel& model,
                      const std::vector<DistilledRecord>& records,
                      const ConceptTaxonomy& taxonomy);

// Threshold-and-count duplicate fraction over n prior samples; the
// model-collapse detector behind the training warning.
double duplicate_fraction_of_samples(const VaeModel& model, std::size_t n, double threshold,
                                     nn::Rng& rng);

}  // namespace conceptgen
