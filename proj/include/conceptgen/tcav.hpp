#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conceptgen/nn/chain.hpp"
#include "conceptgen/nn/rng.hpp"
#include "conceptgen/stats.hpp"

namespace conceptgen {

// Dense classifier under analysis: named hidden layers feeding a linear
// logit layer ("output"). Every inner layer is probe-able by name.
struct ProbeClassifier {
    nn::LayerChain chain;
    std::size_t num_classes = 0;

    std::size_t input_dim() const { return chain.input_dim(); }
    nn::Checkpoint to_checkpoint(std::uint64_t seed) const;
    static ProbeClassifier from_checkpoint(const nn::Checkpoint& ckpt);
};

struct ProbeTrainConfig {
    std::vector<std::size_t> hidden_dims = {64, 32};
    double learning_rate = 1e-3;
    std::size_t epochs = 60;
    std::size_t batch_size = 32;
    double validation_fraction = 0.2;
    std::uint64_t seed = 0;
};

struct LabeledDataset {
    nn::Matrix inputs;               // n x input_dim
    std::vector<std::size_t> labels;  // n, values in [0, num_classes)
    std::size_t num_classes = 0;
};

struct ProbeTrainResult {
    ProbeClassifier classifier;
    double validation_accuracy = 0.0;
    double train_accuracy = 0.0;
};

// Cross-entropy training of the dense probe classifier. Requires >= 2
// classes and >= 50 examples per class.
ProbeTrainResult train_probe_classifier(const LabeledDataset& data,
                                        const ProbeTrainConfig& config);

// Balanced positive/negative example sets defining one concept.
struct ConceptExampleSet {
    std::string concept_name;
    std::vector<std::vector<double>> positives;
    std::vector<std::vector<double>> negatives;

    // Balance within +-1 and >= min_per_side on both sides.
    void validate(std::size_t min_per_side = 10) const;
};

struct CavConfig {
    double l2 = 1e-3;
    std::size_t steps = 500;
    double learning_rate = 0.05;
    double holdout_fraction = 0.2;
    std::uint64_t seed = 0;
};

// A concept direction in a layer's activation space.
struct Cav {
    std::string concept_name;
    std::string layer_name;
    std::vector<double> direction;  // unit norm, points toward positives
    double probe_accuracy = 0.0;    // held-out accuracy of the linear probe
    bool degenerate = false;        // probe no better than chance
};

// Deterministic forward pass truncated at the named layer.
nn::Matrix extract_activations(const ProbeClassifier& model, const std::string& layer_name,
                               const nn::Matrix& inputs);

// Logistic-regression probe on the layer activations (positives = 1),
// gradient descent with L2; direction is the normalized weight vector.
Cav train_cav(const ConceptExampleSet& set, const ProbeClassifier& model,
              const std::string& layer_name, const CavConfig& config);

// Gradient of logit_k w.r.t. the named layer's activation at one input,
// dotted with the direction v (unit norm expected).
double directional_derivative(const ProbeClassifier& model, const std::string& layer_name,
                              std::size_t class_index, std::span<const double> input,
                              std::span<const double> direction);

// Fraction of class examples whose directional derivative along the CAV is
// strictly positive.
double tcav_score(const ProbeClassifier& model, const std::string& layer_name,
                  std::size_t class_index, const Cav& cav, const nn::Matrix& class_examples);

// Two-sided Welch t-test of repeated concept-CAV scores against
// random-direction scores; needs >= 10 runs per side.
WelchResult significance_test(std::span<const double> concept_scores,
                              std::span<const double> random_scores, double alpha = 0.05);

// Uniformly random unit direction via normalized Gaussian draws.
std::vector<double> random_unit_direction(std::size_t dim, nn::Rng& rng);

struct TcavResult {
    std::string concept_name;
    std::size_t class_index = 0;
    std::string layer_name;
    double score = 0.0;                  // primary CAV's score (an exact fraction)
    double mean_concept_score = 0.0;     // mean over repeated CAV trainings
    std::vector<double> concept_scores;  // one per repeated training
    std::vector<double> random_scores;   // one per random direction
    double p_value = 1.0;
    bool significant = false;
};

struct TcavProtocol {
    std::string layer_name;
    double alpha = 0.05;
    std::size_t concept_cavs = 10;  // repeated trainings with resampled negatives
    std::size_t random_cavs = 50;
    CavConfig cav;
    std::uint64_t seed = 0;
};

// Full protocol for one concept against every class: repeated concept CAVs
// (negatives resampled per run), random-direction null scores shared per
// class, Welch test per (concept, class).
std::vector<TcavResult> run_tcav(const ProbeClassifier& model, const ConceptExampleSet& concept,
                                 const std::vector<nn::Matrix>& class_examples,
                                 const TcavProtocol& protocol);

// results CSV: concept,class,layer,score,p_value,significant
std::string tcav_results_csv(const std::vector<TcavResult>& results);

}  // namespace conceptgen
