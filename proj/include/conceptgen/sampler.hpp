#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conceptgen/taxonomy.hpp"
#include "conceptgen/vae.hpp"

namespace conceptgen {

// Partial attribute assignment a conditional sample must respect.
struct SeedSpec {
    std::set<std::string> forced_on;
    std::set<std::string> forced_off;

    bool empty() const { return forced_on.empty() && forced_off.empty(); }
    // Disjointness and taxonomy membership; throws InputError.
    void validate(const ConceptTaxonomy& taxonomy) const;
};

struct ThresholdRule {
    enum class Mode { fixed, top_k };
    Mode mode = Mode::fixed;
    double theta = 0.5;
    std::size_t k = 0;

    static ThresholdRule fixed(double theta) { return {Mode::fixed, theta, 0}; }
    static ThresholdRule top_k(std::size_t k) { return {Mode::top_k, 0.5, k}; }
};

// Popcount window enforced by rejection resampling. A draw whose vector
// lands outside [min_attrs, max_attrs] is retried on its own rng stream up
// to max_attempts before the batch fails.
struct SampleBounds {
    std::size_t min_attrs = 2;
    std::size_t max_attrs = 12;
    std::size_t max_attempts = 100;

    static SampleBounds unbounded(std::size_t dim) { return {0, dim, 1}; }
};

struct GenerationBatch {
    std::vector<AttributeVector> vectors;
    std::string model_hash;
    std::uint64_t seed = 0;
    std::string mode;  // "unconditional" | "conditional"
    std::optional<SeedSpec> seed_spec;
    std::size_t rejected_draws = 0;
};

// bit_i = [p_i > theta], or the k largest probabilities (ties to the lower
// index) for top-k mode.
AttributeVector threshold_vector(const std::vector<double>& probabilities,
                                 const ThresholdRule& rule);

// n independent prior draws z ~ N(0, I), decoded and thresholded. Draw i
// consumes the (seed, i) rng stream, so batches are reproducible and
// independent of evaluation order.
GenerationBatch sample_unconditional(const VaeModel& model, std::size_t n, std::uint64_t seed,
                                     const ThresholdRule& rule, const SampleBounds& bounds);

// Seeded sampling: encode the partial vector, draw z from the posterior,
// decode, then clamp the forced bits.
GenerationBatch sample_conditional(const VaeModel& model, const ConceptTaxonomy& taxonomy,
                                   const SeedSpec& spec, std::size_t n, std::uint64_t seed,
                                   const ThresholdRule& rule, const SampleBounds& bounds);

// One synthesized dataset row (the published record shape).
struct DatasetRecord {
    std::string id;
    std::string caption;
    std::vector<std::string> attributes;
    std::string model_hash;
    std::uint64_t seed = 0;
    std::string mode;
    std::optional<SeedSpec> seed_spec;
};

// One record per vector; captions positionally matched (may be empty
// placeholders for a later captioning stage).
std::vector<DatasetRecord> assemble_records(const GenerationBatch& batch,
                                            const std::vector<std::string>& captions,
                                            const ConceptTaxonomy& taxonomy);

void write_records_jsonl(const std::string& path, const std::vector<DatasetRecord>& records);
std::vector<DatasetRecord> load_records_jsonl(const std::string& path);

}  // namespace conceptgen
