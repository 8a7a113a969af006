#include "conceptgen/sampler.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "conceptgen/errors.hpp"
#include "conceptgen/text.hpp"

namespace conceptgen {

using json = nlohmann::json;

void SeedSpec::validate(const ConceptTaxonomy& taxonomy) const {
    for (const auto& name : forced_on) {
        if (!taxonomy.contains(name)) {
            throw InputError("seed spec forces unknown attribute on: '" + name + "'");
        }
        if (forced_off.count(name) != 0) {
            throw InputError("seed spec forces '" + name + "' both on and off");
        }
    }
    for (const auto& name : forced_off) {
        if (!taxonomy.contains(name)) {
            throw InputError("seed spec forces unknown attribute off: '" + name + "'");
        }
    }
}

AttributeVector threshold_vector(const std::vector<double>& probabilities,
                                 const ThresholdRule& rule) {
    AttributeVector out(probabilities.size());
    if (rule.mode == ThresholdRule::Mode::fixed) {
        if (rule.theta <= 0.0 || rule.theta >= 1.0) {
            throw InputError("threshold theta must lie in (0,1)");
        }
        for (std::size_t i = 0; i < probabilities.size(); ++i) {
            out.bits[i] = probabilities[i] > rule.theta ? 1 : 0;
        }
        return out;
    }
    if (rule.k > probabilities.size()) {
        throw InputError("top-k threshold: k=" + std::to_string(rule.k) + " exceeds D=" +
                         std::to_string(probabilities.size()));
    }
    std::vector<std::size_t> order(probabilities.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&probabilities](std::size_t a, std::size_t b) {
        return probabilities[a] > probabilities[b];  // ties keep the lower index first
    });
    for (std::size_t i = 0; i < rule.k; ++i) out.bits[order[i]] = 1;
    return out;
}

namespace {

struct ClampPlan {
    std::vector<std::size_t> on;
    std::vector<std::size_t> off;

    void apply(AttributeVector& vec) const {
        for (std::size_t i : on) vec.bits[i] = 1;
        for (std::size_t i : off) vec.bits[i] = 0;
    }
};

// Shared rejection-sampling loop for both modes. `draw` fills a probability
// vector for attempt t of draw i using that draw's own rng stream.
template <typename DrawFn>
GenerationBatch sample_batch(const VaeModel& model, std::size_t n, std::uint64_t seed,
                             const ThresholdRule& rule, const SampleBounds& bounds,
                             const ClampPlan& clamp, const DrawFn& draw) {
    if (n < 1) throw InputError("sample: n must be >= 1");
    if (bounds.min_attrs > bounds.max_attrs) {
        throw InputError("sample bounds: min_attrs > max_attrs");
    }
    GenerationBatch batch;
    batch.model_hash = model.hash();
    batch.seed = seed;
    batch.vectors.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        nn::Rng stream(seed, i);
        bool accepted = false;
        for (std::size_t attempt = 0; attempt < std::max<std::size_t>(bounds.max_attempts, 1);
             ++attempt) {
            const std::vector<double> probs = draw(stream);
            AttributeVector vec = threshold_vector(probs, rule);
            clamp.apply(vec);
            const std::size_t bits = vec.popcount();
            if (bits >= bounds.min_attrs && bits <= bounds.max_attrs) {
                batch.vectors.push_back(std::move(vec));
                accepted = true;
                break;
            }
            batch.rejected_draws += 1;
        }
        if (!accepted) {
            throw NumericError("sampling failed: draw " + std::to_string(i) + " exceeded " +
                               std::to_string(bounds.max_attempts) +
                               " attempts outside popcount bounds [" +
                               std::to_string(bounds.min_attrs) + ", " +
                               std::to_string(bounds.max_attrs) + "] (" +
                               std::to_string(batch.rejected_draws) + " rejections so far)");
        }
    }
    return batch;
}

}  // namespace

GenerationBatch sample_unconditional(const VaeModel& model, std::size_t n, std::uint64_t seed,
                                     const ThresholdRule& rule, const SampleBounds& bounds) {
    const std::size_t latent = model.latent_dim();
    GenerationBatch batch = sample_batch(
        model, n, seed, rule, bounds, ClampPlan{},
        [&model, latent](nn::Rng& rng) { return decode(model, rng.normal_vector(latent)); });
    batch.mode = "unconditional";
    return batch;
}

GenerationBatch sample_conditional(const VaeModel& model, const ConceptTaxonomy& taxonomy,
                                   const SeedSpec& spec, std::size_t n, std::uint64_t seed,
                                   const ThresholdRule& rule, const SampleBounds& bounds) {
    spec.validate(taxonomy);
    if (taxonomy.dimension() != model.input_dim()) {
        throw InputError("taxonomy dimension " + std::to_string(taxonomy.dimension()) +
                         " does not match model D=" + std::to_string(model.input_dim()));
    }
    AttributeVector seed_vector(taxonomy.dimension());
    ClampPlan clamp;
    for (const auto& name : spec.forced_on) {
        const std::size_t idx = taxonomy.index_of(name);
        seed_vector.bits[idx] = 1;
        clamp.on.push_back(idx);
    }
    for (const auto& name : spec.forced_off) clamp.off.push_back(taxonomy.index_of(name));

    const EncodeResult posterior = encode(model, seed_vector);
    const std::size_t latent = model.latent_dim();
    GenerationBatch batch = sample_batch(
        model, n, seed, rule, bounds, clamp, [&](nn::Rng& rng) {
            std::vector<double> z(latent);
            for (std::size_t j = 0; j < latent; ++j) {
                z[j] = posterior.mu.values[j] +
                       std::exp(0.5 * posterior.logvar.values[j]) * rng.next_normal();
            }
            return decode(model, z);
        });
    batch.mode = "conditional";
    batch.seed_spec = spec;
    return batch;
}

std::vector<DatasetRecord> assemble_records(const GenerationBatch& batch,
                                            const std::vector<std::string>& captions,
                                            const ConceptTaxonomy& taxonomy) {
    if (captions.size() != batch.vectors.size()) {
        throw InputError("assemble_records: " + std::to_string(batch.vectors.size()) +
                         " vectors but " + std::to_string(captions.size()) + " captions");
    }
    std::vector<DatasetRecord> records;
    records.reserve(batch.vectors.size());
    for (std::size_t i = 0; i < batch.vectors.size(); ++i) {
        DatasetRecord record;
        char id[40];
        std::snprintf(id, sizeof(id), "gen-%llu-%06zu",
                      static_cast<unsigned long long>(batch.seed), i);
        record.id = id;
        record.caption = captions[i];
        for (const auto& attr : decode_multihot(batch.vectors[i], taxonomy)) {
            record.attributes.push_back(attr);
        }
        record.model_hash = batch.model_hash;
        record.seed = batch.seed;
        record.mode = batch.mode;
        record.seed_spec = batch.seed_spec;
        records.push_back(std::move(record));
    }
    return records;
}

void write_records_jsonl(const std::string& path, const std::vector<DatasetRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open records output: " + path);
    for (const auto& record : records) {
        json provenance;
        provenance["model_hash"] = record.model_hash;
        provenance["seed"] = record.seed;
        provenance["mode"] = record.mode;
        if (record.seed_spec.has_value()) {
            provenance["seed_spec"] = {{"force_on", record.seed_spec->forced_on},
                                       {"force_off", record.seed_spec->forced_off}};
        }
        json j;
        j["id"] = record.id;
        j["attributes"] = record.attributes;
        j["caption"] = record.caption;
        j["provenance"] = provenance;
        out << j.dump() << "\n";
    }
    if (!out.good()) throw InputError("failed writing " + path);
}

std::vector<DatasetRecord> load_records_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open records: " + path);
    std::vector<DatasetRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        try {
            const json j = json::parse(line);
            DatasetRecord record;
            record.id = j.at("id").get<std::string>();
            record.caption = j.value("caption", "");
            for (const auto& attr : j.at("attributes")) {
                record.attributes.push_back(attr.get<std::string>());
            }
            if (j.contains("provenance")) {
                const auto& p = j.at("provenance");
                record.model_hash = p.value("model_hash", "");
                record.seed = p.value("seed", std::uint64_t{0});
                record.mode = p.value("mode", "");
                if (p.contains("seed_spec")) {
                    SeedSpec spec;
                    for (const auto& a : p.at("seed_spec").at("force_on")) {
                        spec.forced_on.insert(a.get<std::string>());
                    }
                    for (const auto& a : p.at("seed_spec").at("force_off")) {
                        spec.forced_off.insert(a.get<std::string>());
                    }
                    record.seed_spec = std::move(spec);
                }
            }
            records.push_back(std::move(record));
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace conceptgen
