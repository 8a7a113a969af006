#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "conceptgen/taxonomy.hpp"

namespace conceptgen {

struct CaptionRequest {
    std::vector<std::string> attributes;  // ordered, non-empty
    std::size_t target_length_words = 31;
    std::string style;
};

struct EndpointConfig {
    std::string base_url;                           // e.g. http://localhost:8080
    std::string model;                              // model identifier sent upstream
    std::string auth_env = "CONCEPTGEN_API_TOKEN";  // env var holding the token; "" = no auth
    double timeout_seconds = 30.0;
    std::size_t max_retries = 2;
    double temperature = 0.7;
};

enum class CaptionSource { endpoint, template_engine };

struct CaptionResult {
    std::string caption;
    CaptionSource source = CaptionSource::template_engine;
    double attribute_recall = 0.0;
};

// Deterministic instruction text embedding the attribute list verbatim and
// the target length.
std::string render_prompt(const CaptionRequest& request);

// Fraction of attributes whose normalized surface form (case-insensitive,
// with plural/singular folding) occurs in the caption. A lower bound on true
// semantic incorporation.
double attribute_recall(const std::string& caption, const std::vector<std::string>& attributes);

// Offline fallback: one grammatical sentence assembled from per-category
// clauses, embedding every attribute verbatim (recall 1.0 by construction).
// Works without a taxonomy, in which case a single generic clause is used.
CaptionResult template_caption(const CaptionRequest& request,
                               const ConceptTaxonomy* taxonomy = nullptr);

// Chat-completion call against the configured endpoint. Missing auth token
// is a ConfigError raised before any network activity; transport failures
// retry up to max_retries and then raise EndpointError; an empty completion
// is a malformed-response EndpointError.
CaptionResult generate_caption(const CaptionRequest& request, const EndpointConfig& config);

// Captions a batch preserving input order. Endpoint mode fans out over at
// most `concurrency` in-flight requests; template mode is pure and serial.
std::vector<CaptionResult> caption_batch(const std::vector<CaptionRequest>& requests,
                                         const EndpointConfig* endpoint,
                                         const ConceptTaxonomy* taxonomy,
                                         std::size_t concurrency = 4);

}  // namespace conceptgen
