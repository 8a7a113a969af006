#include "conceptgen/captioner.hpp"

#include <atomic>
#include <cstdlib>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "conceptgen/errors.hpp"
#include "conceptgen/text.hpp"

namespace conceptgen {

using json = nlohmann::json;

std::string render_prompt(const CaptionRequest& request) {
    if (request.attributes.empty()) {
        throw InputError("caption request has no attributes");
    }
    std::ostringstream out;
    out << "You are a professional music writer. Compose one accurate caption for a piece of "
           "music that has exactly these attributes: ";
    for (std::size_t i = 0; i < request.attributes.size(); ++i) {
        if (i > 0) out << "; ";
        out << request.attributes[i];
    }
    out << ". Mention every attribute explicitly, aim for about " << request.target_length_words
        << " words";
    if (!request.style.empty()) out << ", in a " << request.style << " register";
    out << ", and reply with the caption text only.";
    return out.str();
}

double attribute_recall(const std::string& caption, const std::vector<std::string>& attributes) {
    if (attributes.empty()) throw InputError("attribute_recall: attribute list is empty");
    const std::string haystack = to_lower(caption);
    std::size_t found = 0;
    for (const auto& raw : attributes) {
        const std::string attr = normalize_tag(raw);
        if (attr.empty()) continue;
        bool hit = haystack.find(attr) != std::string::npos;
        if (!hit) {
            // plural/singular folding
            if (attr.back() == 's') {
                hit = haystack.find(attr.substr(0, attr.size() - 1)) != std::string::npos;
            } else {
                hit = haystack.find(attr + "s") != std::string::npos;
            }
        }
        if (hit) ++found;
    }
    return static_cast<double>(found) / static_cast<double>(attributes.size());
}

namespace {

std::string join_natural(const std::vector<std::string>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += (i + 1 == items.size()) ? " and " : ", ";
        out += items[i];
    }
    return out;
}

}  // namespace

CaptionResult template_caption(const CaptionRequest& request, const ConceptTaxonomy* taxonomy) {
    if (request.attributes.empty()) {
        throw InputError("caption request has no attributes");
    }
    std::vector<std::string> genres, instruments, moods, tempo, other;
    for (const auto& attr : request.attributes) {
        const std::string* bucketed = nullptr;
        if (taxonomy != nullptr && taxonomy->contains(attr)) {
            static const std::string kGenres = "genres", kInstruments = "instruments",
                                     kMoods = "moods", kTempo = "tempo";
            const std::string& cat = taxonomy->category_of(attr);
            if (cat == kGenres) {
                genres.push_back(attr);
                bucketed = &kGenres;
            } else if (cat == kInstruments) {
                instruments.push_back(attr);
                bucketed = &kInstruments;
            } else if (cat == kMoods) {
                moods.push_back(attr);
                bucketed = &kMoods;
            } else if (cat == kTempo) {
                tempo.push_back(attr);
                bucketed = &kTempo;
            }
        }
        if (bucketed == nullptr) other.push_back(attr);
    }

    std::vector<std::string> clauses;
    clauses.push_back(genres.empty() ? std::string("A piece")
                                     : "A " + join_natural(genres) + " piece");
    if (!instruments.empty()) clauses.push_back("featuring " + join_natural(instruments));
    if (!moods.empty()) clauses.push_back("with a " + join_natural(moods) + " feel");
    if (!tempo.empty()) clauses.push_back("set to a " + join_natural(tempo));
    if (!other.empty()) clauses.push_back("marked by " + join_natural(other));

    std::string caption;
    for (std::size_t i = 0; i < clauses.size(); ++i) {
        if (i > 0) caption += ", ";
        caption += clauses[i];
    }
    caption += ".";

    CaptionResult result;
    result.caption = caption;
    result.source = CaptionSource::template_engine;
    result.attribute_recall = attribute_recall(caption, request.attributes);
    return result;
}

namespace {

struct ParsedUrl {
    std::string origin;  // scheme://host:port
    std::string path_prefix;
};

ParsedUrl parse_base_url(const std::string& base_url) {
    const std::size_t scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw ConfigError("endpoint base URL must include a scheme: " + base_url);
    }
    const std::size_t path_start = base_url.find('/', scheme_end + 3);
    ParsedUrl out;
    if (path_start == std::string::npos) {
        out.origin = base_url;
    } else {
        out.origin = base_url.substr(0, path_start);
        out.path_prefix = base_url.substr(path_start);
        while (!out.path_prefix.empty() && out.path_prefix.back() == '/') {
            out.path_prefix.pop_back();
        }
    }
    return out;
}

}  // namespace

CaptionResult generate_caption(const CaptionRequest& request, const EndpointConfig& config) {
    if (config.base_url.empty()) {
        throw ConfigError("no endpoint URL configured; use template mode or set one");
    }
    std::string token;
    if (!config.auth_env.empty()) {
        const char* value = std::getenv(config.auth_env.c_str());
        if (value == nullptr || *value == '\0') {
            throw ConfigError("auth token environment variable '" + config.auth_env +
                              "' is not set");
        }
        token = value;
    }

    const std::string prompt = render_prompt(request);
    json body;
    body["model"] = config.model;
    body["messages"] = json::array({{{"role", "user"}, {"content", prompt}}});
    body["temperature"] = config.temperature;
    const std::string payload = body.dump();

    const ParsedUrl url = parse_base_url(config.base_url);
    const std::string path = url.path_prefix + "/v1/chat/completions";

    httplib::Client client(url.origin);
    const auto timeout_s = static_cast<time_t>(config.timeout_seconds);
    const auto timeout_us =
        static_cast<time_t>((config.timeout_seconds - static_cast<double>(timeout_s)) * 1e6);
    client.set_connection_timeout(timeout_s, timeout_us);
    client.set_read_timeout(timeout_s, timeout_us);
    client.set_write_timeout(timeout_s, timeout_us);
    httplib::Headers headers;
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    std::string last_error;
    for (std::size_t attempt = 0; attempt <= config.max_retries; ++attempt) {
        auto res = client.Post(path, headers, payload, "application/json");
        if (!res) {
            last_error = httplib::to_string(res.error());
            continue;  // transport failure: retry
        }
        if (res->status == 401 || res->status == 403) {
            throw ConfigError("endpoint rejected credentials (HTTP " +
                              std::to_string(res->status) + ")");
        }
        if (res->status >= 500) {
            last_error = "HTTP " + std::to_string(res->status);
            continue;
        }
        if (res->status != 200) {
            throw EndpointError("endpoint returned HTTP " + std::to_string(res->status));
        }
        std::string text;
        try {
            const json reply = json::parse(res->body);
            text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const json::exception& e) {
            throw EndpointError(std::string("malformed endpoint response: ") + e.what());
        }
        const std::string caption = collapse_whitespace(text);
        if (caption.empty()) {
            throw EndpointError("malformed endpoint response: empty completion");
        }
        CaptionResult result;
        result.caption = caption;
        result.source = CaptionSource::endpoint;
        result.attribute_recall = attribute_recall(caption, request.attributes);
        return result;
    }
    throw EndpointError("endpoint unreachable after " + std::to_string(config.max_retries + 1) +
                        " attempts: " + last_error);
}

std::vector<CaptionResult> caption_batch(const std::vector<CaptionRequest>& requests,
                                         const EndpointConfig* endpoint,
                                         const ConceptTaxonomy* taxonomy,
                                         std::size_t concurrency) {
    std::vector<CaptionResult> results(requests.size());
    if (endpoint == nullptr) {
        for (std::size_t i = 0; i < requests.size(); ++i) {
            results[i] = template_caption(requests[i], taxonomy);
        }
        return results;
    }
    // Fail fast on configuration before spawning any workers.
    if (!endpoint->auth_env.empty() && std::getenv(endpoint->auth_env.c_str()) == nullptr) {
        throw ConfigError("auth token environment variable '" + endpoint->auth_env +
                          "' is not set");
    }
    const std::size_t workers =
        std::max<std::size_t>(1, std::min(concurrency, requests.size()));
    std::atomic<std::size_t> next{0};
    std::vector<std::string> errors(workers);
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= requests.size()) return;
                try {
                    results[i] = generate_caption(requests[i], *endpoint);
                } catch (const std::exception& e) {
                    if (errors[w].empty()) errors[w] = e.what();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
        if (!e.empty()) throw EndpointError("caption batch failed: " + e);
    }
    return results;
}

}  // namespace conceptgen
