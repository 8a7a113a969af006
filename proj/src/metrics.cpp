#include "conceptgen/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "conceptgen/errors.hpp"
#include "conceptgen/text.hpp"

namespace conceptgen {

using json = nlohmann::json;

namespace {

void require_same_length(const AttributeVector& x, const AttributeVector& y, const char* what) {
    if (x.size() != y.size()) {
        throw InputError(std::string(what) + ": vector lengths differ (" +
                         std::to_string(x.size()) + " vs " + std::to_string(y.size()) + ")");
    }
}

}  // namespace

double jaccard(const AttributeVector& x, const AttributeVector& y) {
    require_same_length(x, y, "jaccard");
    std::size_t inter = 0;
    std::size_t uni = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool a = x.bits[i] != 0;
        const bool b = y.bits[i] != 0;
        if (a && b) ++inter;
        if (a || b) ++uni;
    }
    if (uni == 0) return 1.0;  // agreement on total absence
    return static_cast<double>(inter) / static_cast<double>(uni);
}

double hamming(const AttributeVector& x, const AttributeVector& y) {
    require_same_length(x, y, "hamming");
    if (x.size() == 0) return 0.0;
    std::size_t diff = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if ((x.bits[i] != 0) != (y.bits[i] != 0)) ++diff;
    }
    return static_cast<double>(diff) / static_cast<double>(x.size());
}

double diversity(const std::vector<AttributeVector>& batch) {
    if (batch.empty()) throw InputError("diversity: batch is empty");
    std::unordered_set<std::string> unique;
    unique.reserve(batch.size());
    for (const auto& v : batch) unique.insert(v.key());
    return static_cast<double>(unique.size()) / static_cast<double>(batch.size());
}

CooccurrenceMatrix cooccurrence(const std::vector<AttributeVector>& dataset) {
    if (dataset.empty()) throw InputError("cooccurrence: dataset is empty");
    const std::size_t dim = dataset.front().size();
    CooccurrenceMatrix m(dim);
    std::vector<std::size_t> active;
    for (const auto& vec : dataset) {
        if (vec.size() != dim) {
            throw InputError("cooccurrence: inconsistent vector length " +
                             std::to_string(vec.size()) + " (expected " + std::to_string(dim) +
                             ")");
        }
        active.clear();
        for (std::size_t i = 0; i < dim; ++i) {
            if (vec.bits[i] != 0) active.push_back(i);
        }
        for (std::size_t a : active) {
            for (std::size_t b : active) m.at(a, b) += 1.0;
        }
    }
    return m;
}

double cooccurrence_cosine(const CooccurrenceMatrix& a, const CooccurrenceMatrix& b) {
    if (a.dim != b.dim) {
        throw InputError("cooccurrence_cosine: dimension mismatch (" + std::to_string(a.dim) +
                         " vs " + std::to_string(b.dim) + ")");
    }
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (std::size_t i = 0; i < a.dim; ++i) {
        for (std::size_t j = i + 1; j < a.dim; ++j) {
            const double va = a.at(i, j);
            const double vb = b.at(i, j);
            dot += va * vb;
            norm_a += va * va;
            norm_b += vb * vb;
        }
    }
    if (norm_a == 0.0 || norm_b == 0.0) {
        throw NumericError("cooccurrence_cosine undefined: a matrix has an all-zero off-diagonal");
    }
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

// ---------------------------------------------------------------------------
// lexical metrics
// ---------------------------------------------------------------------------

namespace {

// n-grams joined with an unprintable separator for hashing.
std::unordered_map<std::string, std::size_t> ngram_counts(const std::vector<std::string>& tokens,
                                                          std::size_t n) {
    std::unordered_map<std::string, std::size_t> counts;
    if (tokens.size() < n) return counts;
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string key;
        for (std::size_t j = 0; j < n; ++j) {
            key += tokens[i + j];
            key.push_back('\x1f');
        }
        counts[key] += 1;
    }
    return counts;
}

}  // namespace

double bleu(const std::string& candidate, const std::vector<std::string>& references,
            std::size_t max_n) {
    if (references.empty()) throw InputError("bleu: no references given");
    const auto cand = tokenize_for_metrics(candidate);
    if (cand.empty()) return 0.0;

    std::vector<std::vector<std::string>> refs;
    refs.reserve(references.size());
    for (const auto& r : references) refs.push_back(tokenize_for_metrics(r));

    // Closest reference length; ties go to the shorter one.
    std::size_t ref_len = refs.front().size();
    for (const auto& r : refs) {
        const auto diff = [&](std::size_t len) {
            return len > cand.size() ? len - cand.size() : cand.size() - len;
        };
        if (diff(r.size()) < diff(ref_len) || (diff(r.size()) == diff(ref_len) && r.size() < ref_len)) {
            ref_len = r.size();
        }
    }

    const std::size_t n_max = std::min<std::size_t>(max_n, cand.size());
    double log_precision_sum = 0.0;
    for (std::size_t n = 1; n <= n_max; ++n) {
        const auto cand_counts = ngram_counts(cand, n);
        std::unordered_map<std::string, std::size_t> clip;
        for (const auto& r : refs) {
            for (const auto& [gram, count] : ngram_counts(r, n)) {
                auto& best = clip[gram];
                best = std::max(best, count);
            }
        }
        std::size_t matches = 0;
        std::size_t total = 0;
        for (const auto& [gram, count] : cand_counts) {
            total += count;
            auto it = clip.find(gram);
            if (it != clip.end()) matches += std::min(count, it->second);
        }
        double precision;
        if (n == 1) {
            if (matches == 0) return 0.0;  // no unigram overlap means no credit
            precision = static_cast<double>(matches) / static_cast<double>(total);
        } else if (matches == 0) {
            // add-one smoothing for sparse higher-order matches
            precision = 1.0 / static_cast<double>(total + 1);
        } else {
            precision = static_cast<double>(matches) / static_cast<double>(total);
        }
        log_precision_sum += std::log(precision);
    }
    const double geo_mean = std::exp(log_precision_sum / static_cast<double>(n_max));
    double brevity = 1.0;
    if (cand.size() < ref_len) {
        brevity = std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(cand.size()));
    }
    return brevity * geo_mean;
}

std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    if (a.empty() || b.empty()) return 0;
    std::vector<std::size_t> prev(b.size() + 1, 0);
    std::vector<std::size_t> curr(b.size() + 1, 0);
    for (std::size_t i = 1; i <= a.size(); ++i) {
        for (std::size_t j = 1; j <= b.size(); ++j) {
            if (a[i - 1] == b[j - 1]) {
                curr[j] = prev[j - 1] + 1;
            } else {
                curr[j] = std::max(prev[j], curr[j - 1]);
            }
        }
        std::swap(prev, curr);
    }
    return prev[b.size()];
}

RougeL rouge_l(const std::string& candidate, const std::string& reference) {
    const auto cand = tokenize_for_metrics(candidate);
    const auto ref = tokenize_for_metrics(reference);
    RougeL out;
    if (cand.empty() || ref.empty()) return out;
    const double lcs = static_cast<double>(lcs_length(cand, ref));
    out.precision = lcs / static_cast<double>(cand.size());
    out.recall = lcs / static_cast<double>(ref.size());
    if (out.precision + out.recall > 0.0) {
        out.f_score = 2.0 * out.precision * out.recall / (out.precision + out.recall);
    }
    return out;
}

// ---------------------------------------------------------------------------
// reports
// ---------------------------------------------------------------------------

std::string MetricReport::to_json() const {
    json j;
    j["label"] = label;
    j["values"] = json::object();
    for (const auto& [name, value] : values) j["values"][name] = value;
    j["config"] = json::object();
    for (const auto& [name, value] : config) j["config"][name] = value;
    return j.dump(2);
}

MetricReport MetricReport::from_json_text(const std::string& text, const std::string& origin) {
    MetricReport report;
    try {
        const json j = json::parse(text);
        report.label = j.value("label", "");
        if (j.contains("values")) {
            for (const auto& [name, value] : j.at("values").items()) {
                report.values[name] = value.get<double>();
            }
        }
        if (j.contains("config")) {
            for (const auto& [name, value] : j.at("config").items()) {
                report.config[name] = value.is_string() ? value.get<std::string>() : value.dump();
            }
        }
    } catch (const json::exception& e) {
        throw InputError(origin + ": invalid metric report: " + e.what());
    }
    return report;
}

void write_metric_report(const std::string& path, const MetricReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open metric report for writing: " + path);
    out << report.to_json() << "\n";
    if (!out.good()) throw InputError("failed writing " + path);
}

MetricReport load_metric_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open metric report: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return MetricReport::from_json_text(ss.str(), path);
}

std::string metrics_comparison_csv(const std::vector<MetricReport>& reports) {
    if (reports.empty()) throw InputError("report: no metric files given");
    std::set<std::string> metric_names;
    for (const auto& r : reports) {
        for (const auto& [name, _] : r.values) metric_names.insert(name);
    }
    std::ostringstream out;
    out << "metric";
    for (const auto& r : reports) out << "," << r.label;
    out << "\n";
    for (const auto& name : metric_names) {
        out << name;
        for (const auto& r : reports) {
            auto it = r.values.find(name);
            out << ",";
            if (it != r.values.end()) out << format_double(it->second);
        }
        out << "\n";
    }
    return out.str();
}

}  // namespace conceptgen
