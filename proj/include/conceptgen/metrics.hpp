#pragma once

#include <map>
#include <string>
#include <vector>

#include "conceptgen/taxonomy.hpp"

namespace conceptgen {

// Intersection-over-union of two multi-hot vectors. Two all-zero vectors
// agree perfectly on absence and score 1.0.
double jaccard(const AttributeVector& x, const AttributeVector& y);

// Mean element-wise disagreement, in [0,1].
double hamming(const AttributeVector& x, const AttributeVector& y);

// Fraction of distinct vectors in a batch.
double diversity(const std::vector<AttributeVector>& batch);

// Symmetric D x D pairwise count matrix; diagonal holds marginal counts.
struct CooccurrenceMatrix {
    std::size_t dim = 0;
    std::vector<double> values;  // row-major D x D

    CooccurrenceMatrix() = default;
    explicit CooccurrenceMatrix(std::size_t d) : dim(d), values(d * d, 0.0) {}

    double& at(std::size_t i, std::size_t j) { return values[i * dim + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * dim + j]; }
};

CooccurrenceMatrix cooccurrence(const std::vector<AttributeVector>& dataset);

// Cosine similarity of the flattened strict upper triangles (diagonal
// excluded so marginal popularity does not dominate pairwise structure).
// Scale-invariant; throws NumericError when either triangle is all zero.
double cooccurrence_cosine(const CooccurrenceMatrix& a, const CooccurrenceMatrix& b);

// BLEU with clipped n-gram precisions up to max_n (capped at the candidate
// length), brevity penalty against the closest reference length, and add-one
// smoothing on zero-match higher-order precisions.
double bleu(const std::string& candidate, const std::vector<std::string>& references,
            std::size_t max_n = 4);

struct RougeL {
    double precision = 0.0;
    double recall = 0.0;
    double f_score = 0.0;
};

RougeL rouge_l(const std::string& candidate, const std::string& reference);

// Length of the longest common subsequence of two token streams.
std::size_t lcs_length(const std::vector<std::string>& a, const std::vector<std::string>& b);

// Named metric values plus the sample counts and configuration they came
// from; serializes to JSON and to a flat CSV row.
struct MetricReport {
    std::string label;
    std::map<std::string, double> values;
    std::map<std::string, std::string> config;

    void set(const std::string& name, double value) { values[name] = value; }

    std::string to_json() const;
    static MetricReport from_json_text(const std::string& text, const std::string& origin);
};

void write_metric_report(const std::string& path, const MetricReport& report);
MetricReport load_metric_report(const std::string& path);

// Joins several reports into one comparison table: one metric per row, one
// column per report label.
std::string metrics_comparison_csv(const std::vector<MetricReport>& reports);

}  // namespace conceptgen
