#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

namespace conceptgen {

// Multi-hot attribute vector x in {0,1}^D indexed by the taxonomy.
struct AttributeVector {
    std::vector<std::uint8_t> bits;

    AttributeVector() = default;
    explicit AttributeVector(std::size_t dim) : bits(dim, 0) {}

    std::size_t size() const { return bits.size(); }
    std::size_t popcount() const;
    // Stable string key for dedup / diversity counting.
    std::string key() const;

    bool operator==(const AttributeVector& other) const { return bits == other.bits; }
};

// The attribute vocabulary grouped into semantic categories. Categories and
// attributes are kept in lexicographic order, which fixes the dimension
// indexing deterministically.
class ConceptTaxonomy {
public:
    struct Category {
        std::string name;
        std::vector<std::string> attributes;  // sorted
    };

    // Builds from (category -> attributes); names are normalized and sorted.
    // Throws InputError on duplicate attributes or empty input.
    static ConceptTaxonomy build(const std::map<std::string, std::set<std::string>>& groups);

    const std::vector<Category>& categories() const { return categories_; }
    std::size_t dimension() const { return index_to_attribute_.size(); }

    bool contains(const std::string& attribute) const;
    std::size_t index_of(const std::string& attribute) const;          // throws InputError
    const std::string& attribute_at(std::size_t index) const;         // throws InputError
    const std::string& category_of(const std::string& attribute) const;
    std::size_t category_index_of(const std::string& attribute) const;

    // Canonical digest of the category/attribute structure; any edit to the
    // taxonomy file changes this hash, which every downstream artifact carries.
    std::string hash() const;

private:
    std::vector<Category> categories_;
    std::unordered_map<std::string, std::size_t> attribute_index_;
    std::unordered_map<std::string, std::size_t> attribute_category_;
    std::vector<std::string> index_to_attribute_;
};

// One row of the tagged source corpus.
struct SourceRecord {
    std::string id;
    std::string caption;
    std::vector<std::string> raw_tags;
};

// A record that survived distillation.
struct DistilledRecord {
    std::string id;
    std::string caption;
    std::set<std::string> attributes;  // canonical names
    std::size_t category_coverage = 0;
};

using SynonymMap = std::unordered_map<std::string, std::string>;

struct DistillCriteria {
    std::size_t min_categories = 3;
    std::size_t min_caption_words = 15;
    std::size_t min_attributes = 3;
    std::size_t max_attributes = 15;
    double min_printable_ratio = 0.95;
};

struct RejectionTally {
    std::size_t too_few_attributes = 0;
    std::size_t too_many_attributes = 0;
    std::size_t too_few_categories = 0;
    std::size_t caption_too_short = 0;
    std::size_t caption_low_printable = 0;
    std::size_t caption_not_clear = 0;

    std::size_t total() const {
        return too_few_attributes + too_many_attributes + too_few_categories +
               caption_too_short + caption_low_printable + caption_not_clear;
    }
};

struct DistillResult {
    std::vector<DistilledRecord> records;
    RejectionTally rejections;
    // Normalized tags seen in the corpus that mapped to no attribute.
    std::map<std::string, std::size_t> unmapped_tags;
};

// Frequency table of normalized tags over the corpus. Empty corpus rejected.
std::map<std::string, std::size_t> extract_tags(const std::vector<SourceRecord>& corpus);

// normalize -> synonym fold -> taxonomy membership; nullopt if unmapped.
std::optional<std::string> canonicalize(const std::string& tag, const ConceptTaxonomy& taxonomy,
                                        const SynonymMap& synonyms);

// Heuristic for "clear, grammatically sound" captions: enough words, mostly
// printable, and either terminal punctuation or a content word at the end.
bool caption_is_clear(const std::string& caption, const DistillCriteria& criteria);

DistillResult distill(const std::vector<SourceRecord>& corpus, const ConceptTaxonomy& taxonomy,
                      const SynonymMap& synonyms, const DistillCriteria& criteria);

// Re-validates one distilled record against criteria (a distill output must
// always pass the criteria it was produced under).
bool satisfies_criteria(const DistilledRecord& record, const DistillCriteria& criteria);

AttributeVector encode_multihot(const std::set<std::string>& attributes,
                                const ConceptTaxonomy& taxonomy);
std::set<std::string> decode_multihot(const AttributeVector& vec,
                                      const ConceptTaxonomy& taxonomy);

// --------------------------------------------------------------------------
// file formats
// --------------------------------------------------------------------------

// Taxonomy file: "[category]" section headers, one attribute per line,
// '#' comments and blank lines ignored.
ConceptTaxonomy load_taxonomy_file(const std::string& path);
ConceptTaxonomy parse_taxonomy_text(const std::string& text, const std::string& origin);

// Synonym file: "variant => canonical" lines, '#' comments.
SynonymMap load_synonym_file(const std::string& path);
SynonymMap parse_synonym_text(const std::string& text, const std::string& origin);

// Source corpus: JSON-lines {"id", "caption", "tags": [...]}. Malformed lines
// raise InputError with line numbers; duplicate ids are rejected.
std::vector<SourceRecord> load_corpus_jsonl(const std::string& path);

void write_distilled_jsonl(const std::string& path, const std::vector<DistilledRecord>& records);
std::vector<DistilledRecord> load_distilled_jsonl(const std::string& path);

}  // namespace conceptgen
