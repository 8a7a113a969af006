#include "conceptgen/taxonomy.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "conceptgen/errors.hpp"
#include "conceptgen/hash.hpp"
#include "conceptgen/text.hpp"

namespace conceptgen {

using json = nlohmann::json;

std::size_t AttributeVector::popcount() const {
    std::size_t n = 0;
    for (auto b : bits) n += b != 0 ? 1 : 0;
    return n;
}

std::string AttributeVector::key() const {
    std::string k(bits.size(), '0');
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i] != 0) k[i] = '1';
    }
    return k;
}

ConceptTaxonomy ConceptTaxonomy::build(const std::map<std::string, std::set<std::string>>& groups) {
    if (groups.empty()) throw InputError("taxonomy has no categories");
    ConceptTaxonomy t;
    // std::map/std::set iterate sorted, so the indexing below is the
    // lexicographic order the file format promises.
    for (const auto& [category, attributes] : groups) {
        if (attributes.empty()) {
            throw InputError("taxonomy category '" + category + "' has no attributes");
        }
        Category cat;
        cat.name = category;
        for (const auto& attribute : attributes) {
            if (t.attribute_index_.count(attribute) != 0) {
                throw InputError("attribute '" + attribute +
                                 "' appears in more than one taxonomy category");
            }
            const std::size_t index = t.index_to_attribute_.size();
            t.attribute_index_.emplace(attribute, index);
            t.attribute_category_.emplace(attribute, t.categories_.size());
            t.index_to_attribute_.push_back(attribute);
            cat.attributes.push_back(attribute);
        }
        t.categories_.push_back(std::move(cat));
    }
    return t;
}

bool ConceptTaxonomy::contains(const std::string& attribute) const {
    return attribute_index_.count(attribute) != 0;
}

std::size_t ConceptTaxonomy::index_of(const std::string& attribute) const {
    auto it = attribute_index_.find(attribute);
    if (it == attribute_index_.end()) {
        throw InputError("attribute not in taxonomy: '" + attribute + "'");
    }
    return it->second;
}

const std::string& ConceptTaxonomy::attribute_at(std::size_t index) const {
    if (index >= index_to_attribute_.size()) {
        throw InputError("attribute index " + std::to_string(index) + " out of range (D=" +
                         std::to_string(index_to_attribute_.size()) + ")");
    }
    return index_to_attribute_[index];
}

std::size_t ConceptTaxonomy::category_index_of(const std::string& attribute) const {
    auto it = attribute_category_.find(attribute);
    if (it == attribute_category_.end()) {
        throw InputError("attribute not in taxonomy: '" + attribute + "'");
    }
    return it->second;
}

const std::string& ConceptTaxonomy::category_of(const std::string& attribute) const {
    return categories_[category_index_of(attribute)].name;
}

std::string ConceptTaxonomy::hash() const {
    std::uint64_t h = kFnvOffset;
    for (const auto& cat : categories_) {
        h = fnv1a64(cat.name, h);
        h = fnv1a64("\x1d", h);
        for (const auto& attr : cat.attributes) {
            h = fnv1a64(attr, h);
            h = fnv1a64("\x1e", h);
        }
    }
    return hash_hex(h);
}

std::map<std::string, std::size_t> extract_tags(const std::vector<SourceRecord>& corpus) {
    if (corpus.empty()) throw InputError("extract_tags: corpus is empty");
    std::map<std::string, std::size_t> counts;
    for (const auto& record : corpus) {
        for (const auto& raw : record.raw_tags) {
            const std::string tag = normalize_tag(raw);
            if (!tag.empty()) counts[tag] += 1;
        }
    }
    return counts;
}

std::optional<std::string> canonicalize(const std::string& tag, const ConceptTaxonomy& taxonomy,
                                        const SynonymMap& synonyms) {
    std::string normalized = normalize_tag(tag);
    if (normalized.empty()) return std::nullopt;
    auto syn = synonyms.find(normalized);
    if (syn != synonyms.end()) normalized = syn->second;
    if (taxonomy.contains(normalized)) return normalized;
    return std::nullopt;
}

namespace {

// Function words that make a trailing fragment read as incomplete.
const std::set<std::string>& trailing_function_words() {
    static const std::set<std::string> words = {
        "a", "an", "and", "are", "as",  "at", "but", "by",  "for", "from", "in",
        "is", "of", "on",  "or",  "the", "to", "was", "were", "with",
    };
    return words;
}

}  // namespace

bool caption_is_clear(const std::string& caption, const DistillCriteria& criteria) {
    if (word_count(caption) < criteria.min_caption_words) return false;
    if (printable_ratio(caption) < criteria.min_printable_ratio) return false;
    const std::string trimmed = trim(caption);
    if (trimmed.empty()) return false;
    const char last = trimmed.back();
    if (last == '.' || last == '!' || last == '?') return true;
    // No terminal punctuation: accept complete noun phrases, i.e. anything
    // that does not trail off on a function word.
    const auto tokens = tokenize_for_metrics(trimmed);
    if (tokens.empty()) return false;
    return trailing_function_words().count(tokens.back()) == 0;
}

DistillResult distill(const std::vector<SourceRecord>& corpus, const ConceptTaxonomy& taxonomy,
                      const SynonymMap& synonyms, const DistillCriteria& criteria) {
    DistillResult result;
    for (const auto& record : corpus) {
        std::set<std::string> attributes;
        for (const auto& raw : record.raw_tags) {
            auto canonical = canonicalize(raw, taxonomy, synonyms);
            if (canonical.has_value()) {
                attributes.insert(*canonical);
            } else {
                const std::string normalized = normalize_tag(raw);
                if (!normalized.empty()) result.unmapped_tags[normalized] += 1;
            }
        }
        if (attributes.size() < criteria.min_attributes) {
            result.rejections.too_few_attributes += 1;
            continue;
        }
        if (attributes.size() > criteria.max_attributes) {
            result.rejections.too_many_attributes += 1;
            continue;
        }
        std::set<std::size_t> category_indices;
        for (const auto& attr : attributes) {
            category_indices.insert(taxonomy.category_index_of(attr));
        }
        if (category_indices.size() < criteria.min_categories) {
            result.rejections.too_few_categories += 1;
            continue;
        }
        if (word_count(record.caption) < criteria.min_caption_words) {
            result.rejections.caption_too_short += 1;
            continue;
        }
        if (printable_ratio(record.caption) < criteria.min_printable_ratio) {
            result.rejections.caption_low_printable += 1;
            continue;
        }
        if (!caption_is_clear(record.caption, criteria)) {
            result.rejections.caption_not_clear += 1;
            continue;
        }
        DistilledRecord out;
        out.id = record.id;
        out.caption = record.caption;
        out.attributes = std::move(attributes);
        out.category_coverage = category_indices.size();
        result.records.push_back(std::move(out));
    }
    return result;
}

bool satisfies_criteria(const DistilledRecord& record, const DistillCriteria& criteria) {
    if (record.attributes.size() < criteria.min_attributes) return false;
    if (record.attributes.size() > criteria.max_attributes) return false;
    if (record.category_coverage < criteria.min_categories) return false;
    return caption_is_clear(record.caption, criteria);
}

AttributeVector encode_multihot(const std::set<std::string>& attributes,
                                const ConceptTaxonomy& taxonomy) {
    AttributeVector vec(taxonomy.dimension());
    for (const auto& attr : attributes) {
        vec.bits[taxonomy.index_of(attr)] = 1;
    }
    return vec;
}

std::set<std::string> decode_multihot(const AttributeVector& vec,
                                      const ConceptTaxonomy& taxonomy) {
    if (vec.size() != taxonomy.dimension()) {
        throw InputError("attribute vector length " + std::to_string(vec.size()) +
                         " does not match taxonomy dimension " +
                         std::to_string(taxonomy.dimension()));
    }
    std::set<std::string> attributes;
    for (std::size_t i = 0; i < vec.size(); ++i) {
        if (vec.bits[i] != 0) attributes.insert(taxonomy.attribute_at(i));
    }
    return attributes;
}

// ---------------------------------------------------------------------------
// file formats
// ---------------------------------------------------------------------------

namespace {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

ConceptTaxonomy parse_taxonomy_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::set<std::string>> groups;
    std::istringstream in(text);
    std::string line;
    std::string current_category;
    std::size_t line_no = 0;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']') {
                throw InputError(origin + ":" + std::to_string(line_no) +
                                 ": malformed category header '" + stripped + "'");
            }
            current_category = normalize_tag(stripped.substr(1, stripped.size() - 2));
            if (current_category.empty()) {
                throw InputError(origin + ":" + std::to_string(line_no) +
                                 ": empty category name");
            }
            groups[current_category];
            continue;
        }
        if (current_category.empty()) {
            throw InputError(origin + ":" + std::to_string(line_no) +
                             ": attribute before any [category] header");
        }
        const std::string attribute = normalize_tag(stripped);
        if (!seen.insert(attribute).second) {
            throw InputError(origin + ":" + std::to_string(line_no) + ": duplicate attribute '" +
                             attribute + "'");
        }
        groups[current_category].insert(attribute);
    }
    if (groups.empty()) throw InputError(origin + ": no categories found");
    return ConceptTaxonomy::build(groups);
}

ConceptTaxonomy load_taxonomy_file(const std::string& path) {
    return parse_taxonomy_text(read_text_file(path), path);
}

SynonymMap parse_synonym_text(const std::string& text, const std::string& origin) {
    SynonymMap map;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') continue;
        const std::size_t arrow = stripped.find("=>");
        if (arrow == std::string::npos) {
            throw InputError(origin + ":" + std::to_string(line_no) +
                             ": expected 'variant => canonical', got '" + stripped + "'");
        }
        const std::string variant = normalize_tag(stripped.substr(0, arrow));
        const std::string canonical = normalize_tag(stripped.substr(arrow + 2));
        if (variant.empty() || canonical.empty()) {
            throw InputError(origin + ":" + std::to_string(line_no) +
                             ": empty side in synonym entry");
        }
        map[variant] = canonical;
    }
    return map;
}

SynonymMap load_synonym_file(const std::string& path) {
    return parse_synonym_text(read_text_file(path), path);
}

std::vector<SourceRecord> load_corpus_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus: " + path);
    std::vector<SourceRecord> corpus;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(line_no) + ": invalid JSON: " +
                             e.what());
        }
        SourceRecord record;
        try {
            record.id = j.at("id").get<std::string>();
            record.caption = j.at("caption").get<std::string>();
            for (const auto& tag : j.at("tags")) {
                record.raw_tags.push_back(tag.get<std::string>());
            }
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(line_no) +
                             ": expected fields id/caption/tags: " + e.what());
        }
        if (!ids.insert(record.id).second) {
            throw InputError(path + ":" + std::to_string(line_no) + ": duplicate record id '" +
                             record.id + "'");
        }
        corpus.push_back(std::move(record));
    }
    return corpus;
}

void write_distilled_jsonl(const std::string& path, const std::vector<DistilledRecord>& records) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw InputError("cannot open output: " + path);
    for (const auto& record : records) {
        json j;
        j["id"] = record.id;
        j["caption"] = record.caption;
        j["attributes"] = record.attributes;
        j["categories"] = record.category_coverage;
        out << j.dump() << "\n";
    }
    if (!out.good()) throw InputError("failed writing " + path);
}

std::vector<DistilledRecord> load_distilled_jsonl(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open distilled records: " + path);
    std::vector<DistilledRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        json j;
        try {
            j = json::parse(line);
            DistilledRecord record;
            record.id = j.at("id").get<std::string>();
            record.caption = j.at("caption").get<std::string>();
            for (const auto& attr : j.at("attributes")) {
                record.attributes.insert(attr.get<std::string>());
            }
            record.category_coverage = j.at("categories").get<std::size_t>();
            records.push_back(std::move(record));
        } catch (const json::exception& e) {
            throw InputError(path + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return records;
}

}  // namespace conceptgen
