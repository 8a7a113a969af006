#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace conceptgen {

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);

// Collapses runs of whitespace to single spaces and trims the ends.
std::string collapse_whitespace(std::string_view s);

// lowercase + trim + collapse internal whitespace; the normal form used for
// tags, attribute names and synonym lookups.
std::string normalize_tag(std::string_view s);

// Frozen metric tokenization: lowercase, every non-alphanumeric byte becomes
// a separator, split on whitespace. Shared by BLEU / ROUGE-L so scores are
// comparable across runs.
std::vector<std::string> tokenize_for_metrics(std::string_view s);

// Whitespace-split word count (caption length checks).
std::size_t word_count(std::string_view s);

// Fraction of bytes that are printable; bytes >= 0x80 count as printable so
// UTF-8 text is not penalized.
double printable_ratio(std::string_view s);

// Deterministic shortest round-trip formatting for doubles (CSV output).
std::string format_double(double v);

}  // namespace conceptgen
