#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace conceptgen {

// 64-bit FNV-1a. Stable across platforms, used for artifact fingerprints
// (taxonomy hash, model hash, manifest hash), not for security.
constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

inline std::uint64_t fnv1a64(const void* data, std::size_t size,
                             std::uint64_t seed = kFnvOffset) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < size; ++i) {
        h ^= bytes[i];
        h *= kFnvPrime;
    }
    return h;
}

inline std::uint64_t fnv1a64(std::string_view text, std::uint64_t seed = kFnvOffset) {
    return fnv1a64(text.data(), text.size(), seed);
}

std::string hash_hex(std::uint64_t h);

// FNV-1a of a file's raw bytes, rendered as 16 hex digits.
// Throws InputError if the file cannot be read.
std::string hash_file_hex(const std::string& path);

}  // namespace conceptgen
