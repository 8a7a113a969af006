#include "conceptgen/hash.hpp"

#include <array>
#include <fstream>

#include "conceptgen/errors.hpp"

namespace conceptgen {

std::string hash_hex(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xF];
        h >>= 4;
    }
    return out;
}

std::string hash_file_hex(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot read file for hashing: " + path);
    std::uint64_t h = kFnvOffset;
    std::array<char, 65536> buf{};
    while (in.read(buf.data(), static_cast<std::streamsize>(buf.size())) || in.gcount() > 0) {
        h = fnv1a64(buf.data(), static_cast<std::size_t>(in.gcount()), h);
    }
    return hash_hex(h);
}

}  // namespace conceptgen
