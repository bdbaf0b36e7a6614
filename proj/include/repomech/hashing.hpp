#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

namespace repomech::hashing {

using Digest = std::array<unsigned char, 32>;

Digest sha256(std::string_view bytes);

// Domain-separated hash: H(tag || part_0 || part_1 || ...). Every use of
// the hash in this codebase goes through a distinct tag so preimages from
// one context can never be replayed in another.
Digest tagged(std::string_view tag, std::initializer_list<std::string_view> parts);

std::string hex(const Digest& d);
Digest unhex(std::string_view h);  // throws on malformed input

inline std::string_view view(const Digest& d) {
    return {reinterpret_cast<const char*>(d.data()), d.size()};
}

}  // namespace repomech::hashing
