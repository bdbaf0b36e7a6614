#include "repomech/hashing.hpp"

#include <openssl/evp.h>

#include "repomech/errors.hpp"

namespace repomech::hashing {

Digest sha256(std::string_view bytes) {
    Digest out{};
    unsigned int n = 0;
    EVP_Digest(bytes.data(), bytes.size(), out.data(), &n, EVP_sha256(), nullptr);
    return out;
}

Digest tagged(std::string_view tag, std::initializer_list<std::string_view> parts) {
    std::string buf;
    size_t total = tag.size();
    for (const auto& p : parts) total += p.size();
    buf.reserve(total);
    buf.append(tag);
    for (const auto& p : parts) buf.append(p);
    return sha256(buf);
}

std::string hex(const Digest& d) {
    static const char* k = "0123456789abcdef";
    std::string out;
    out.reserve(64);
    for (unsigned char b : d) {
        out.push_back(k[b >> 4]);
        out.push_back(k[b & 0xf]);
    }
    return out;
}

namespace {
// Canonical form only: serialized digests are lowercase, and accepting a
// second spelling would let two distinct byte strings decode to the same
// digest (unverifiable malleability in transcripts).
int nibble(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    return -1;
}
}  // namespace

Digest unhex(std::string_view h) {
    if (h.size() != 64) throw Error("hex digest must be 64 characters");
    Digest out{};
    for (size_t i = 0; i < 32; ++i) {
        int hi = nibble(h[2 * i]);
        int lo = nibble(h[2 * i + 1]);
        if (hi < 0 || lo < 0) throw Error("malformed hex digest");
        out[i] = static_cast<unsigned char>((hi << 4) | lo);
    }
    return out;
}

}  // namespace repomech::hashing
