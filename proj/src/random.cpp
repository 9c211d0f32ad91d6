#include "ists/random.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include <limits>

#include "ists/error.hpp"

namespace ists {

namespace {
std::array<unsigned char, 32> sha256_raw(std::string_view data) {
    std::array<unsigned char, 32> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1)
        throw Error(ErrorCode::Backend, "sha256 failed");
    return digest;
}
}  // namespace

std::string sha256_hex(std::string_view data) {
    auto digest = sha256_raw(data);
    std::string out;
    out.reserve(64);
    char buf[3];
    for (unsigned char b : digest) {
        std::snprintf(buf, sizeof buf, "%02x", b);
        out += buf;
    }
    return out;
}

std::uint64_t derive_seed(std::uint64_t base, std::string_view label) {
    std::string material = std::to_string(base);
    material += '/';
    material += label;
    auto digest = sha256_raw(material);
    std::uint64_t seed = 0;
    for (int i = 0; i < 8; ++i) seed = (seed << 8) | digest[i];
    return seed;
}

std::uint64_t Rng::below(std::uint64_t bound) {
    require(bound > 0, "Rng::below needs a positive bound");
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t v = engine_();
    while (v >= limit) v = engine_();
    return v % bound;
}

}  // namespace ists
