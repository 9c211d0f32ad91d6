#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace ists {

/// Hex SHA-256 digest.
std::string sha256_hex(std::string_view data);

/// Stable 64-bit seed derived from a label and a base seed.
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

/// Seeded generator. Bounded integers use rejection sampling so the
/// sequence does not depend on the standard library's distribution code.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double normal() { return normal_(engine_); }
    double uniform() { return std::generate_canonical<double, 53>(engine_); }
    std::uint64_t next() { return engine_(); }
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ists
