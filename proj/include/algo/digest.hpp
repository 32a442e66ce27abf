#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace algo {

// Lowercase hex SHA-256 of `data`.
std::string sha256_hex(std::string_view data);

// Splittable seed derivation: the first 63 bits of sha256("<seed>:<label>").
std::uint64_t derive_seed(std::uint64_t seed, std::string_view label);

}  // namespace algo
