#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace quip {

// Stable across processes and platforms; the mocks depend on that.
std::uint64_t fnv1a64(std::string_view data, std::uint64_t basis = 0xcbf29ce484222325ULL);
std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t mix(std::uint64_t a, std::uint64_t b);
std::string hex64(std::uint64_t value);

// Uniform double in [-1, 1] from a splitmix stream.
double unit_signed(std::uint64_t& state);

}  // namespace quip
