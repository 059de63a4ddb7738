#pragma once

#include <cstdint>
#include <random>

#include "linalg.hpp"

namespace sqd {

using Rng = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x);

// Independent stream for replication `index` under `master`; the result does
// not depend on how many other streams were drawn before it.
Rng stream_rng(std::uint64_t master, std::uint64_t index);

// Uniform on [0, 1) with 53 random bits; portable across standard libraries.
double uniform01(Rng& rng);

double exponential1(Rng& rng);

// Inverse-CDF draw from a probability vector.
std::size_t draw_index(const Vec& probs, Rng& rng);

}  // namespace sqd
