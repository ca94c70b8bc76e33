#pragma once

// Per-trial random streams.
//
// Every trial owns one engine seeded from (master seed, experiment name,
// trial index), so a trial's draws do not depend on which worker runs it or
// in what order:
//
//   tag  = FNV-1a-64(experiment name)
//   seed = splitmix64(splitmix64(master ^ tag) + trial * 0x9E3779B97F4A7C15)
//
// splitmix64 is the finalizer of Steele, Lea & Flood's SplittableRandom.

#include <cstdint>
#include <string_view>

#include <boost/random/mersenne_twister.hpp>

namespace aqst {

using Rng = boost::random::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;
std::uint64_t derive_seed(std::uint64_t master, std::string_view experiment, std::uint64_t trial) noexcept;

inline Rng make_trial_rng(std::uint64_t master, std::string_view experiment, std::uint64_t trial) {
  return Rng(derive_seed(master, experiment, trial));
}

}  // namespace aqst
