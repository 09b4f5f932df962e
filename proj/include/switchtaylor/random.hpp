#pragma once

#include <cstdint>
#include <random>

namespace switchtaylor {

using Engine = std::mt19937_64;

/// splitmix64 finaliser; used to decorrelate derived seeds.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Independent sub-streams of one Monte Carlo path.
enum class Stream : std::uint64_t { Chain = 1, Brownian = 2, Bridge = 3 };

/// Seed for `stream` of path `path_index` under `experiment_seed`. Pure
/// function of its arguments, so parallel runs reproduce serial ones.
constexpr std::uint64_t derive_seed(std::uint64_t experiment_seed,
                                    std::uint64_t path_index,
                                    Stream stream) noexcept {
  return mix64(mix64(mix64(experiment_seed) ^ path_index) +
               static_cast<std::uint64_t>(stream));
}

inline Engine make_engine(std::uint64_t experiment_seed, std::uint64_t path_index,
                          Stream stream) {
  return Engine(derive_seed(experiment_seed, path_index, stream));
}

}  // namespace switchtaylor
