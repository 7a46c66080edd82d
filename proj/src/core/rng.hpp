#pragma once

#include <cstdint>
#include <random>

#include "core/array.hpp"

namespace lintm {

// Deterministic PRNG. Each concern of an experiment (parameter init,
// shuffling, noise draws, ...) owns its own stream, derived with fork(),
// so toggling one consumer never perturbs another.
//
// The engine is mt19937_64 whose output sequence the C++ standard pins
// down; uniform/normal transforms are implemented here rather than with
// std::*_distribution so sequences are identical across standard
// libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Independent stream derived from this generator's seed and a stream id.
  Rng fork(std::uint64_t stream_id) const;

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double next_uniform();
  // Uniform integer on [lo, hi] inclusive.
  std::int64_t next_int(std::int64_t lo, std::int64_t hi);
  // Standard normal via Box-Muller (two uniforms per draw, no caching).
  double next_normal();

  DenseArray sample_standard_normal(std::vector<std::size_t> shape);
  // Inverse-CDF draw from a probability vector.
  std::size_t sample_categorical(const DenseArray& p);

  // Fisher-Yates shuffle of an index vector.
  void shuffle(std::vector<std::size_t>& idx);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// SplitMix64 mixing step, used for seed derivation.
std::uint64_t splitmix64(std::uint64_t x);

}  // namespace lintm
