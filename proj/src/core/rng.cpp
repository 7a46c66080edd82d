#include "core/rng.hpp"

#include <cmath>

namespace lintm {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

Rng Rng::fork(std::uint64_t stream_id) const {
  return Rng(splitmix64(seed_ ^ splitmix64(stream_id)));
}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::int64_t Rng::next_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw ConfigError("Rng::next_int: empty range");
  const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Modulo bias is negligible for the small ranges used here.
  return lo + static_cast<std::int64_t>(next_u64() % span);
}

double Rng::next_normal() {
  // Box-Muller; u1 nudged away from 0 so the log is finite.
  double u1 = next_uniform();
  double u2 = next_uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

DenseArray Rng::sample_standard_normal(std::vector<std::size_t> shape) {
  DenseArray out(std::move(shape));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = next_normal();
  return out;
}

std::size_t Rng::sample_categorical(const DenseArray& p) {
  if (p.ndim() != 1 || p.size() == 0) {
    throw DimensionError("sample_categorical: expected nonempty 1-D input");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0.0) throw DistributionError("sample_categorical: negative entry");
    sum += p[i];
  }
  if (std::abs(sum - 1.0) > 1e-9) {
    throw DistributionError("sample_categorical: probabilities do not sum to 1");
  }
  const double u = next_uniform() * sum;
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    acc += p[i];
    if (u < acc) return i;
  }
  // Rounding can push u past the running total; return last nonzero entry.
  for (std::size_t i = p.size(); i-- > 0;) {
    if (p[i] > 0.0) return i;
  }
  return p.size() - 1;
}

void Rng::shuffle(std::vector<std::size_t>& idx) {
  for (std::size_t i = idx.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(next_u64() % i);
    std::swap(idx[i - 1], idx[j]);
  }
}

}  // namespace lintm
