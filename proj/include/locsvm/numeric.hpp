#ifndef LOCSVM_NUMERIC_HPP
#define LOCSVM_NUMERIC_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace locsvm {

/// Pairwise (tree) summation with a fixed topology. Accumulation error grows
/// like O(log n) instead of O(n), and the result does not depend on any
/// scheduling decision, only on the order of the input.
inline double pairwise_sum(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  if (n <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t count = 0;
};

/// Sample mean and standard error of the mean.
inline MeanStderr mean_and_stderr(std::span<const double> values) {
  MeanStderr r;
  r.count = values.size();
  if (r.count == 0) return r;
  r.mean = pairwise_sum(values) / static_cast<double>(r.count);
  if (r.count == 1) return r;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double d = values[i] - r.mean;
    sq[i] = d * d;
  }
  const double var =
      pairwise_sum(sq) / static_cast<double>(r.count - 1);
  r.stderr_ = std::sqrt(var / static_cast<double>(r.count));
  return r;
}

/// Median of a sample (copies, does not reorder the input).
inline double median(std::vector<double> values) {
  if (values.empty()) return 0.0;
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return (n % 2 == 1) ? values[n / 2]
                      : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

/// SplitMix64 step; used to derive independent RNG streams from
/// (master seed, stream index) so results are independent of scheduling.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  return splitmix64(splitmix64(master) ^ splitmix64(~stream));
}

inline std::mt19937_64 make_rng(std::uint64_t master, std::uint64_t stream) {
  return std::mt19937_64(derive_seed(master, stream));
}

/// Radical-inverse (van der Corput) value of index i in the given base.
inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv_base = 1.0 / static_cast<double>(base);
  double inv = inv_base;
  double value = 0.0;
  while (i > 0) {
    value += static_cast<double>(i % base) * inv;
    i /= base;
    inv *= inv_base;
  }
  return value;
}

/// Deterministic Halton point set in [0,1]^d, bases 2, 3, 5, 7, ...
/// Used for low-discrepancy evaluation grids.
inline std::vector<std::vector<double>> halton_points(std::size_t count,
                                                      std::size_t dim) {
  static constexpr std::uint64_t primes[] = {2, 3, 5, 7, 11, 13, 17, 19};
  std::vector<std::vector<double>> pts(count, std::vector<double>(dim));
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < dim; ++j)
      pts[i][j] = radical_inverse(i + 1, primes[j % 8]);
  return pts;
}

/// FNV-1a 64-bit hash; stable across platforms, used to stamp reports with a
/// reproducible fingerprint of the configuration document.
inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace locsvm

#endif  // LOCSVM_NUMERIC_HPP
