#ifndef GEOSAT_RNG_HPP
#define GEOSAT_RNG_HPP

#include <cstdint>
#include <random>

namespace geosat {

/// SplitMix64 output function (Steele, Lea, Flood). Applied to
/// `state + golden` it reproduces the reference generator's stream.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept
{
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

/// Seed of trial `index` under `master_seed`. Equal to the (index+1)-th
/// output of a reference SplitMix64 generator started at `master_seed`.
constexpr std::uint64_t substream_seed(std::uint64_t master_seed, std::uint64_t index) noexcept
{
  return splitmix64_mix(master_seed + (index + 1) * kGolden);
}

/// Single-owner random stream. Parallel callers take disjoint substreams.
class RngStream {
public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0) : seed_(seed), engine_(seed) {}

  static RngStream substream(std::uint64_t master_seed, std::uint64_t index)
  {
    return RngStream(substream_seed(master_seed, index));
  }

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const noexcept { return seed_; }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer on [0, bound).
  std::uint64_t below(std::uint64_t bound)
  {
    return std::uniform_int_distribution<std::uint64_t>(0, bound - 1)(engine_);
  }

  std::int64_t poisson(double mean)
  {
    if (mean <= 0.0) return 0;
    return std::poisson_distribution<std::int64_t>(mean)(engine_);
  }

  std::int64_t binomial(std::int64_t trials, double p)
  {
    if (trials <= 0 || p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    return std::binomial_distribution<std::int64_t>(trials, p)(engine_);
  }

  bool coin() { return (engine_() >> 63) != 0; }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

} // namespace geosat

#endif // GEOSAT_RNG_HPP
