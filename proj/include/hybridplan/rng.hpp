#ifndef HYBRIDPLAN_RNG_HPP_
#define HYBRIDPLAN_RNG_HPP_

#include <cstdint>

namespace hybridplan
{

/// Counter-based 64-bit generator (splitmix64). Fully specified arithmetic,
/// so streams are identical across compilers and platforms.
class SplitMix64
{
public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next()
  {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Derive an independent child stream.
  SplitMix64 fork() { return SplitMix64(next()); }

private:
  std::uint64_t state_;
};

}  // namespace hybridplan

#endif  // HYBRIDPLAN_RNG_HPP_
