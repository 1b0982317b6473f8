#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace gmfr {

// Seeded random source with platform-independent output.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The distribution adaptors in <random> are not, so uniform and
// normal draws are derived here directly from the raw 64-bit words.
class Rng {
 public:
  static constexpr std::string_view kName = "mt19937_64+polar";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Independent stream for (seed, stream) pairs, e.g. one per replicate.
  static Rng derived(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next_u64() { return engine_(); }
  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform integer on [0, n), rejection-sampled without modulo bias.
  std::uint64_t below(std::uint64_t n);
  // Standard normal via the Marsaglia polar method.
  double normal();

  // Fisher-Yates permutation of {0, ..., n-1}.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace gmfr
