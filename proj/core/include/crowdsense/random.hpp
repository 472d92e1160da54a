#pragma once

// Platform-independent seeded randomness.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. The standard library distributions are NOT (their algorithms are
// implementation-defined), so every distribution used by the library is
// implemented here on top of the raw 64-bit stream:
//
//   uniform01   (x >> 11) * 2^-53, i.e. a 53-bit grid on [0, 1)
//   index(n)    rejection sampling on the raw word, no modulo bias
//   normal      Marsaglia polar method; the spare deviate is cached
//
// Independent roles (factors, anomalies, noise, mask, ...) draw from
// separate streams whose seeds are splitmix64(seed ^ role tag), so changing
// how many draws one role consumes never shifts another.

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace crowdsense {

std::uint64_t splitmix64(std::uint64_t x) noexcept;

// FNV-1a, used to turn a role name into a stream tag.
std::uint64_t stream_tag(std::string_view role) noexcept;

class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t seed, std::string_view role);

  std::uint64_t next_u64() { return engine_(); }
  double uniform01();
  double uniform(double lo, double hi);
  double normal();
  double normal(double mean, double stddev);
  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t index(std::uint64_t n);
  // +1 or -1 with equal probability.
  double sign();

  // k distinct indices drawn uniformly from [0, n), in draw order
  // (partial Fisher-Yates).
  std::vector<std::uint64_t> sample_without_replacement(std::uint64_t n,
                                                        std::uint64_t k);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace crowdsense
