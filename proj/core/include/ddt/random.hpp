#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace ddt {

// xoshiro256** seeded through splitmix64. Bit-identical across platforms,
// unlike the std distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  result_type operator()() { return next(); }
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer on [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t s_[4];
};

std::uint64_t splitmix64(std::uint64_t& state);

// Independent random streams keyed by (master seed, node id, repeat index,
// purpose). Results never depend on which thread consumes which stream.
enum class Stream : std::uint64_t {
  repeat = 1,
  refit = 2,
  evaluation = 3,
  pilot = 4,
  tie_break = 5,
  forest = 6,
  experiment = 7,
};

std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> keys);

inline Rng stream_rng(std::uint64_t master, std::uint64_t node_id, Stream stream,
                      std::uint64_t index = 0) {
  return Rng(derive_seed(master, {node_id, static_cast<std::uint64_t>(stream), index}));
}

}  // namespace ddt
