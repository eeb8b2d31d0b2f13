#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace roam {

/// Purpose tags for deriving independent streams inside one run. Every run
/// owns one stream per tag, so the theta/context draws are shared across
/// policies given the same (master_seed, run_index).
enum class StreamTag : std::uint64_t {
  theta = 1,
  contexts = 2,
  policy = 3,
  user = 4,
  diagnostics = 5,
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Seeded random stream. The engine is std::mt19937_64, whose output sequence
/// is fixed by the standard; the variate transforms below are implemented
/// here rather than via <random> distributions, which are
/// implementation-defined. This keeps trajectories identical across toolchains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Counter-based split: the child seed is a hash of the triple, so streams
  /// for different runs never overlap in a way that depends on run order.
  static RandomStream derive(std::uint64_t master_seed, std::uint64_t run_index, StreamTag tag);
  static RandomStream derive(std::uint64_t master_seed, std::uint64_t run_index, std::uint64_t tag);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1).
  double uniform_open();
  double normal();
  /// Uniform index in [0, n). Throws ConfigError when n is 0.
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }
  /// Standard Gumbel variate (location 0, scale 1).
  double gumbel();

 private:
  std::mt19937_64 engine_;
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace roam
