#include "roam/random.hpp"

#include <cmath>

#include "roam/errors.hpp"

namespace roam {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

RandomStream RandomStream::derive(std::uint64_t master_seed, std::uint64_t run_index,
                                  StreamTag tag) {
  return derive(master_seed, run_index, static_cast<std::uint64_t>(tag));
}

RandomStream RandomStream::derive(std::uint64_t master_seed, std::uint64_t run_index,
                                  std::uint64_t tag) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ (run_index * 0xd1342543de82ef95ULL));
  h = splitmix64(h ^ (tag * 0xaf251af3b0f025b5ULL));
  return RandomStream(h);
}

double RandomStream::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform_open() {
  double u;
  do {
    u = uniform();
  } while (u == 0.0);
  return u;
}

double RandomStream::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_normal_;
  }
  // Marsaglia polar method.
  double u, v, s;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double f = std::sqrt(-2.0 * std::log(s) / s);
  spare_normal_ = v * f;
  has_spare_ = true;
  return u * f;
}

std::size_t RandomStream::index(std::size_t n) {
  if (n == 0) throw ConfigError("RandomStream::index: n must be positive");
  // Rejection sampling removes modulo bias.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

double RandomStream::gumbel() {
  return -std::log(-std::log(uniform_open()));
}

}  // namespace roam
