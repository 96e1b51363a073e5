#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace mobo {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thrown for contract violations (bad dimensions, empty inputs, invalid
/// parameters) and unrecoverable numerical failures.
class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

inline void require(bool cond, const std::string& msg) {
  if (!cond) throw Error(msg);
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent RNG stream from a base seed and up to two stream
/// tags. Streams with distinct tags are uncorrelated for practical purposes.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a = 0,
               std::uint64_t b = 0) {
  std::uint64_t h = splitmix64(seed ^ 0x2545f4914f6cdd1dULL);
  h = splitmix64(h ^ a);
  h = splitmix64(h ^ b);
  return h;
}

inline std::mt19937_64 seeded_rng(std::uint64_t seed, std::uint64_t a = 0,
                 std::uint64_t b = 0) {
  return std::mt19937_64(mix_seed(seed, a, b));
}

} // namespace mobo
