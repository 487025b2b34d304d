#pragma once
// Shared scalar types, RNG, and small helpers used across the toolkit.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace zakdd {

using cd = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// exp(j * phi)
inline cd cis(double phi) { return {std::cos(phi), std::sin(phi)}; }

// Floor modulus: result in [0, m) for any sign of a. m > 0.
inline long long fmod_pos(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

// Floor division: floor(a / m) for m > 0.
inline long long fdiv_floor(long long a, long long m) {
  long long q = a / m, r = a % m;
  return (r != 0 && r < 0) ? q - 1 : q;
}

// Wrap a into the centered interval [-m/2, m/2).
inline long long wrap_centered(long long a, long long m) {
  long long r = fmod_pos(a, m);
  return 2 * r >= m ? r - m : r;
}

[[noreturn]] inline void fail(const std::string& what) {
  throw std::invalid_argument(what);
}

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(what);
}

// --------------------------------------------------------------------------
// Deterministic RNG. splitmix64 both seeds the generator and derives
// independent per-trial streams, so Monte Carlo results do not depend on how
// trials are scheduled across threads.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = master ^ (0x9e3779b97f4a7c15ULL * (index + 1));
  std::uint64_t b = splitmix64(s);
  return a ^ b;
}

// xoshiro-free minimal generator: splitmix64 stream, explicit state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (no cached spare: keeps streams simple).
  double gaussian() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  // Circular complex Gaussian with E|z|^2 = 1.
  cd cgaussian() {
    double u1 = uniform(), u2 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    double r = std::sqrt(-std::log(u1));
    return r * cis(kTwoPi * u2);
  }

 private:
  std::uint64_t state_;
};

}  // namespace zakdd
