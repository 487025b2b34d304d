#pragma once
// Small self-contained DFT engine with an instrumented complex-multiply
// counter. Sizes here are tiny (N <= a few thousand), so the engine favors
// countability and determinism over raw speed:
//   - iterative radix-2 for powers of two,
//   - Bluestein (chirp-z via radix-2) for general N,
//   - direct O(N^2) evaluation when it needs fewer multiplies than Bluestein.
// The counter only ticks for multiplies executed while a CountScope is alive.

#include <cstdint>
#include <memory>
#include <vector>

#include "zakdd/common.hpp"

namespace zakdd {

namespace mulcount {
// Single-threaded instrumentation: the counted paths are never run
// concurrently.
inline bool enabled = false;
inline std::uint64_t count = 0;

struct CountScope {
  CountScope() {
    enabled = true;
    count = 0;
  }
  ~CountScope() { enabled = false; }
};

inline void tick(std::uint64_t n = 1) {
  if (enabled) count += n;
}
}  // namespace mulcount

class Fft {
 public:
  explicit Fft(int n);

  int size() const { return n_; }

  // Unnormalized forward DFT: out[k] = sum_n in[n] exp(-j 2 pi n k / N).
  void forward(const cd* in, cd* out) const;
  std::vector<cd> forward(const std::vector<cd>& in) const;

  // Unnormalized inverse DFT: out[n] = sum_k in[k] exp(+j 2 pi n k / N).
  void inverse(const cd* in, cd* out) const;
  std::vector<cd> inverse(const std::vector<cd>& in) const;

  // Multiplies one forward() call will add to the counter.
  std::uint64_t multiplies_per_call() const;

  static bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

 private:
  enum class Kind { Radix2, Direct, Bluestein };

  void radix2_inplace(std::vector<cd>& v, bool inverse_dir) const;
  void forward_direct(const cd* in, cd* out) const;
  void forward_bluestein(const cd* in, cd* out) const;

  int n_;
  Kind kind_;
  // radix-2 tables
  std::vector<int> bitrev_;
  std::vector<cd> tw_;  // forward twiddles, packed by stage
  // direct table: roots exp(-j 2 pi t / n)
  std::vector<cd> roots_;
  // Bluestein state
  int blu_len_ = 0;
  std::unique_ptr<Fft> blu_fft_;
  std::vector<cd> chirp_;       // exp(-j pi n^2 / N)
  std::vector<cd> chirp_post_;  // chirp / L (absorbs the inverse-FFT scale)
  std::vector<cd> chirp_spec_;  // FFT of the zero-padded conjugate chirp
};

}  // namespace zakdd
