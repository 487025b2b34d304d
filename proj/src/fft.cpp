#include "zakdd/fft.hpp"

#include <algorithm>

namespace zakdd {

namespace {

inline cd cmul_counted(const cd& x, const cd& y) {
  mulcount::tick();
  return x * y;
}

std::uint64_t radix2_mults(int n) {
  // One twiddle multiply per butterfly except the w == 1 butterflies.
  std::uint64_t total = 0;
  for (int len = 2; len <= n; len <<= 1) {
    std::uint64_t groups = static_cast<std::uint64_t>(n) / len;
    std::uint64_t per_group = static_cast<std::uint64_t>(len / 2) - 1;
    total += groups * per_group;
  }
  return total;
}

int next_pow2_at_least(int m) {
  int L = 1;
  while (L < m) L <<= 1;
  return L;
}

}  // namespace

Fft::Fft(int n) : n_(n) {
  require(n >= 1, "Fft: size must be positive");
  if (is_pow2(n_)) {
    kind_ = Kind::Radix2;
    bitrev_.resize(n_);
    int bits = 0;
    while ((1 << bits) < n_) ++bits;
    for (int i = 0; i < n_; ++i) {
      int r = 0;
      for (int b = 0; b < bits; ++b)
        if (i & (1 << b)) r |= 1 << (bits - 1 - b);
      bitrev_[i] = r;
    }
    for (int len = 2; len <= n_; len <<= 1)
      for (int k = 0; k < len / 2; ++k)
        tw_.push_back(cis(-kTwoPi * k / len));
    return;
  }

  int L = next_pow2_at_least(2 * n_ - 1);
  std::uint64_t direct_cost = static_cast<std::uint64_t>(n_) * n_;
  std::uint64_t blu_cost = 2 * radix2_mults(L) + L + 2ULL * n_;
  if (direct_cost <= blu_cost) {
    kind_ = Kind::Direct;
    roots_.resize(n_);
    for (int t = 0; t < n_; ++t) roots_[t] = cis(-kTwoPi * t / n_);
    return;
  }

  kind_ = Kind::Bluestein;
  blu_len_ = L;
  blu_fft_ = std::make_unique<Fft>(L);
  chirp_.resize(n_);
  for (int i = 0; i < n_; ++i) {
    // i^2 mod 2N keeps the argument small and exact.
    long long e = (static_cast<long long>(i) * i) % (2LL * n_);
    chirp_[i] = cis(-kPi * static_cast<double>(e) / n_);
  }
  std::vector<cd> b(L, cd{0.0, 0.0});
  b[0] = std::conj(chirp_[0]);
  for (int i = 1; i < n_; ++i) {
    b[i] = std::conj(chirp_[i]);
    b[L - i] = std::conj(chirp_[i]);
  }
  chirp_spec_ = blu_fft_->forward(b);
  chirp_post_.resize(n_);
  for (int i = 0; i < n_; ++i) chirp_post_[i] = chirp_[i] / static_cast<double>(L);
}

void Fft::radix2_inplace(std::vector<cd>& v, bool inverse_dir) const {
  const int n = n_;
  for (int i = 0; i < n; ++i) {
    int r = bitrev_[i];
    if (i < r) std::swap(v[i], v[r]);
  }
  size_t twbase = 0;
  for (int len = 2; len <= n; len <<= 1) {
    int half = len / 2;
    for (int start = 0; start < n; start += len) {
      for (int k = 0; k < half; ++k) {
        cd w = tw_[twbase + k];
        if (inverse_dir) w = std::conj(w);
        cd u = v[start + k];
        cd t = (k == 0) ? v[start + k + half]
                        : cmul_counted(w, v[start + k + half]);
        v[start + k] = u + t;
        v[start + k + half] = u - t;
      }
    }
    twbase += half;
  }
}

void Fft::forward_direct(const cd* in, cd* out) const {
  const int n = n_;
  for (int k = 0; k < n; ++k) {
    cd acc{0.0, 0.0};
    long long t = 0;
    for (int m = 0; m < n; ++m) {
      acc += cmul_counted(roots_[t], in[m]);
      t += k;
      if (t >= n) t -= n;
    }
    out[k] = acc;
  }
}

void Fft::forward_bluestein(const cd* in, cd* out) const {
  const int n = n_, L = blu_len_;
  std::vector<cd> a(L, cd{0.0, 0.0});
  for (int i = 0; i < n; ++i) a[i] = cmul_counted(in[i], chirp_[i]);
  std::vector<cd> A = blu_fft_->forward(a);
  for (int i = 0; i < L; ++i) A[i] = cmul_counted(A[i], chirp_spec_[i]);
  // Unnormalized inverse via conjugation; 1/L is folded into the post-chirp.
  for (cd& z : A) z = std::conj(z);
  blu_fft_->radix2_inplace(A, false);
  for (int k = 0; k < n; ++k)
    out[k] = cmul_counted(std::conj(A[k]), chirp_post_[k]);
}

void Fft::forward(const cd* in, cd* out) const {
  switch (kind_) {
    case Kind::Radix2: {
      std::vector<cd> v(in, in + n_);
      radix2_inplace(v, false);
      std::copy(v.begin(), v.end(), out);
      return;
    }
    case Kind::Direct:
      forward_direct(in, out);
      return;
    case Kind::Bluestein:
      forward_bluestein(in, out);
      return;
  }
}

std::vector<cd> Fft::forward(const std::vector<cd>& in) const {
  require(static_cast<int>(in.size()) == n_, "Fft::forward: length mismatch");
  std::vector<cd> out(n_);
  forward(in.data(), out.data());
  return out;
}

void Fft::inverse(const cd* in, cd* out) const {
  std::vector<cd> v(in, in + n_);
  for (cd& z : v) z = std::conj(z);
  forward(v.data(), out);
  for (int i = 0; i < n_; ++i) out[i] = std::conj(out[i]);
}

std::vector<cd> Fft::inverse(const std::vector<cd>& in) const {
  require(static_cast<int>(in.size()) == n_, "Fft::inverse: length mismatch");
  std::vector<cd> out(n_);
  inverse(in.data(), out.data());
  return out;
}

std::uint64_t Fft::multiplies_per_call() const {
  switch (kind_) {
    case Kind::Radix2:
      return radix2_mults(n_);
    case Kind::Direct:
      return static_cast<std::uint64_t>(n_) * n_;
    case Kind::Bluestein:
      return 2ULL * n_ + blu_len_ + 2 * radix2_mults(blu_len_);
  }
  return 0;
}

}  // namespace zakdd
