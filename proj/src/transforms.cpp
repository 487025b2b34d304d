#include "zakdd/transforms.hpp"

#include <numeric>

#include "zakdd/fft.hpp"

namespace zakdd {

DDArray dzt(const TDSequence& x) {
  const int M = x.grid.M, N = x.grid.N;
  DDArray X(x.grid);
  Fft fft(N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  std::vector<cd> poly(N), spec(N);
  for (int k = 0; k < M; ++k) {
    for (int p = 0; p < N; ++p) poly[p] = x.s[k + static_cast<size_t>(p) * M];
    fft.forward(poly.data(), spec.data());
    for (int l = 0; l < N; ++l) X.at(k, l) = spec[l] * scale;
  }
  return X;
}

TDSequence idzt(const DDArray& X) {
  const int M = X.grid.M, N = X.grid.N;
  TDSequence x(X.grid);
  Fft fft(N);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  std::vector<cd> spec(N), poly(N);
  for (int k = 0; k < M; ++k) {
    for (int l = 0; l < N; ++l) spec[l] = X.at(k, l);
    fft.inverse(spec.data(), poly.data());
    for (int p = 0; p < N; ++p) x.s[k + static_cast<size_t>(p) * M] = poly[p] * scale;
  }
  return x;
}

TDSequence idfzt(const DDArray& X) {
  const int M = X.grid.M, N = X.grid.N;
  const long long MN = X.grid.MN;
  TDSequence s(X.grid);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (long long i = 0; i < MN; ++i) {
    const int r = static_cast<int>(i % N);
    cd acc{0.0, 0.0};
    for (int k0 = 0; k0 < M; ++k0) {
      long long e = fmod_pos(i * k0, MN);
      acc += X.at(k0, r) * cis(-kTwoPi * static_cast<double>(e) / MN);
    }
    s.s[i] = acc * scale;
  }
  return s;
}

DDArray idfzt_adjoint(const TDSequence& s) {
  const int M = s.grid.M, N = s.grid.N;
  const long long MN = s.grid.MN;
  DDArray X(s.grid);
  const double scale = 1.0 / std::sqrt(static_cast<double>(M));
  for (long long i = 0; i < MN; ++i) {
    const int r = static_cast<int>(i % N);
    for (int k0 = 0; k0 < M; ++k0) {
      long long e = fmod_pos(i * k0, MN);
      X.at(k0, r) += s.s[i] * cis(kTwoPi * static_cast<double>(e) / MN) * scale;
    }
  }
  return X;
}

static long long egcd(long long a, long long b, long long& x, long long& y) {
  if (b == 0) {
    x = 1;
    y = 0;
    return a;
  }
  long long x1, y1;
  long long g = egcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

long long mod_inverse(long long b, long long m) {
  long long x, y;
  long long g = egcd(fmod_pos(b, m), m, x, y);
  require(g == 1, "mod_inverse: argument not coprime with modulus");
  return fmod_pos(x, m);
}

long long gdaft_phase_inverse(long long b, long long MN) {
  long long binv = mod_inverse(b, MN);
  // exp(j pi binv X / MN) sees binv mod 2MN; the even lift keeps the kernel
  // well defined on residues mod MN and shift-covariant when MN is odd
  if (MN % 2 == 1 && binv % 2 == 1) binv += MN;
  return binv;
}

void validate_symplectic(const SymplecticParams& g, long long MN) {
  long long x, y;
  require(egcd(fmod_pos(g.b, MN), MN, x, y) == 1,
          "symplectic params: b must be coprime with M*N");
  require(fmod_pos(g.a * g.d - g.b * g.c - 1, MN) == 0,
          "symplectic params: ad - bc must be 1 mod M*N");
}

namespace {

// Kernel phase table: table[t] = exp(j pi t / MN), t in [0, 2MN).
std::vector<cd> half_root_table(long long MN) {
  std::vector<cd> tab(2 * MN);
  for (long long t = 0; t < 2 * MN; ++t)
    tab[t] = cis(kPi * static_cast<double>(t) / MN);
  return tab;
}

TDSequence gdaft_apply(const TDSequence& x, const SymplecticParams& g,
                       bool adjoint) {
  const long long MN = x.grid.MN;
  validate_symplectic(g, MN);
  const long long mod2 = 2 * MN;
  const long long binv = gdaft_phase_inverse(g.b, MN);
  const long long am = fmod_pos(g.a, mod2), dm = fmod_pos(g.d, mod2);
  auto tab = half_root_table(MN);
  const double scale = 1.0 / std::sqrt(static_cast<double>(MN));

  // Kernel K[n, m] = exp(j pi binv (d n^2 - 2 n m + a m^2) / MN) / sqrt(MN).
  // The adjoint uses conj(K[m, n]), so the quadratic tables swap roles.
  std::vector<long long> d2(MN), a2(MN);
  for (long long t = 0; t < MN; ++t) {
    long long t2 = fmod_pos(t * t, mod2);
    d2[t] = fmod_pos(dm * t2, mod2);
    a2[t] = fmod_pos(am * t2, mod2);
  }

  TDSequence y(x.grid);
  for (long long n = 0; n < MN; ++n) {
    cd acc{0.0, 0.0};
    const long long qn = adjoint ? a2[n] : d2[n];
    for (long long m = 0; m < MN; ++m) {
      long long e = qn + (adjoint ? d2[m] : a2[m]) + fmod_pos(-2 * n * m, mod2);
      e = fmod_pos(binv * fmod_pos(e, mod2), mod2);
      cd ker = tab[e];
      if (adjoint) ker = std::conj(ker);
      acc += ker * x.s[m];
    }
    y.s[n] = acc * scale;
  }
  return y;
}

}  // namespace

TDSequence gdaft(const TDSequence& x, const SymplecticParams& g) {
  return gdaft_apply(x, g, false);
}

TDSequence gdaft_inverse(const TDSequence& y, const SymplecticParams& g) {
  return gdaft_apply(y, g, true);
}

std::pair<long long, long long> symplectic_apply(const SymplecticParams& g,
                                                 long long k, long long l,
                                                 long long MN) {
  return {fmod_pos(g.a * k + g.b * l, MN), fmod_pos(g.c * k + g.d * l, MN)};
}

}  // namespace zakdd
