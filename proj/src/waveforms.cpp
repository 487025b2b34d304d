#include "zakdd/waveforms.hpp"

#include <bit>
#include <numeric>

namespace zakdd {

TDSequence pulsone(const GridParams& g, int k0, int l0) {
  require(k0 >= 0 && k0 < g.M, "pulsone: k0 must lie in [0, M)");
  require(l0 >= 0 && l0 < g.N, "pulsone: l0 must lie in [0, N)");
  TDSequence v(g);
  const double amp = 1.0 / std::sqrt(static_cast<double>(g.N));
  for (int d = 0; d < g.N; ++d)
    v.s[k0 + static_cast<size_t>(d) * g.M] =
        amp * cis(kTwoPi * static_cast<double>(fmod_pos(
                               static_cast<long long>(d) * l0, g.N)) /
                  g.N);
  return v;
}

TDSequence chirp_sequence(const GridParams& g, long long alpha, long long beta,
                          long long gamma) {
  TDSequence v(g);
  const long long MN = g.MN;
  const double amp = 1.0 / std::sqrt(static_cast<double>(MN));
  for (long long n = 0; n < MN; ++n) {
    long long e = fmod_pos(alpha * fmod_pos(n * n, MN) + beta * n + gamma, MN);
    v.s[n] = amp * cis(kTwoPi * static_cast<double>(e) / MN);
  }
  return v;
}

TDSequence heisenberg_shift(const TDSequence& x, long long k, long long l) {
  const long long MN = x.grid.MN;
  TDSequence y(x.grid);
  for (long long n = 0; n < MN; ++n) {
    long long src = fmod_pos(n - k, MN);
    long long e = fmod_pos(l * (n - k), MN);
    y.s[n] = x.s[src] * cis(kTwoPi * static_cast<double>(e) / MN);
  }
  return y;
}

DDArray dd_shift(const DDArray& X, long long k, long long l) {
  const int M = X.grid.M, N = X.grid.N;
  const long long MN = X.grid.MN;
  DDArray Y(X.grid);
  for (int kp = 0; kp < M; ++kp)
    for (int lp = 0; lp < N; ++lp) {
      long long e = fmod_pos(l * (kp - k), MN);
      Y.at(kp, lp) = quasi_extend(X, kp - k, lp - l) *
                     cis(kTwoPi * static_cast<double>(e) / MN);
    }
  return Y;
}

void validate_basis(const BasisSpec& spec) {
  if (spec.family == BasisFamily::Otsm)
    require((spec.grid.N & (spec.grid.N - 1)) == 0,
            "OTSM basis requires N to be a power of two");
  if (spec.family == BasisFamily::SpreadCazac)
    validate_symplectic(spec.symplectic, spec.grid.MN);
}

namespace {

// gdaft applied to a pulsone, using the pulsone's N-sparse support. Equal to
// gdaft(pulsone(...)) but O(MN N) instead of O((MN)^2).
TDSequence spread_cazac_element(const GridParams& g, const SymplecticParams& sp,
                                int k0, int l0) {
  const long long MN = g.MN;
  const long long mod2 = 2 * MN;
  const long long binv = mod_inverse(sp.b, MN);
  const long long am = fmod_pos(sp.a, mod2), dm = fmod_pos(sp.d, mod2);
  TDSequence y(g);
  const double scale = 1.0 / std::sqrt(static_cast<double>(MN) * g.N);
  for (long long n = 0; n < MN; ++n) {
    cd acc{0.0, 0.0};
    long long dn2 = fmod_pos(dm * fmod_pos(n * n, mod2), mod2);
    for (int d = 0; d < g.N; ++d) {
      long long m = k0 + static_cast<long long>(d) * g.M;
      long long e = dn2 + fmod_pos(am * fmod_pos(m * m, mod2), mod2) +
                    fmod_pos(-2 * n * m, mod2);
      e = fmod_pos(binv * fmod_pos(e, mod2), mod2);
      // pulsone phase folded in: exp(j 2 pi d l0 / N) = exp(j pi 2 d l0 M / MN)
      long long pe = fmod_pos(2LL * d * l0 * g.M, mod2);
      acc += cis(kPi * static_cast<double>(fmod_pos(e + pe, mod2)) / MN);
    }
    y.s[n] = acc * scale;
  }
  return y;
}

}  // namespace

TDSequence basis_element(const BasisSpec& spec, long long i) {
  validate_basis(spec);
  const GridParams& g = spec.grid;
  require(i >= 0 && i < g.MN, "basis_element: index out of range");
  const int M = g.M, N = g.N;
  const long long MN = g.MN;
  switch (spec.family) {
    case BasisFamily::ZakPulsone:
      return pulsone(g, static_cast<int>(i % M), static_cast<int>(i / M));
    case BasisFamily::Ofdm: {
      TDSequence v(g);
      const long long block = i / M, tone = i % M;
      const double amp = 1.0 / std::sqrt(static_cast<double>(M));
      for (long long r = 0; r < M; ++r) {
        long long n = block * M + r;
        long long e = fmod_pos(tone * r, M);
        v.s[n] = amp * cis(kTwoPi * static_cast<double>(e) / M);
      }
      return v;
    }
    case BasisFamily::Afdm: {
      TDSequence v(g);
      const double amp = 1.0 / std::sqrt(static_cast<double>(MN));
      const long long c1 = spec.afdm_c1_num, c2 = spec.afdm_c2_num;
      const long long qi = fmod_pos(c2 * fmod_pos(i * i, MN), MN);
      for (long long n = 0; n < MN; ++n) {
        long long e = fmod_pos(c1 * fmod_pos(n * n, MN) + qi + n * i, MN);
        v.s[n] = amp * cis(kTwoPi * static_cast<double>(e) / MN);
      }
      return v;
    }
    case BasisFamily::Otsm: {
      TDSequence v(g);
      const int k0 = static_cast<int>(i % M);
      const unsigned l0 = static_cast<unsigned>(i / M);
      const double amp = 1.0 / std::sqrt(static_cast<double>(N));
      for (int d = 0; d < N; ++d) {
        int sign = (std::popcount(l0 & static_cast<unsigned>(d)) & 1) ? -1 : 1;
        v.s[k0 + static_cast<size_t>(d) * M] = amp * sign;
      }
      return v;
    }
    case BasisFamily::SpreadCazac:
      return spread_cazac_element(g, spec.symplectic, static_cast<int>(i % M),
                                  static_cast<int>(i / M));
  }
  fail("basis_element: unknown family");
}

Eigen::MatrixXcd basis_matrix(const BasisSpec& spec) {
  const long long MN = spec.grid.MN;
  Eigen::MatrixXcd Phi(MN, MN);
  for (long long i = 0; i < MN; ++i) {
    TDSequence v = basis_element(spec, i);
    for (long long n = 0; n < MN; ++n) Phi(n, i) = v.s[n];
  }
  return Phi;
}

SubgroupSpec rect_subgroup(const GridParams& g) {
  SubgroupSpec sg;
  sg.grid = g;
  sg.kind = SubgroupKind::RectLattice;
  return sg;
}

SubgroupSpec line_subgroup(const GridParams& g, long long alpha) {
  require(g.MN % 2 == 1, "line_subgroup: requires odd M*N");
  require(std::gcd(fmod_pos(alpha, g.MN), g.MN) == 1,
          "line_subgroup: alpha must be coprime with M*N");
  SubgroupSpec sg;
  sg.grid = g;
  sg.kind = SubgroupKind::Line;
  sg.alpha = fmod_pos(alpha, g.MN);
  return sg;
}

std::vector<std::pair<long long, long long>> subgroup_index_set(
    const SubgroupSpec& sg) {
  const GridParams& g = sg.grid;
  std::vector<std::pair<long long, long long>> s;
  s.reserve(g.MN);
  if (sg.kind == SubgroupKind::RectLattice) {
    for (int a = 0; a < g.N; ++a)
      for (int b = 0; b < g.M; ++b)
        s.emplace_back(static_cast<long long>(a) * g.M,
                       static_cast<long long>(b) * g.N);
  } else {
    for (long long k = 0; k < g.MN; ++k)
      s.emplace_back(k, fmod_pos(2 * sg.alpha * k, g.MN));
  }
  return s;
}

TDSequence subgroup_eigenvector(const SubgroupSpec& sg, long long i) {
  const GridParams& g = sg.grid;
  require(i >= 0 && i < g.MN, "subgroup_eigenvector: index out of range");
  if (sg.kind == SubgroupKind::RectLattice)
    return pulsone(g, static_cast<int>(i % g.M), static_cast<int>(i / g.M));
  return chirp_sequence(g, sg.alpha, i, 0);
}

EigenCheckResult eigen_check(const TDSequence& x, const SubgroupSpec& sg,
                             double tol) {
  require(x.grid == sg.grid, "eigen_check: grid mismatch");
  const long long MN = x.grid.MN;
  TDSequence xn = x;
  double nrm = std::sqrt(frame_energy(x.s));
  require(nrm > 0.0, "eigen_check: zero input");
  for (cd& z : xn.s) z /= nrm;

  EigenCheckResult res;
  res.is_eigenvector = true;
  for (auto [k, l] : subgroup_index_set(sg)) {
    TDSequence dx = heisenberg_shift(xn, k, l);
    cd lambda{0.0, 0.0};
    for (long long n = 0; n < MN; ++n) lambda += dx.s[n] * std::conj(xn.s[n]);
    double resid = 0.0;
    for (long long n = 0; n < MN; ++n)
      resid += std::norm(dx.s[n] - lambda * xn.s[n]);
    resid = std::sqrt(resid);
    res.max_residual = std::max(res.max_residual, resid);
    if (resid >= tol) res.is_eigenvector = false;
    res.eigenvalues[{k, l}] = lambda;
  }
  return res;
}

}  // namespace zakdd
