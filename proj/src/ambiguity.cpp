#include "zakdd/ambiguity.hpp"

#include <algorithm>

#include "zakdd/fft.hpp"

namespace zakdd {

PointList core_region(const GridParams& g) {
  PointList r;
  r.reserve(g.MN);
  for (int k = 0; k < g.M; ++k)
    for (int l = 0; l < g.N; ++l) r.emplace_back(k, l);
  return r;
}

PointList torus_region(const GridParams& g) {
  PointList r;
  r.reserve(static_cast<size_t>(g.MN) * g.MN);
  for (long long k = 0; k < g.MN; ++k)
    for (long long l = 0; l < g.MN; ++l) r.emplace_back(k, l);
  return r;
}

PointList box_region(const GridParams& g, long long k_min, long long k_max,
                     long long l_min, long long l_max) {
  require(k_min <= k_max && l_min <= l_max, "box_region: empty box");
  PointList r;
  for (long long k = k_min; k <= k_max; ++k)
    for (long long l = l_min; l <= l_max; ++l)
      r.emplace_back(fmod_pos(k, g.MN), fmod_pos(l, g.MN));
  return r;
}

cd AmbiguitySurface::value_at(long long k, long long l) const {
  for (size_t i = 0; i < region.size(); ++i)
    if (region[i].first == k && region[i].second == l) return values[i];
  fail("AmbiguitySurface: cell not in region");
}

AmbiguitySurface cross_ambiguity(const TDSequence& x, const TDSequence& y,
                                 const PointList& region) {
  require(x.grid == y.grid, "cross_ambiguity: grid mismatch");
  const long long MN = x.grid.MN;
  std::vector<cd> roots(MN);
  for (long long t = 0; t < MN; ++t)
    roots[t] = cis(-kTwoPi * static_cast<double>(t) / MN);

  AmbiguitySurface A;
  A.grid = x.grid;
  A.region = region;
  A.values.resize(region.size());
  for (size_t i = 0; i < region.size(); ++i) {
    const long long k = region[i].first, l = region[i].second;
    cd acc{0.0, 0.0};
    for (long long n = 0; n < MN; ++n) {
      long long u = fmod_pos(n - k, MN);
      acc += x.s[n] * std::conj(y.s[u]) * roots[fmod_pos(l * u, MN)];
    }
    A.values[i] = acc;
  }
  return A;
}

AmbiguitySurface fast_cross_ambiguity_pulsone(const TDSequence& x, int k0,
                                              int l0, const PointList& region) {
  const GridParams& g = x.grid;
  require(k0 >= 0 && k0 < g.M && l0 >= 0 && l0 < g.N,
          "fast_cross_ambiguity_pulsone: pulsone index out of range");
  const int M = g.M, N = g.N;
  const long long MN = g.MN;

  // A[k,l] = (1/sqrt(N)) R[(-l k0 + M q (l + l0)) mod MN] * P_r[(l+l0) mod N]
  // with r = (k + k0) mod M, q = floor((k + k0) / M), P_r the length-N DFT of
  // the r-th delay polyphase of x. The 1/sqrt(N) is folded into the table, so
  // each cell costs exactly one complex multiply after the cached transforms.
  std::vector<cd> table(MN);
  const double scale = 1.0 / std::sqrt(static_cast<double>(N));
  for (long long t = 0; t < MN; ++t)
    table[t] = scale * cis(kTwoPi * static_cast<double>(t) / MN);

  Fft fft(N);
  std::vector<std::vector<cd>> poly_spec(M);
  std::vector<cd> buf(N);
  auto residue_spec = [&](int r) -> const std::vector<cd>& {
    if (poly_spec[r].empty()) {
      for (int d = 0; d < N; ++d) buf[d] = x.s[r + static_cast<size_t>(d) * M];
      poly_spec[r].resize(N);
      fft.forward(buf.data(), poly_spec[r].data());
    }
    return poly_spec[r];
  };

  AmbiguitySurface A;
  A.grid = g;
  A.region = region;
  A.values.resize(region.size());
  for (size_t i = 0; i < region.size(); ++i) {
    const long long k = region[i].first, l = region[i].second;
    const long long kk = k + k0;
    const int r = static_cast<int>(fmod_pos(kk, M));
    const long long q = fdiv_floor(kk, M);
    const int m = static_cast<int>(fmod_pos(l + l0, N));
    const long long t = fmod_pos(-l * k0 + M * q * (l + l0), MN);
    const cd v = residue_spec(r)[m];
    mulcount::tick();
    A.values[i] = table[t] * v;
  }
  return A;
}

MoyalCheck moyal_check(const TDSequence& x, const TDSequence& y) {
  require(x.grid == y.grid, "moyal_check: grid mismatch");
  const long long MN = x.grid.MN;
  PointList full = torus_region(x.grid);
  AmbiguitySurface Ax = cross_ambiguity(x, x, full);
  AmbiguitySurface Ay = cross_ambiguity(y, y, full);
  cd lhs{0.0, 0.0};
  for (size_t i = 0; i < full.size(); ++i)
    lhs += std::conj(Ax.values[i]) * Ay.values[i];
  lhs /= static_cast<double>(MN);
  cd ip{0.0, 0.0};
  for (long long n = 0; n < MN; ++n) ip += x.s[n] * std::conj(y.s[n]);
  return {lhs, std::norm(ip)};
}

PointList channel_support_kset(const PointList& support, long long MN) {
  std::set<Point> out;
  for (const Point& s1 : support)
    for (const Point& s2 : support)
      out.insert({fmod_pos(s1.first - s2.first, MN),
                  fmod_pos(s1.second - s2.second, MN)});
  return {out.begin(), out.end()};
}

bool predictability_check(const AmbiguitySurface& self_ambiguity,
                          const PointList& support, double tol) {
  const long long MN = self_ambiguity.grid.MN;
  std::set<Point> have(self_ambiguity.region.begin(),
                       self_ambiguity.region.end());
  PointList kset = channel_support_kset(support, MN);
  for (const Point& p : kset)
    require(have.count(p) != 0,
            "predictability_check: surface region does not cover K_S");
  for (const Point& p : kset) {
    cd v = self_ambiguity.value_at(p.first, p.second);
    if (p.first == 0 && p.second == 0) {
      if (std::abs(v - cd{1.0, 0.0}) >= tol) return false;
    } else if (std::abs(v) >= tol) {
      return false;
    }
  }
  return true;
}

bool crystallization_check(const PointList& subgroup_set, const RegionBox& C,
                           long long MN) {
  require(C.k_min <= C.k_max && C.l_min <= C.l_max,
          "crystallization_check: empty region");
  const long long wk = C.k_max - C.k_min, wl = C.l_max - C.l_min;
  require(2 * wk < MN && 2 * wl < MN,
          "crystallization_check: region difference set wraps the torus");
  for (const Point& s : subgroup_set) {
    long long dk = wrap_centered(s.first, MN);
    long long dl = wrap_centered(s.second, MN);
    if (dk == 0 && dl == 0) continue;
    if (std::llabs(dk) <= wk && std::llabs(dl) <= wl) return false;
  }
  return true;
}

}  // namespace zakdd
