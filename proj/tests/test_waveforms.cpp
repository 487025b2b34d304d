#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "zakdd/common.hpp"
#include "zakdd/grid.hpp"
#include "zakdd/transforms.hpp"
#include "zakdd/waveforms.hpp"

using namespace zakdd;

namespace {

TDSequence random_td(const GridParams& g, Rng& rng) {
  TDSequence x(g);
  for (auto& v : x.s) v = rng.cgaussian();
  return x;
}

double linf(const std::vector<cd>& a, const std::vector<cd>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double energy(const std::vector<cd>& v) {
  double e = 0.0;
  for (const cd& z : v) e += std::norm(z);
  return e;
}

}  // namespace

TEST_CASE("pulsone is the inverse Zak image of a DD impulse") {
  GridParams g = make_grid(5, 7, 30e3);
  for (int k0 : {0, 2, 4})
    for (int l0 : {0, 3, 6}) {
      TDSequence p = pulsone(g, k0, l0);
      CHECK(energy(p.s) == doctest::Approx(1.0).epsilon(1e-12));
      // explicit pulse-train form
      for (long long n = 0; n < g.MN; ++n) {
        cd expect = 0.0;
        if (n % g.M == k0) {
          long long d = n / g.M;
          expect = cis(kTwoPi * double(d) * l0 / g.N) / std::sqrt(double(g.N));
        }
        CHECK(std::abs(p.s[size_t(n)] - expect) < 1e-14);
      }
      // Zak transform recovers the impulse
      DDArray P = dzt(p);
      for (int k = 0; k < g.M; ++k)
        for (int l = 0; l < g.N; ++l) {
          cd expect = (k == k0 && l == l0) ? cd(1, 0) : cd(0, 0);
          CHECK(std::abs(P.at(k, l) - expect) < 1e-13);
        }
    }
}

TEST_CASE("chirps are unimodular with quadratic phase") {
  GridParams g = make_grid(5, 7, 30e3);
  TDSequence c = chirp_sequence(g, 3, 2, 1);
  CHECK(energy(c.s) == doctest::Approx(1.0).epsilon(1e-12));
  const double amp = 1.0 / std::sqrt(double(g.MN));
  for (const cd& v : c.s) CHECK(std::abs(std::abs(v) - amp) < 1e-14);
  for (long long n = 0; n < g.MN; ++n) {
    cd expect =
        amp * cis(kTwoPi * double(3 * n * n + 2 * n + 1) / double(g.MN));
    CHECK(std::abs(c.s[size_t(n)] - expect) < 1e-13);
  }
}

TEST_CASE("heisenberg shifts compose with the symplectic phase") {
  GridParams g = make_grid(4, 5, 30e3);
  Rng rng(7);
  TDSequence x = random_td(g, rng);
  // definition
  TDSequence y = heisenberg_shift(x, 3, 2);
  for (long long n = 0; n < g.MN; ++n) {
    long long src = fmod_pos(n - 3, g.MN);
    cd expect = x.s[size_t(src)] * cis(kTwoPi * 2.0 * double(n - 3) / g.MN);
    CHECK(std::abs(y.s[size_t(n)] - expect) < 1e-13);
  }
  // composition D_(k1,l1) D_(k2,l2) = exp(j 2 pi l1 k2 / MN) D_(k1+k2,l1+l2)
  const std::array<long long, 4> combos[] = {
      {1, 2, 3, 4}, {0, 7, 5, 0}, {19, 3, 2, 18}};
  for (auto [k1, l1, k2, l2] : combos) {
    TDSequence lhs = heisenberg_shift(heisenberg_shift(x, k2, l2), k1, l1);
    TDSequence rhs = heisenberg_shift(x, k1 + k2, l1 + l2);
    cd phase = cis(kTwoPi * double(l1) * double(k2) / double(g.MN));
    for (auto& v : rhs.s) v *= phase;
    CHECK(linf(lhs.s, rhs.s) < 1e-12);
  }
  // inverse: D_(-a,-b) D_(a,b) = exp(-j 2 pi a b / MN) I
  TDSequence inv = heisenberg_shift(heisenberg_shift(x, 5, 9), -5, -9);
  cd phase = cis(kTwoPi * 5.0 * 9.0 / double(g.MN));
  for (auto& v : inv.s) v *= phase;
  CHECK(linf(inv.s, x.s) < 1e-12);
}

TEST_CASE("dd_shift is the Zak conjugate of the Heisenberg shift") {
  GridParams g = make_grid(4, 5, 30e3);
  Rng rng(13);
  const std::pair<long long, long long> shifts[] = {
      {1, 2}, {0, 4}, {3, 0}, {7, 11}, {-2, -3}};
  for (auto [k, l] : shifts) {
    TDSequence x = random_td(g, rng);
    DDArray via_td = dzt(heisenberg_shift(x, k, l));
    DDArray via_dd = dd_shift(dzt(x), k, l);
    CHECK(linf(via_td.a, via_dd.a) < 1e-12);
  }
}

TEST_CASE("basis matrices are unitary and consistent with basis_element") {
  GridParams g = make_grid(3, 5, 30e3);
  std::vector<BasisSpec> specs;
  for (BasisFamily f :
       {BasisFamily::ZakPulsone, BasisFamily::Ofdm, BasisFamily::Afdm}) {
    BasisSpec s;
    s.grid = g;
    s.family = f;
    specs.push_back(s);
  }
  BasisSpec cz;
  cz.grid = g;
  cz.family = BasisFamily::SpreadCazac;
  cz.symplectic = {2, 1, 3, 2};
  specs.push_back(cz);
  BasisSpec ot;  // OTSM needs a power-of-two Doppler dimension
  ot.grid = make_grid(3, 4, 30e3);
  ot.family = BasisFamily::Otsm;
  specs.push_back(ot);

  for (const BasisSpec& s : specs) {
    validate_basis(s);
    long long n = s.grid.MN;
    Eigen::MatrixXcd B = basis_matrix(s);
    REQUIRE(B.rows() == n);
    REQUIRE(B.cols() == n);
    double dev = (B.adjoint() * B - Eigen::MatrixXcd::Identity(n, n))
                     .cwiseAbs()
                     .maxCoeff();
    CHECK(dev < 1e-11);
    for (long long i : {0LL, 3LL, n - 1}) {
      TDSequence e = basis_element(s, i);
      Eigen::Map<Eigen::VectorXcd> col(e.s.data(), n);
      CHECK((col - B.col(i)).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("subgroup index sets have MN elements of the right shape") {
  GridParams g = make_grid(5, 7, 30e3);
  SubgroupSpec rect = rect_subgroup(g);
  auto rs = subgroup_index_set(rect);
  REQUIRE(rs.size() == size_t(g.MN));
  for (auto [k, l] : rs) {
    CHECK(k % g.M == 0);
    CHECK(l % g.N == 0);
  }
  SubgroupSpec line = line_subgroup(g, 3);
  auto ls = subgroup_index_set(line);
  REQUIRE(ls.size() == size_t(g.MN));
  for (auto [k, l] : ls) CHECK(fmod_pos(2 * 3 * k - l, g.MN) == 0);
  CHECK_THROWS(line_subgroup(g, 5));  // gcd(5, 35) > 1
  GridParams geven = make_grid(4, 4, 30e3);
  CHECK_THROWS(line_subgroup(geven, 3));  // even MN
}

TEST_CASE("pulsones are eigenvectors of the rectangular lattice only") {
  GridParams g = make_grid(5, 7, 30e3);
  SubgroupSpec rect = rect_subgroup(g);
  SubgroupSpec line = line_subgroup(g, 2);
  TDSequence p = subgroup_eigenvector(rect, 2 + 3 * g.M);
  CHECK(linf(p.s, pulsone(g, 2, 3).s) == 0.0);
  EigenCheckResult ok = eigen_check(p, rect);
  CHECK(ok.is_eigenvector);
  CHECK(ok.max_residual < 1e-10);
  for (const auto& [s, lam] : ok.eigenvalues)
    CHECK(std::abs(std::abs(lam) - 1.0) < 1e-10);
  EigenCheckResult bad = eigen_check(p, line);
  CHECK_FALSE(bad.is_eigenvector);
  CHECK(bad.max_residual > 0.1);
}

TEST_CASE("line chirps are eigenvectors of their own line") {
  GridParams g = make_grid(5, 7, 30e3);
  for (long long alpha : {1, 2, 3}) {
    SubgroupSpec line = line_subgroup(g, alpha);
    for (long long i : {0LL, 1LL, 17LL}) {
      TDSequence c = subgroup_eigenvector(line, i);
      EigenCheckResult res = eigen_check(c, line);
      CHECK(res.is_eigenvector);
      CHECK(res.max_residual < 1e-10);
    }
    // mismatched slope fails
    if (alpha != 2) {
      TDSequence c = subgroup_eigenvector(line, 0);
      EigenCheckResult res = eigen_check(c, line_subgroup(g, 2));
      CHECK_FALSE(res.is_eigenvector);
    }
  }
}

TEST_CASE("distinct eigenvectors of one subgroup are orthogonal") {
  GridParams g = make_grid(5, 7, 30e3);
  SubgroupSpec line = line_subgroup(g, 2);
  for (long long i = 0; i < 6; ++i)
    for (long long j = i + 1; j < 6; ++j) {
      TDSequence a = subgroup_eigenvector(line, i);
      TDSequence b = subgroup_eigenvector(line, j);
      cd ip = 0.0;
      for (size_t n = 0; n < a.s.size(); ++n)
        ip += a.s[n] * std::conj(b.s[n]);
      CHECK(std::abs(ip) < 1e-12);
    }
}
