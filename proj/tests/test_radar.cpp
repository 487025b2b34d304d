#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <vector>

#include "zakdd/ambiguity.hpp"
#include "zakdd/channel.hpp"
#include "zakdd/radar.hpp"
#include "zakdd/transforms.hpp"
#include "zakdd/waveforms.hpp"

using namespace zakdd;

namespace {

TDSequence random_sequence(const GridParams& g, Rng& rng) {
  TDSequence x(g);
  for (cd& v : x.s) v = rng.cgaussian();
  return x;
}

double max_surface_diff(const AmbiguitySurface& a, const AmbiguitySurface& b) {
  REQUIRE(a.values.size() == b.values.size());
  double worst = 0.0;
  for (size_t i = 0; i < a.values.size(); ++i)
    worst = std::max(worst, std::abs(a.values[i] - b.values[i]));
  return worst;
}

}  // namespace

TEST_CASE("papr reports peak to mean power in dB") {
  GridParams g = make_grid(13, 16, 30e3);
  // a pulsone concentrates all energy into N pulses of M-fold height
  CHECK(papr_db(pulsone(g, 3, 5)) ==
        doctest::Approx(10.0 * std::log10(double(g.M))).epsilon(1e-12));
  // unimodular waveforms sit at exactly 0 dB
  GridParams go = make_grid(13, 17, 30e3);
  CHECK(std::abs(papr_db(chirp_sequence(go, 2, 1, 0))) < 1e-9);
  RadarWaveform rot = make_rotated_waveform(go, 0, 0, {2, 1, 3, 2});
  CHECK(std::abs(papr_db(rot.x)) < 1e-9);
  // scale invariance and the zero-input guard
  TDSequence x = pulsone(g, 1, 2);
  for (cd& v : x.s) v *= cd(0.0, 3.7);
  CHECK(papr_db(x) == doctest::Approx(papr_db(pulsone(g, 1, 2))).epsilon(1e-12));
  TDSequence zero(g);
  CHECK_THROWS(papr_db(zero));
}

TEST_CASE("papr ccdf is non-increasing step curve over sorted draws") {
  GridParams g = make_grid(8, 8, 30e3);
  Rng rng(71);
  auto gen = [&g](Rng& r) {
    TDSequence x(g);
    for (cd& v : x.s) v = r.cgaussian();
    return x;
  };
  auto curve = papr_ccdf(gen, 40, rng);
  REQUIRE(curve.size() == 40);
  CHECK(curve.front().second == doctest::Approx(1.0));
  CHECK(curve.back().second == doctest::Approx(1.0 / 40.0));
  for (size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].first >= curve[i - 1].first);
    CHECK(curve[i].second <= curve[i - 1].second);
  }
  // degenerate generator: every draw lands on the same PAPR
  auto fixed = [&g](Rng&) { return pulsone(g, 0, 0); };
  auto flat = papr_ccdf(fixed, 5, rng);
  for (auto& [v, p] : flat)
    CHECK(v == doctest::Approx(10.0 * std::log10(double(g.M))));
}

TEST_CASE("phase coded baseline holds chips constant and unit modulus") {
  GridParams g = make_grid(13, 16, 30e3);
  TDSequence x = phase_coded_baseline(3, g);
  double e = 0.0;
  for (const cd& v : x.s) e += std::norm(v);
  CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
  const double amp = 1.0 / std::sqrt(double(g.MN));
  for (const cd& v : x.s) CHECK(std::abs(v) == doctest::Approx(amp));
  // one chip per Doppler row: M identical samples
  for (long long m = 0; m < g.N; ++m)
    for (long long r = 1; r < g.M; ++r)
      CHECK(std::abs(x.s[m * g.M + r] - x.s[m * g.M]) < 1e-12);
  CHECK_THROWS(phase_coded_baseline(2, g));  // gcd(2, 16) != 1
  CHECK_THROWS(phase_coded_baseline(0, g));
}

TEST_CASE("pulsone imaging fast path matches the direct correlation") {
  GridParams g = make_grid(11, 13, 30e3);
  RadarWaveform tx = make_pulsone_waveform(g, 3, 5);
  Rng rng(72);
  TDSequence rx = random_sequence(g, rng);
  PointList region = box_region(g, -5, 5, -6, 6);
  AmbiguitySurface fast = radar_image(rx, tx, region);
  AmbiguitySurface direct = cross_ambiguity(rx, tx.x, region);
  CHECK(max_surface_diff(fast, direct) < 1e-9);
}

TEST_CASE("rotated imaging carries the intertwining phase exactly") {
  GridParams g = make_grid(13, 17, 30e3);
  const SymplecticParams rots[] = {{2, 1, 3, 2}, {1, 2, 1, 3}, {3, 2, 4, 3}};
  Rng rng(73);
  for (const SymplecticParams& p : rots) {
    RadarWaveform tx = make_rotated_waveform(g, 2, 3, p);
    // a received echo mixture keeps the check honest off the diagonal
    std::vector<PathSpec> paths = {{cd(1.0, 0.0), 2.0 / g.B, 3.0 / g.T},
                                   {cd(0.3, -0.5), 5.0 / g.B, -2.0 / g.T}};
    TDSequence rx = radar_receive(tx.x, paths, std::numeric_limits<double>::infinity(), rng, true);
    PointList region = box_region(g, -6, 6, -8, 8);
    AmbiguitySurface fast = radar_image(rx, tx, region);
    AmbiguitySurface direct = cross_ambiguity(rx, tx.x, region);
    CHECK(max_surface_diff(fast, direct) < 1e-9);
  }
}

TEST_CASE("waveform selection prefers the lattice then scans line slopes") {
  GridParams g = make_grid(17, 19, 30e3);
  // fits inside one fundamental domain: the lattice wins
  RegionBox small{-3, 3, -4, 4};
  SelectedWaveform sel = select_waveform(small, g);
  CHECK(sel.subgroup.kind == SubgroupKind::RectLattice);
  CHECK(crystallization_check(subgroup_index_set(sel.subgroup), small, g.MN));
  // too wide in delay for the lattice: first compliant line slope wins
  RegionBox wide{-10, 9, -1, 1};
  CHECK_FALSE(crystallization_check(subgroup_index_set(rect_subgroup(g)),
                                    wide, g.MN));
  SelectedWaveform line = select_waveform(wide, g);
  CHECK(line.subgroup.kind == SubgroupKind::Line);
  CHECK(crystallization_check(subgroup_index_set(line.subgroup), wide, g.MN));
  for (long long a = 1; a < line.subgroup.alpha; ++a) {
    if (std::gcd(a, g.MN) != 1) continue;
    CHECK_FALSE(crystallization_check(
        subgroup_index_set(line_subgroup(g, a)), wide, g.MN));
  }
  // the returned waveform is an eigenvector of its subgroup
  EigenCheckResult ec = eigen_check(line.waveform, line.subgroup, 1e-9);
  CHECK(ec.is_eigenvector);
  // larger than any subgroup quotient: nothing can stay alias-free
  CHECK_THROWS(select_waveform(RegionBox{0, 18, 0, 18}, g));
}

TEST_CASE("scene realization preserves targets and draws calibrated clutter") {
  GridParams g = make_grid(16, 16, 30e3);
  SceneSpec scene;
  scene.targets = {{cd(0.8, 0.1), 3.0 / g.B, 2.0 / g.T},
                   {cd(-0.2, 0.4), 7.0 / g.B, -1.0 / g.T}};
  scene.has_clutter = true;
  scene.clutter.gamma_db = -6.0;
  scene.clutter.n_scatterers = 32;
  scene.clutter.region = {0, 9, -3, 3};
  Rng rng(74);
  double power = 0.0;
  const int draws = 400;
  for (int d = 0; d < draws; ++d) {
    std::vector<PathSpec> paths = realize_scene(scene, g, rng);
    REQUIRE(paths.size() == scene.targets.size() + 32);
    for (size_t i = 0; i < scene.targets.size(); ++i) {
      CHECK(paths[i].gain == scene.targets[i].gain);
      CHECK(paths[i].delay_s == scene.targets[i].delay_s);
    }
    for (size_t i = scene.targets.size(); i < paths.size(); ++i) {
      long long k = std::llround(paths[i].delay_s * g.B);
      long long l = std::llround(paths[i].doppler_hz * g.T);
      CHECK(scene.clutter.region.contains(k, l));
      power += std::norm(paths[i].gain);
    }
  }
  // mean clutter power matches the configured total within sampling error
  CHECK(power / draws ==
        doctest::Approx(std::pow(10.0, -0.6)).epsilon(0.05));
  SceneSpec bad;
  bad.targets = {{cd(1.0, 0.0), -1.0 / g.B, 0.0}};
  CHECK_THROWS(realize_scene(bad, g, rng));
}

TEST_CASE("polarimetric channel composes coupling and scattering matrices") {
  GridParams g = make_grid(16, 16, 30e3);
  PolTarget t;
  t.k = 2;
  t.l = 1;
  t.amplitude = cd(0.9, -0.3);
  t.sigma << cd(1.0, 0.0), cd(0.1, 0.05), cd(-0.02, 0.1), cd(0.7, 0.2);
  Eigen::Matrix2cd ctx, crx;
  ctx << 1.0, cd(0.0, 0.05), cd(0.05, 0.0), 1.0;
  crx << 1.0, cd(0.02, -0.01), cd(-0.01, 0.02), 1.0;
  PolChannel pol = make_pol_channel(g, {t}, ctx, crx);
  Eigen::Matrix2cd want = crx * t.sigma * ctx;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      REQUIRE(pol.h[j][i].taps.size() == 1);
      CHECK(pol.h[j][i].taps[0].k == t.k);
      CHECK(pol.h[j][i].taps[0].l == t.l);
      CHECK(std::abs(pol.h[j][i].taps[0].h - t.amplitude * want(j, i)) <
            1e-12);
    }
  // identity couplings and a diagonal scatterer leave cross channels empty
  PolTarget diag = t;
  diag.sigma << cd(1.0, 0.0), cd(0.0, 0.0), cd(0.0, 0.0), cd(0.5, 0.0);
  PolChannel clean = make_pol_channel(g, {diag}, Eigen::Matrix2cd::Identity(),
                                      Eigen::Matrix2cd::Identity());
  CHECK(clean.h[0][1].taps.empty());
  CHECK(clean.h[1][0].taps.empty());
  CHECK(clean.h[0][0].taps.size() == 1);
}

TEST_CASE("effective taps act on sequences as phase-twisted shifts") {
  GridParams g = make_grid(8, 8, 30e3);
  Rng rng(75);
  TDSequence x = random_sequence(g, rng);
  EffectiveChannel h;
  h.grid = g;
  h.taps = {{1, 2, cd(0.8, -0.1)}, {3, -1, cd(0.0, 0.4)}};
  TDSequence y = apply_effective_td(h, x);
  for (long long n = 0; n < g.MN; ++n) {
    cd want(0.0, 0.0);
    for (const DDTap& t : h.taps) {
      long long src = fmod_pos(n - t.k, g.MN);
      want += t.h * x.s[src] * cis(kTwoPi * double(t.l) * double(src) / g.MN);
    }
    CHECK(std::abs(y.s[n] - want) < 1e-12);
  }
}

TEST_CASE("orthogonal pulsone pair separates the polarimetric matrix") {
  GridParams g = make_grid(16, 16, 30e3);
  // pulsones from different lattice cosets have disjoint ambiguity supports
  RadarWaveform tx_h = make_pulsone_waveform(g, 0, 0);
  RadarWaveform tx_v = make_pulsone_waveform(g, g.M / 2, g.N / 2);
  PolTarget t;
  t.k = 1;
  t.l = 1;
  t.amplitude = cd(1.0, 0.0);
  t.sigma << cd(0.9, 0.1), cd(0.15, -0.1), cd(-0.05, 0.2), cd(0.6, -0.3);
  PolChannel pol = make_pol_channel(g, {t}, Eigen::Matrix2cd::Identity(),
                                    Eigen::Matrix2cd::Identity());
  Rng rng(76);
  DualPolRx rx = dual_pol_simulate(tx_h.x, tx_v.x, pol,
                                   std::numeric_limits<double>::infinity(), rng);
  PolEstimate est = instant_polarimetry(rx.y_h, rx.y_v, tx_h, tx_v, 3, 3);
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      cd got(0.0, 0.0);
      double off = 0.0;
      for (const DDTap& tap : est.h[j][i].taps) {
        if (tap.k == t.k && tap.l == t.l)
          got = tap.h;
        else
          off = std::max(off, std::abs(tap.h));
      }
      CHECK(std::abs(got - t.sigma(j, i)) < 1e-9);
      CHECK(off < 1e-9);
    }
}

TEST_CASE("oracle cell detector sweeps out a monotone roc curve") {
  GridParams g = make_grid(8, 8, 30e3);
  RadarWaveform tx = make_pulsone_waveform(g, 0, 0);
  Point cell{2, 3};
  auto scene_gen = [&](bool present, Rng&) {
    SceneSpec s;
    if (present)
      s.targets = {{cd(1.0, 0.0), 2.0 / g.B, 3.0 / g.T}};
    return s;
  };
  std::vector<double> thresholds = {0.0, 0.2, 0.4, 0.6, 0.8, 1.5};
  Rng rng(77);
  std::vector<RocPoint> roc =
      detection_roc(scene_gen, tx, thresholds, 60, 10.0, cell, rng);
  REQUIRE(roc.size() == thresholds.size());
  for (size_t i = 1; i < roc.size(); ++i) {
    CHECK(roc[i].pd <= roc[i - 1].pd);
    CHECK(roc[i].pfa <= roc[i - 1].pfa);
  }
  for (const RocPoint& p : roc) CHECK(p.pd >= p.pfa);
  CHECK(roc.front().pd == doctest::Approx(1.0));
  CHECK(roc.front().pfa == doctest::Approx(1.0));  // |noise| > 0 always
  CHECK(roc.back().pfa <= 0.05);
  // the unit echo concentrates near 1 at the matched cell
  CHECK(roc[3].pd > 0.85);
  CHECK(roc[3].pfa < 0.15);
}

TEST_CASE("symplectic library rotates a template once per parameter set") {
  GridParams g = make_grid(13, 17, 30e3);
  TDSequence tmpl = pulsone(g, 0, 0);
  std::vector<SymplecticParams> ps = {{2, 1, 3, 2}, {1, 2, 1, 3}};
  std::vector<TDSequence> lib = waveform_library(tmpl, ps);
  REQUIRE(lib.size() == 2);
  for (size_t i = 0; i < lib.size(); ++i) {
    TDSequence want = gdaft(tmpl, ps[i]);
    double worst = 0.0;
    for (long long n = 0; n < g.MN; ++n)
      worst = std::max(worst, std::abs(lib[i].s[n] - want.s[n]));
    CHECK(worst == 0.0);
    double e = 0.0;
    for (const cd& v : lib[i].s) e += std::norm(v);
    CHECK(e == doctest::Approx(1.0).epsilon(1e-12));
  }
}
