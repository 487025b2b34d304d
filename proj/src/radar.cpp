#include "zakdd/radar.hpp"

#include <algorithm>
#include <cmath>

namespace zakdd {
namespace {

long long gcd_ll(long long a, long long b) {
  while (b != 0) {
    long long t = a % b;
    a = b;
    b = t;
  }
  return a < 0 ? -a : a;
}

}  // namespace

std::vector<PathSpec> realize_scene(const SceneSpec& scene,
                                    const GridParams& g, Rng& rng) {
  std::vector<PathSpec> paths = scene.targets;
  for (const PathSpec& p : paths)
    require(p.delay_s >= 0.0, "realize_scene: target delay must be >= 0");
  if (scene.has_clutter && scene.clutter.n_scatterers > 0) {
    const ClutterSpec& c = scene.clutter;
    double total = std::pow(10.0, c.gamma_db / 10.0);
    double per = std::sqrt(total / c.n_scatterers);
    for (int i = 0; i < c.n_scatterers; ++i) {
      long long span_k = c.region.k_max - c.region.k_min + 1;
      long long span_l = c.region.l_max - c.region.l_min + 1;
      long long k = c.region.k_min + (long long)(rng.uniform() * span_k);
      long long l = c.region.l_min + (long long)(rng.uniform() * span_l);
      PathSpec p;
      p.gain = per * rng.cgaussian();
      p.delay_s = double(k) / g.B;
      p.doppler_hz = double(l) / g.T;
      paths.push_back(p);
    }
  }
  return paths;
}

TDSequence radar_receive(const TDSequence& tx,
                         const std::vector<PathSpec>& paths, double snr_db,
                         Rng& rng, bool cyclic) {
  ChannelInstance ch;
  ch.paths = paths;
  TDSequence y = apply_ltv(tx, ch, cyclic);
  add_awgn(y.s, snr_db, rng);
  return y;
}

RadarWaveform make_pulsone_waveform(const GridParams& g, int k0, int l0) {
  RadarWaveform w;
  w.x = pulsone(g, k0, l0);
  w.is_pulsone = true;
  w.k0 = k0;
  w.l0 = l0;
  return w;
}

RadarWaveform make_rotated_waveform(const GridParams& g, int k0, int l0,
                                    const SymplecticParams& p) {
  validate_symplectic(p, g.MN);
  RadarWaveform w;
  w.x = gdaft(pulsone(g, k0, l0), p);
  w.is_pulsone = true;
  w.k0 = k0;
  w.l0 = l0;
  w.rotated = true;
  w.rotation = p;
  return w;
}

RadarWaveform make_custom_waveform(const TDSequence& x) {
  RadarWaveform w;
  w.x = x;
  return w;
}

AmbiguitySurface radar_image(const TDSequence& rx, const RadarWaveform& tx,
                             const PointList& region) {
  if (tx.is_pulsone && !tx.rotated)
    return fast_cross_ambiguity_pulsone(rx, tx.k0, tx.l0, region);
  if (tx.is_pulsone && tx.rotated) {
    // x = G p. The intertwining G D_(kap,lam) = c D_g(kap,lam) G with
    //   c = exp(j pi (binv (a kap^2 - d k'^2) + 2 l' k') / MN),
    // (k',l') = g(kap,lam), gives
    //   <rx, D_(k,l) G p> = c(kap,lam) <G^-1 rx, D_(kap,lam) p>
    // at (kap,lam) = g^-1(k,l).
    const GridParams& g = rx.grid;
    const long long n = g.MN, n2 = 2 * n;
    const SymplecticParams& sp = tx.rotation;
    SymplecticParams inv{sp.d, fmod_pos(-sp.b, n), fmod_pos(-sp.c, n), sp.a};
    long long binv = gdaft_phase_inverse(sp.b, n);
    TDSequence w = gdaft_inverse(rx, sp);

    PointList pre(region.size());
    for (size_t i = 0; i < region.size(); ++i) {
      auto [kap, lam] =
          symplectic_apply(inv, region[i].first, region[i].second, n);
      pre[i] = {kap, lam};
    }
    AmbiguitySurface base =
        fast_cross_ambiguity_pulsone(w, tx.k0, tx.l0, pre);
    AmbiguitySurface out;
    out.grid = g;
    out.region = region;
    out.values.resize(region.size());
    for (size_t i = 0; i < region.size(); ++i) {
      long long kap = pre[i].first;
      long long kp = region[i].first, lp = region[i].second;
      long long e = fmod_pos(binv % n2 * ((kap * kap) % n2) % n2 * (sp.a % n2) -
                                 binv % n2 * ((kp * kp) % n2) % n2 *
                                     (sp.d % n2) +
                                 2 * lp % n2 * kp,
                             n2);
      out.values[i] = cis(kPi * double(e) / double(n)) * base.values[i];
    }
    return out;
  }
  return cross_ambiguity(rx, tx.x, region);
}

SelectedWaveform select_waveform(const RegionBox& C, const GridParams& g) {
  SubgroupSpec rect = rect_subgroup(g);
  if (crystallization_check(subgroup_index_set(rect), C, g.MN))
    return {rect, subgroup_eigenvector(rect, 0)};
  if (g.MN % 2 == 1) {
    for (long long alpha = 1; alpha <= (g.MN - 1) / 2; ++alpha) {
      if (gcd_ll(alpha, g.MN) != 1) continue;
      SubgroupSpec line = line_subgroup(g, alpha);
      if (crystallization_check(subgroup_index_set(line), C, g.MN))
        return {line, subgroup_eigenvector(line, 0)};
    }
  }
  fail("select_waveform: no subgroup keeps the region alias-free");
}

std::vector<TDSequence> waveform_library(
    const TDSequence& tmpl, const std::vector<SymplecticParams>& params) {
  std::vector<TDSequence> lib;
  lib.reserve(params.size());
  for (const SymplecticParams& p : params) lib.push_back(gdaft(tmpl, p));
  return lib;
}

double papr_db(const TDSequence& x) {
  double peak = 0.0, total = 0.0;
  for (const cd& v : x.s) {
    double p = std::norm(v);
    peak = std::max(peak, p);
    total += p;
  }
  require(total > 0.0, "papr_db: zero waveform");
  double mean = total / double(x.s.size());
  return 10.0 * std::log10(peak / mean);
}

std::vector<std::pair<double, double>> papr_ccdf(
    const std::function<TDSequence(Rng&)>& generator, int n_draws, Rng& rng) {
  require(n_draws >= 1, "papr_ccdf: need at least one draw");
  std::vector<double> values(n_draws);
  for (int i = 0; i < n_draws; ++i) values[i] = papr_db(generator(rng));
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> curve(n_draws);
  for (int i = 0; i < n_draws; ++i)
    curve[i] = {values[i], double(n_draws - i) / double(n_draws)};
  return curve;
}

TDSequence phase_coded_baseline(int root, const GridParams& g) {
  require(root >= 1 && gcd_ll(root, g.N) == 1,
          "phase_coded_baseline: root must be coprime to N");
  TDSequence x(g);
  const double scale = 1.0 / std::sqrt(double(g.MN));
  for (long long n = 0; n < g.MN; ++n) {
    long long m = n / g.M;
    long long q = g.N % 2 == 1 ? m * (m + 1) : m * m;
    x.s[n] = scale * cis(-kPi * double(root) * double(q % (2 * g.N)) / g.N);
  }
  return x;
}

PolChannel make_pol_channel(const GridParams& g,
                            const std::vector<PolTarget>& targets,
                            const Eigen::Matrix2cd& c_tx,
                            const Eigen::Matrix2cd& c_rx) {
  PolChannel pol;
  pol.grid = g;
  pol.c_tx = c_tx;
  pol.c_rx = c_rx;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) pol.h[j][i].grid = g;
  for (const PolTarget& t : targets) {
    Eigen::Matrix2cd hp = c_rx * t.sigma * c_tx;
    for (int j = 0; j < 2; ++j)
      for (int i = 0; i < 2; ++i) {
        cd v = t.amplitude * hp(j, i);
        if (v != cd(0.0, 0.0)) pol.h[j][i].taps.push_back({t.k, t.l, v});
      }
  }
  return pol;
}

TDSequence apply_effective_td(const EffectiveChannel& h, const TDSequence& x) {
  require(x.grid == h.grid, "apply_effective_td: grid mismatch");
  TDSequence y(x.grid);
  for (const DDTap& t : h.taps) {
    TDSequence shifted = heisenberg_shift(x, t.k, t.l);
    for (long long n = 0; n < x.grid.MN; ++n) y.s[n] += t.h * shifted.s[n];
  }
  return y;
}

DualPolRx dual_pol_simulate(const TDSequence& x_h, const TDSequence& x_v,
                            const PolChannel& pol, double snr_db, Rng& rng) {
  DualPolRx out;
  out.y_h = apply_effective_td(pol.h[0][0], x_h);
  TDSequence hv = apply_effective_td(pol.h[0][1], x_v);
  for (long long n = 0; n < pol.grid.MN; ++n) out.y_h.s[n] += hv.s[n];
  out.y_v = apply_effective_td(pol.h[1][0], x_h);
  TDSequence vv = apply_effective_td(pol.h[1][1], x_v);
  for (long long n = 0; n < pol.grid.MN; ++n) out.y_v.s[n] += vv.s[n];
  add_awgn(out.y_h.s, snr_db, rng);
  add_awgn(out.y_v.s, snr_db, rng);
  return out;
}

PolEstimate instant_polarimetry(const TDSequence& y_h, const TDSequence& y_v,
                                const RadarWaveform& tx_h,
                                const RadarWaveform& tx_v, int half_k,
                                int half_l) {
  const GridParams& g = y_h.grid;
  require(2 * half_k + 1 <= g.M && 2 * half_l + 1 <= g.N,
          "instant_polarimetry: window larger than fundamental period");
  PointList region = box_region(g, -half_k, half_k, -half_l, half_l);
  const TDSequence* ys[2] = {&y_h, &y_v};
  const RadarWaveform* txs[2] = {&tx_h, &tx_v};
  PolEstimate est;
  for (int j = 0; j < 2; ++j)
    for (int i = 0; i < 2; ++i) {
      AmbiguitySurface A = radar_image(*ys[j], *txs[i], region);
      est.h[j][i].grid = g;
      for (int a = -half_k; a <= half_k; ++a)
        for (int b = -half_l; b <= half_l; ++b)
          est.h[j][i].taps.push_back(
              {a, b, A.value_at(fmod_pos(a, g.MN), fmod_pos(b, g.MN))});
    }
  return est;
}

std::vector<RocPoint> detection_roc(
    const std::function<SceneSpec(bool, Rng&)>& scene_gen,
    const RadarWaveform& wf, const std::vector<double>& thresholds,
    int n_trials, double snr_db, Point target_cell, Rng& rng) {
  require(n_trials >= 1, "detection_roc: need at least one trial");
  PointList cell = {target_cell};
  std::vector<double> stat_present(n_trials), stat_absent(n_trials);
  for (int t = 0; t < n_trials; ++t) {
    for (int hyp = 0; hyp < 2; ++hyp) {
      SceneSpec scene = scene_gen(hyp == 1, rng);
      std::vector<PathSpec> paths = realize_scene(scene, wf.x.grid, rng);
      TDSequence y = radar_receive(wf.x, paths, snr_db, rng, false);
      AmbiguitySurface img = radar_image(y, wf, cell);
      (hyp == 1 ? stat_present : stat_absent)[t] = std::abs(img.values[0]);
    }
  }
  std::vector<RocPoint> roc;
  roc.reserve(thresholds.size());
  for (double thr : thresholds) {
    RocPoint p;
    p.threshold = thr;
    for (int t = 0; t < n_trials; ++t) {
      if (stat_present[t] > thr) p.pd += 1.0;
      if (stat_absent[t] > thr) p.pfa += 1.0;
    }
    p.pd /= n_trials;
    p.pfa /= n_trials;
    roc.push_back(p);
  }
  return roc;
}

}  // namespace zakdd
