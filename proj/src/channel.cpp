#include "zakdd/channel.hpp"

#include <cmath>

#include <json.hpp>

#include "zakdd/transforms.hpp"

namespace zakdd {

std::string channel_to_json(const ChannelInstance& ch) {
  nlohmann::json j;
  j["paths"] = nlohmann::json::array();
  for (const PathSpec& p : ch.paths) {
    j["paths"].push_back({{"gain_re", p.gain.real()},
                          {"gain_im", p.gain.imag()},
                          {"delay_s", p.delay_s},
                          {"doppler_hz", p.doppler_hz}});
  }
  return j.dump(2);
}

ChannelInstance channel_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  ChannelInstance ch;
  for (const auto& jp : j.at("paths")) {
    PathSpec p;
    p.gain = cd(jp.at("gain_re").get<double>(), jp.at("gain_im").get<double>());
    p.delay_s = jp.at("delay_s").get<double>();
    p.doppler_hz = jp.at("doppler_hz").get<double>();
    ch.paths.push_back(p);
  }
  return ch;
}

ChannelInstance sample_veh_a(double nu_max_hz, Rng& rng) {
  static const double delays_us[6] = {0.0, 0.31, 0.71, 1.09, 1.73, 2.51};
  static const double powers_db[6] = {0.0, -1.0, -9.0, -10.0, -15.0, -20.0};
  double total = 0.0;
  for (double pdb : powers_db) total += std::pow(10.0, pdb / 10.0);
  ChannelInstance ch;
  for (int i = 0; i < 6; ++i) {
    PathSpec p;
    double power = std::pow(10.0, powers_db[i] / 10.0) / total;
    p.gain = std::sqrt(power) * rng.cgaussian();
    p.delay_s = delays_us[i] * 1e-6;
    p.doppler_hz = nu_max_hz * std::cos(rng.uniform(0.0, kTwoPi));
    ch.paths.push_back(p);
  }
  return ch;
}

DDArray twisted_convolve(const EffectiveChannel& h, const DDArray& X) {
  const GridParams& g = h.grid;
  require(X.grid == g, "twisted_convolve: grid mismatch");
  DDArray Y(g);
  for (const DDTap& t : h.taps) {
    for (int k = 0; k < g.M; ++k) {
      for (int l = 0; l < g.N; ++l) {
        cd shifted = quasi_extend(X, k - t.k, l - t.l) *
                     cis(kTwoPi * double(t.l) * double(k - t.k) / g.MN);
        Y.at(k, l) += t.h * shifted;
      }
    }
  }
  return Y;
}

Eigen::MatrixXcd build_channel_matrix(const EffectiveChannel& h) {
  const GridParams& g = h.grid;
  Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(g.MN, g.MN);
  // Column k*N + l collects, for each tap (a, b), the quasi-periodic image
  // phase of the source cell and the twist phase of the shift.
  for (const DDTap& t : h.taps) {
    for (int k = 0; k < g.M; ++k) {
      int n = fdiv_floor(k + t.k, g.M);
      int kp = int(fmod_pos(k + t.k, g.M));
      for (int l = 0; l < g.N; ++l) {
        int lp = int(fmod_pos(l + t.l, g.N));
        // destination reads quasi_extend(X, kp - a, lp - b) with kp - a =
        // k - nM, so the image phase enters inverted and the twist phase
        // uses the un-wrapped source delay k - nM.
        cd phase = cis(-kTwoPi * double(n) * double(l) / g.N) *
                   cis(kTwoPi * double(t.l) * double(k - n * g.M) / g.MN);
        H(kp * g.N + lp, k * g.N + l) += t.h * phase;
      }
    }
  }
  return H;
}

TDSequence shape_and_modulate(const DDArray& X, const FilterSpec& w, int Q) {
  const GridParams& g = X.grid;
  require(Q >= 1, "shape_and_modulate: Q must be positive");
  const int L = g.MN * Q;
  const double dt = g.T / L;
  TDSequence x = idzt(X);
  const int J = int(std::ceil(w.trunc_bins * Q));
  std::vector<double> taps(2 * J + 1);
  for (int j = -J; j <= J; ++j)
    taps[j + J] = delay_factor(w, g, j * dt);
  TDSequence s;
  s.grid = g;
  s.s.assign(L, cd(0.0, 0.0));
  for (int n = 0; n < g.MN; ++n) {
    cd amp = x.s[n] * time_window(w, g, n * Q * dt);
    if (amp == cd(0.0, 0.0)) continue;
    for (int j = -J; j <= J; ++j) {
      int i = int(fmod_pos(n * Q + j, L));
      s.s[i] += amp * taps[j + J];
    }
  }
  return s;
}

TDSequence apply_ltv(const TDSequence& s, const ChannelInstance& ch,
                     bool cyclic) {
  const GridParams& g = s.grid;
  const int L = int(s.s.size());
  const double dt = g.T / L;
  TDSequence y;
  y.grid = g;
  y.s.assign(L, cd(0.0, 0.0));
  for (const PathSpec& p : ch.paths) {
    require(p.delay_s >= 0.0 && p.delay_s <= g.T,
            "apply_ltv: path delay outside [0, T]");
    long long r = std::llround(p.delay_s / dt);
    double tau_r = double(r) * dt;
    for (int u = 0; u < L; ++u) {
      long long src = u - r;
      if (cyclic) {
        src = fmod_pos(src, L);
      } else if (src < 0 || src >= L) {
        continue;
      }
      double t = u * dt;
      y.s[u] += p.gain * s.s[size_t(src)] *
                cis(kTwoPi * p.doppler_hz * (t - tau_r));
    }
  }
  return y;
}

DDArray receive_front_end(const TDSequence& y, const FilterSpec& w) {
  const GridParams& g = y.grid;
  const int L = int(y.s.size());
  require(L % g.MN == 0, "receive_front_end: length not a multiple of MN");
  const int Q = L / g.MN;
  const double dt = g.T / L;
  const int J = int(std::ceil(w.trunc_bins * Q));
  std::vector<double> taps(2 * J + 1);
  for (int j = -J; j <= J; ++j)
    taps[j + J] = delay_factor(w, g, -j * dt);  // conjugate-reversed, real
  TDSequence z;
  z.grid = g;
  z.s.assign(g.MN, cd(0.0, 0.0));
  for (int n = 0; n < g.MN; ++n) {
    cd acc(0.0, 0.0);
    for (int j = -J; j <= J; ++j) {
      int u = int(fmod_pos(n * Q - j, L));
      acc += taps[j + J] * y.s[u];
    }
    z.s[n] = acc * dt * time_window(w, g, n * Q * dt);
  }
  DDArray Z = dzt(z);
  for (cd& v : Z.a) v *= g.T;
  return Z;
}

void add_awgn(std::vector<cd>& v, double snr_db, Rng& rng) {
  if (std::isinf(snr_db) && snr_db > 0) return;
  double sigma = std::pow(10.0, -snr_db / 20.0);
  for (cd& x : v) x += sigma * rng.cgaussian();
}

EffectiveChannel probe_effective_channel(const ChannelInstance& ch,
                                         const FilterSpec& w,
                                         const GridParams& g, int Q,
                                         int half_k, int half_l) {
  require(2 * half_k + 1 <= g.M && 2 * half_l + 1 <= g.N,
          "probe_effective_channel: window does not fit the grid");
  const int kp = g.M / 2, lp = g.N / 2;
  DDArray pilot(g);
  pilot.at(kp, lp) = cd(1.0, 0.0);
  TDSequence s = shape_and_modulate(pilot, w, Q);
  TDSequence r = apply_ltv(s, ch, true);
  DDArray Y = receive_front_end(r, w);

  EffectiveChannel h;
  h.grid = g;
  double peak = 0.0;
  for (int a = -half_k; a <= half_k; ++a) {
    for (int b = -half_l; b <= half_l; ++b) {
      // Y approximates sum_ab h(a,b) dd_shift(pilot, a, b); the pilot image
      // at cell (kp + a, lp + b) carries phase e^{j 2 pi b kp / MN}.
      cd tap = quasi_extend(Y, kp + a, lp + b) *
               cis(-kTwoPi * double(b) * double(kp) / g.MN);
      h.taps.push_back({a, b, tap});
      peak = std::max(peak, std::abs(tap));
    }
  }
  std::vector<DDTap> kept;
  for (const DDTap& t : h.taps)
    if (std::abs(t.h) > 1e-7 * peak) kept.push_back(t);
  h.taps = std::move(kept);
  return h;
}

}  // namespace zakdd
