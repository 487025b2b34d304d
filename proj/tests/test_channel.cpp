#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "zakdd/channel.hpp"
#include "zakdd/common.hpp"
#include "zakdd/filters.hpp"
#include "zakdd/grid.hpp"
#include "zakdd/transforms.hpp"

using namespace zakdd;

namespace {

DDArray random_dd(const GridParams& g, Rng& rng) {
  DDArray X(g);
  for (auto& v : X.a) v = rng.cgaussian();
  return X;
}

double linf(const std::vector<cd>& a, const std::vector<cd>& b) {
  REQUIRE(a.size() == b.size());
  double m = 0.0;
  for (size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

ChannelInstance identity_channel() {
  ChannelInstance ch;
  ch.paths.push_back({cd(1.0, 0.0), 0.0, 0.0});
  return ch;
}

}  // namespace

TEST_CASE("channel JSON round trip preserves every path") {
  ChannelInstance ch;
  ch.paths.push_back({cd(0.3, -0.7), 1.25e-6, 412.5});
  ch.paths.push_back({cd(-1.0, 0.0), 0.0, -815.0});
  ChannelInstance back = channel_from_json(channel_to_json(ch));
  REQUIRE(back.paths.size() == ch.paths.size());
  for (size_t i = 0; i < ch.paths.size(); ++i) {
    CHECK(back.paths[i].gain == ch.paths[i].gain);
    CHECK(back.paths[i].delay_s == ch.paths[i].delay_s);
    CHECK(back.paths[i].doppler_hz == ch.paths[i].doppler_hz);
  }
}

TEST_CASE("vehicular profile draws are normalized and bounded") {
  Rng rng(31);
  const double nu_max = 815.0;
  double power = 0.0;
  const int trials = 4000;
  for (int t = 0; t < trials; ++t) {
    ChannelInstance ch = sample_veh_a(nu_max, rng);
    REQUIRE(ch.paths.size() == 6);
    double last = -1.0;
    for (const PathSpec& p : ch.paths) {
      CHECK(p.delay_s >= 0.0);
      CHECK(p.delay_s <= 2.51e-6);
      CHECK(p.delay_s > last);
      last = p.delay_s;
      CHECK(std::abs(p.doppler_hz) <= nu_max + 1e-9);
      power += std::norm(p.gain);
    }
  }
  CHECK(power / trials == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sinc loopback is the identity up to kernel truncation") {
  GridParams g = make_grid(8, 8, 30e3);
  DDArray X(g);
  X.at(4, 4) = 1.0;
  for (int Q : {4, 8}) {
    TDSequence s = shape_and_modulate(X, sinc_filter(), Q);
    REQUIRE(s.s.size() == size_t(g.MN) * Q);
    TDSequence y = apply_ltv(s, identity_channel(), true);
    DDArray Xh = receive_front_end(y, sinc_filter());
    // unit diagonal gain up to the truncated-tail droop
    CHECK(std::abs(Xh.at(4, 4)) == doctest::Approx(1.0).epsilon(0.03));
    double leak = 0.0;
    for (int i = 0; i < g.MN; ++i) leak += std::norm(Xh.a[i]);
    leak -= std::norm(Xh.at(4, 4));
    CHECK(leak < 5e-3);
  }
  // widening the kernel truncation shrinks the leakage
  FilterSpec wide = sinc_filter();
  wide.trunc_bins = 16.0;
  TDSequence s = shape_and_modulate(X, wide, 4);
  DDArray Xh = receive_front_end(s, wide);
  double leak = 0.0;
  for (int i = 0; i < g.MN; ++i) leak += std::norm(Xh.a[i]);
  leak -= std::norm(Xh.at(4, 4));
  CHECK(leak < 1e-3);
}

TEST_CASE("twisted convolution agrees with the channel matrix") {
  GridParams g = make_grid(8, 8, 30e3);
  Rng rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    EffectiveChannel h;
    h.grid = g;
    int taps = 3 + int(rng.next_u64() % 4);
    for (int i = 0; i < taps; ++i) {
      DDTap t;
      t.k = int(rng.next_u64() % unsigned(g.M)) - g.M / 2;
      t.l = int(rng.next_u64() % unsigned(g.N)) - g.N / 2;
      t.h = rng.cgaussian();
      h.taps.push_back(t);
    }
    DDArray X = random_dd(g, rng);
    DDArray Y = twisted_convolve(h, X);
    Eigen::MatrixXcd H = build_channel_matrix(h);
    std::vector<cd> x = dd_to_vector(X);
    Eigen::Map<Eigen::VectorXcd> xv(x.data(), g.MN);
    Eigen::VectorXcd yv = H * xv;
    std::vector<cd> y(yv.data(), yv.data() + g.MN);
    CHECK(linf(dd_to_vector(Y), y) < 1e-12);
  }
}

TEST_CASE("twisted convolution applies the delay-wrap phase") {
  GridParams g = make_grid(4, 4, 30e3);
  EffectiveChannel h;
  h.grid = g;
  h.taps.push_back({1, 2, cd(0.5, -0.25)});
  DDArray X(g);
  DDArray Y = twisted_convolve(h, X);  // zero in, zero out
  for (const cd& v : Y.a) CHECK(std::abs(v) == 0.0);
  // single tap: Y[k,l] = h * X~[k-k0, l-l0] * exp(j2pi l0 (k-k0) / MN)
  Rng rng(34);
  X = random_dd(g, rng);
  Y = twisted_convolve(h, X);
  for (int k = 0; k < g.M; ++k)
    for (int l = 0; l < g.N; ++l) {
      cd expect = cd(0.5, -0.25) * quasi_extend(X, k - 1, l - 2) *
                  cis(kTwoPi * 2.0 * double(k - 1) / double(g.MN));
      CHECK(std::abs(Y.at(k, l) - expect) < 1e-13);
    }
}

TEST_CASE("probe recovers on-grid path gains and predicts the chain") {
  GridParams g = make_grid(8, 8, 30e3);
  const int Q = 4;
  ChannelInstance ch;
  ch.paths.push_back({cd(0.8, 0.1), 1.0 / g.B, 1.0 / g.T});
  ch.paths.push_back({cd(-0.2, 0.4), 2.0 / g.B, 0.0});
  FilterSpec w = sinc_filter();
  w.trunc_bins = 32.0;  // push the sinc-tail droop below the gain tolerance
  EffectiveChannel h = probe_effective_channel(ch, w, g, Q, 3, 3);
  REQUIRE(!h.taps.empty());
  cd t11, t20;
  for (const DDTap& t : h.taps) {
    if (t.k == 1 && t.l == 1) t11 = t.h;
    if (t.k == 2 && t.l == 0) t20 = t.h;
  }
  CHECK(std::abs(t11 - cd(0.8, 0.1)) < 0.03 * std::abs(cd(0.8, 0.1)));
  CHECK(std::abs(t20 - cd(-0.2, 0.4)) < 0.03 * std::abs(cd(-0.2, 0.4)));
  // probed taps predict the physical chain up to the unmodeled kernel ripple
  Rng rng(35);
  DDArray X = random_dd(g, rng);
  TDSequence s = shape_and_modulate(X, w, Q);
  DDArray direct = receive_front_end(apply_ltv(s, ch, true), w);
  DDArray predicted = twisted_convolve(h, X);
  double scale = 0.0;
  for (const cd& v : direct.a) scale = std::max(scale, std::abs(v));
  CHECK(linf(direct.a, predicted.a) < 0.15 * scale);
}

TEST_CASE("probe predicts a fractional-delay channel through an RRC chain") {
  GridParams g = make_grid(8, 8, 30e3);
  const int Q = 4;
  ChannelInstance ch;
  // off-grid delay spreads over a few compact RRC taps; Doppler stays on-grid
  ch.paths.push_back({cd(0.9, -0.3), 0.6 / g.B, 0.0});
  FilterSpec w = rrc_filter(0.6, 0.6);
  EffectiveChannel h = probe_effective_channel(ch, w, g, Q, 3, 3);
  Rng rng(36);
  DDArray X = random_dd(g, rng);
  TDSequence s = shape_and_modulate(X, w, Q);
  DDArray direct = receive_front_end(apply_ltv(s, ch, true), w);
  DDArray predicted = twisted_convolve(h, X);
  double scale = 0.0;
  for (const cd& v : direct.a) scale = std::max(scale, std::abs(v));
  CHECK(linf(direct.a, predicted.a) < 0.05 * scale);
  // the fractional delay splits mostly across the two straddling cells
  double a0 = 0.0, a1 = 0.0;
  for (const DDTap& t : h.taps) {
    if (t.k == 0 && t.l == 0) a0 = std::abs(t.h);
    if (t.k == 1 && t.l == 0) a1 = std::abs(t.h);
  }
  CHECK(a0 > 0.25);
  CHECK(a1 > 0.25);
}

TEST_CASE("apply_ltv honors delay rounding, Doppler phase, and edges") {
  GridParams g = make_grid(4, 4, 30e3);
  TDSequence s(g);
  Rng rng(37);
  for (auto& v : s.s) v = rng.cgaussian();
  const double dt = g.T / double(g.MN);
  // pure Doppler: per-sample phase ramp
  ChannelInstance dop;
  dop.paths.push_back({cd(1.0, 0.0), 0.0, 3.0 / g.T});
  TDSequence yd = apply_ltv(s, dop, true);
  for (size_t n = 0; n < s.s.size(); ++n) {
    cd expect = s.s[n] * cis(kTwoPi * (3.0 / g.T) * double(n) * dt);
    CHECK(std::abs(yd.s[n] - expect) < 1e-12);
  }
  // delays round to the nearest sample
  ChannelInstance del;
  del.paths.push_back({cd(1.0, 0.0), 1.4 * dt, 0.0});
  TDSequence yr = apply_ltv(s, del, true);
  for (size_t n = 0; n < s.s.size(); ++n)
    CHECK(std::abs(yr.s[n] - s.s[(n + s.s.size() - 1) % s.s.size()]) < 1e-12);
  // acyclic mode drops the wrapped head instead of folding it
  TDSequence ya = apply_ltv(s, del, false);
  CHECK(std::abs(ya.s[0]) == 0.0);
  for (size_t n = 1; n < s.s.size(); ++n)
    CHECK(std::abs(ya.s[n] - s.s[n - 1]) < 1e-12);
  // out-of-range delay rejected
  ChannelInstance bad;
  bad.paths.push_back({cd(1.0, 0.0), 2.0 * g.T, 0.0});
  CHECK_THROWS(apply_ltv(s, bad, true));
}

TEST_CASE("awgn variance tracks the SNR and +inf is a no-op") {
  Rng rng(38);
  std::vector<cd> v(200000, cd(0.0, 0.0));
  add_awgn(v, 7.0, rng);
  double var = 0.0;
  for (const cd& z : v) var += std::norm(z);
  var /= double(v.size());
  CHECK(var == doctest::Approx(std::pow(10.0, -0.7)).epsilon(0.02));

  std::vector<cd> w = {cd(1.0, 2.0), cd(-0.5, 0.25)};
  std::vector<cd> w0 = w;
  add_awgn(w, std::numeric_limits<double>::infinity(), rng);
  CHECK(w[0] == w0[0]);
  CHECK(w[1] == w0[1]);
}
