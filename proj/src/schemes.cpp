#include "zakdd/schemes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include "zakdd/ambiguity.hpp"
#include "zakdd/rxchain.hpp"
#include "zakdd/waveforms.hpp"

namespace zakdd {
namespace {

// E[l^2] = 2.5 per rail over the uniform level alphabet {-2,-1,1,2}, so
// 1/sqrt(5) gives unit mean symbol energy.
constexpr double kTcmScale = 0.44721359549995793;  // 1/sqrt(5)

// Encode one real stream, termination included; levels in {-2,-1,1,2}.
std::vector<int> tcm_encode_stream(const std::vector<int>& bits) {
  std::vector<int> levels;
  levels.reserve(bits.size() + 2);
  int b2 = 0, b1 = 0;
  auto push = [&](int b) {
    levels.push_back(tcm_level(b2, b1, b));
    b2 = b1;
    b1 = b;
  };
  for (int b : bits) push(b);
  push(0);
  push(0);
  return levels;
}

// Viterbi over the 4-state trellis; obs are real observations in integer
// level units. The last two steps are termination (input forced to 0).
std::vector<int> tcm_decode_stream(const std::vector<double>& obs) {
  const int n = int(obs.size());
  require(n >= 2, "tcm_viterbi_decode: stream shorter than termination");
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(4, inf);
  cost[0] = 0.0;
  // predecessor state and input bit per (step, state)
  std::vector<std::array<int, 4>> prev_state(n), prev_bit(n);
  for (int t = 0; t < n; ++t) {
    std::vector<double> next_cost(4, inf);
    prev_state[t].fill(-1);
    prev_bit[t].fill(0);
    const int b_max = t >= n - 2 ? 0 : 1;
    for (int s = 0; s < 4; ++s) {
      if (cost[s] == inf) continue;
      const int b2 = s >> 1, b1 = s & 1;
      for (int b = 0; b <= b_max; ++b) {
        double d = obs[t] - tcm_level(b2, b1, b);
        double c = cost[s] + d * d;
        int ns = ((b1 << 1) | b);
        if (c < next_cost[ns]) {
          next_cost[ns] = c;
          prev_state[t][ns] = s;
          prev_bit[t][ns] = b;
        }
      }
    }
    cost = next_cost;
  }
  std::vector<int> bits(n);
  int s = 0;  // termination drives the path back to state 0
  for (int t = n - 1; t >= 0; --t) {
    bits[t] = prev_bit[t][s];
    s = prev_state[t][s];
  }
  bits.resize(n - 2);
  return bits;
}

Eigen::VectorXcd to_vec(const std::vector<cd>& v) {
  return Eigen::Map<const Eigen::VectorXcd>(v.data(), Eigen::Index(v.size()));
}

}  // namespace

int tcm_level(int b_prev2, int b_prev1, int b_cur) {
  int g11 = b_prev1 & 1;
  int g12 = (b_prev2 ^ b_prev1 ^ b_cur) & 1;
  int raw = (g11 ? -1 : 1) - 3 * (g12 ? -1 : 1);
  return raw / 2;
}

std::vector<cd> tcm_encode(const std::vector<int>& bits) {
  require(bits.size() % 2 == 0, "tcm_encode: bit count must be even");
  std::vector<int> bi, bq;
  for (size_t i = 0; i < bits.size(); ++i)
    (i % 2 == 0 ? bi : bq).push_back(bits[i]);
  std::vector<int> li = tcm_encode_stream(bi), lq = tcm_encode_stream(bq);
  std::vector<cd> symbols(li.size());
  for (size_t i = 0; i < li.size(); ++i)
    symbols[i] = kTcmScale * cd(double(li[i]), double(lq[i]));
  return symbols;
}

std::vector<int> tcm_viterbi_decode(const std::vector<cd>& symbols,
                                    double /*sigma2*/) {
  std::vector<double> oi(symbols.size()), oq(symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) {
    oi[i] = symbols[i].real() / kTcmScale;
    oq[i] = symbols[i].imag() / kTcmScale;
  }
  std::vector<int> bi = tcm_decode_stream(oi), bq = tcm_decode_stream(oq);
  std::vector<int> bits(bi.size() + bq.size());
  for (size_t i = 0; i < bi.size(); ++i) {
    bits[2 * i] = bi[i];
    bits[2 * i + 1] = bq[i];
  }
  return bits;
}

EffectiveChannel estimate_from_data(const TDSequence& y,
                                    const TDSequence& x_hat, int half_k,
                                    int half_l) {
  const GridParams& g = y.grid;
  require(2 * half_k + 1 <= g.M && 2 * half_l + 1 <= g.N,
          "estimate_from_data: window larger than fundamental period");
  double e_frame = frame_energy(x_hat.s);
  require(e_frame > 0.0, "estimate_from_data: zero reference frame");
  PointList region = box_region(g, -half_k, half_k, -half_l, half_l);
  AmbiguitySurface A = cross_ambiguity(y, x_hat, region);
  EffectiveChannel h;
  h.grid = g;
  for (int a = -half_k; a <= half_k; ++a)
    for (int b = -half_l; b <= half_l; ++b)
      h.taps.push_back(
          {a, b,
           A.value_at(fmod_pos(a, g.MN), fmod_pos(b, g.MN)) / e_frame});
  return h;
}

namespace {

double tap_error_vs(const EffectiveChannel& est, const EffectiveChannel& truth) {
  std::map<std::pair<int, int>, cd> t;
  double denom = 0.0;
  for (const DDTap& tap : truth.taps) {
    t[{tap.k, tap.l}] = tap.h;
    denom += std::norm(tap.h);
  }
  double num = 0.0;
  for (const DDTap& tap : est.taps) {
    auto it = t.find({tap.k, tap.l});
    cd ref = it == t.end() ? cd(0.0, 0.0) : it->second;
    num += std::norm(tap.h - ref);
    if (it != t.end()) t.erase(it);
  }
  for (const auto& [kl, v] : t) num += std::norm(v);
  return denom > 0.0 ? num / denom : num;
}

}  // namespace

std::vector<DiffFrameStats> differential_run(
    const GridParams& g, const std::vector<EffectiveChannel>& channels,
    int pilot_period, double snr_db, int half_k, int half_l, Rng& rng) {
  require(pilot_period >= 1, "differential_run: pilot_period must be >= 1");
  const double sigma2 =
      std::isinf(snr_db) ? 0.0 : std::pow(10.0, -snr_db / 10.0);
  const int kp = g.M / 2, lp = g.N / 2;

  DDArray pilot(g);
  pilot.at(kp, lp) = cd(std::sqrt(double(g.MN)), 0.0);
  const Eigen::VectorXcd pilot_vec = to_vec(pilot.a);

  std::vector<DiffFrameStats> stats;
  EffectiveChannel est;
  bool have_estimate = false;
  for (size_t t = 0; t < channels.size(); ++t) {
    Eigen::MatrixXcd H = build_channel_matrix(channels[t]);
    DiffFrameStats fs;
    if (t % size_t(pilot_period) == 0) {
      fs.is_pilot = true;
      Eigen::VectorXcd y = H * pilot_vec;
      DDArray y_dd(g);
      for (long long i = 0; i < g.MN; ++i) y_dd.a[i] = y[i];
      add_awgn(y_dd.a, snr_db, rng);
      est = estimate_from_data(idzt(y_dd), idzt(pilot), half_k, half_l);
      have_estimate = true;
    } else {
      require(have_estimate, "differential_run: no pilot before data");
      std::vector<int> bits(2 * size_t(g.MN));
      for (int& b : bits) b = int(rng.next_u64() & 1u);
      std::vector<cd> x = qam4_map_bits(bits);
      Eigen::VectorXcd y = H * to_vec(x);
      DDArray y_dd(g);
      for (long long i = 0; i < g.MN; ++i) y_dd.a[i] = y[i];
      add_awgn(y_dd.a, snr_db, rng);

      Eigen::MatrixXcd H_est = build_channel_matrix(est);
      MmseResult eq = mmse_equalize(H_est, to_vec(y_dd.a), sigma2);
      std::vector<cd> x_eq(eq.x.data(), eq.x.data() + eq.x.size());
      std::vector<int> bits_hat = qam4_demap_symbols(x_eq);
      fs.ber = double(count_bit_errors(bits, bits_hat)) / double(bits.size());

      DDArray x_hat(g);
      std::vector<cd> resym = qam4_map_bits(bits_hat);
      x_hat.a = resym;
      est = estimate_from_data(idzt(y_dd), idzt(x_hat), half_k, half_l);
    }
    fs.tap_error = tap_error_vs(est, channels[t]);
    stats.push_back(fs);
  }
  return stats;
}

std::vector<EffectiveChannel> drifted_channel_sequence(
    const GridParams& g, const ChannelInstance& base, const FilterSpec& w,
    int Q, int half_k, int half_l, int n_frames) {
  // Effective taps are linear in path gains, so probe each path alone and
  // recombine with the per-frame Doppler phase drift.
  std::vector<EffectiveChannel> per_path;
  for (const PathSpec& p : base.paths) {
    ChannelInstance one;
    one.paths.push_back(p);
    per_path.push_back(
        probe_effective_channel(one, w, g, Q, half_k, half_l));
  }
  std::vector<EffectiveChannel> frames;
  for (int t = 0; t < n_frames; ++t) {
    std::map<std::pair<int, int>, cd> acc;
    for (size_t i = 0; i < per_path.size(); ++i) {
      cd drift = cis(kTwoPi * base.paths[i].doppler_hz * g.T * t);
      for (const DDTap& tap : per_path[i].taps)
        acc[{tap.k, tap.l}] += drift * tap.h;
    }
    EffectiveChannel h;
    h.grid = g;
    for (const auto& [kl, v] : acc) h.taps.push_back({kl.first, kl.second, v});
    frames.push_back(std::move(h));
  }
  return frames;
}

MubBases make_mub_bases(const GridParams& g, const SymplecticParams& p) {
  require(g.MN % 2 == 1, "make_mub_bases: MN must be odd");
  BasisSpec s1;
  s1.grid = g;
  s1.family = BasisFamily::ZakPulsone;
  BasisSpec s2;
  s2.grid = g;
  s2.family = BasisFamily::SpreadCazac;
  s2.symplectic = p;
  validate_basis(s2);

  MubBases out;
  out.grid = g;
  out.S1 = basis_matrix(s1);
  out.S2 = basis_matrix(s2);

  // |<S1_i, S2_j>| is the magnitude of S2_j's Zak coefficient at cell i, so
  // flatness of each column's Zak image is exactly mutual unbiasedness.
  const double target = 1.0 / std::sqrt(double(g.MN));
  double worst = 0.0;
  TDSequence col(g);
  for (long long j = 0; j < g.MN; ++j) {
    for (long long n = 0; n < g.MN; ++n) col.s[n] = out.S2(n, j);
    DDArray Z = dzt(col);
    for (const cd& v : Z.a)
      worst = std::max(worst, std::abs(std::abs(v) / target - 1.0));
  }
  out.max_flatness_deviation = worst;
  require(worst < 1e-8, "make_mub_bases: basis pair is not mutually unbiased");
  return out;
}

void validate_mub_config(const MubConfig& cfg) {
  require(cfg.alpha > 0.0 && cfg.alpha <= 1.0,
          "mub config: alpha must lie in (0, 1]");
  require(cfg.delta > 0.0 && cfg.delta <= 1.0,
          "mub config: delta must lie in (0, 1]");
  require(cfg.turbo_iters >= 0, "mub config: turbo_iters must be >= 0");
}

int mub_second_frame_size(const GridParams& g, double delta) {
  return int(std::floor(delta * double(g.MN)));
}

double mub_beta1(const GridParams& g, const MubConfig& cfg) {
  return std::sqrt(cfg.alpha / double(g.MN));
}

double mub_beta2(const GridParams& g, const MubConfig& cfg) {
  int n2 = mub_second_frame_size(g, cfg.delta);
  if (n2 == 0 || cfg.alpha >= 1.0) return 0.0;
  return std::sqrt((1.0 - cfg.alpha) / double(n2));
}

Eigen::VectorXcd mub_transmit(const Eigen::VectorXcd& x1,
                              const Eigen::VectorXcd& x2,
                              const MubBases& bases, const MubConfig& cfg,
                              const Eigen::MatrixXcd& Qmat) {
  validate_mub_config(cfg);
  const GridParams& g = bases.grid;
  const int n2 = mub_second_frame_size(g, cfg.delta);
  require(x1.size() == g.MN, "mub_transmit: x1 must carry MN symbols");
  require(x2.size() == n2, "mub_transmit: x2 size must be floor(delta MN)");
  Eigen::VectorXcd mix = mub_beta1(g, cfg) * (bases.S1 * x1);
  double b2 = mub_beta2(g, cfg);
  if (n2 > 0 && b2 > 0.0) mix += b2 * (bases.S2.leftCols(n2) * x2);
  return Qmat * mix;
}

MubDetectResult mub_detect(const Eigen::VectorXcd& y, const MubBases& bases,
                           const MubConfig& cfg, double sigma2) {
  validate_mub_config(cfg);
  const GridParams& g = bases.grid;
  require(y.size() == g.MN, "mub_detect: observation must have MN entries");
  const int n2 = mub_second_frame_size(g, cfg.delta);
  const double b1 = mub_beta1(g, cfg), b2 = mub_beta2(g, cfg);
  const bool has_sparse = n2 > 0 && b2 > 0.0;

  auto decode = [&](const Eigen::VectorXcd& z) {
    std::vector<cd> zv(z.data(), z.data() + z.size());
    MubDetectResult r;  // reused as a {bits, symbols} pair
    if (cfg.use_tcm) {
      r.bits1 = tcm_viterbi_decode(zv, sigma2);
      std::vector<cd> re = tcm_encode(r.bits1);
      r.x1_hat = to_vec(re);
    } else {
      r.bits1 = qam4_demap_symbols(zv);
      std::vector<cd> re = qam4_map_bits(r.bits1);
      r.x1_hat = to_vec(re);
    }
    return std::make_pair(r.bits1, r.x1_hat);
  };

  std::vector<int> bits_full, bits_sparse;
  Eigen::VectorXcd x_full = Eigen::VectorXcd::Zero(g.MN);
  Eigen::VectorXcd x_sparse = Eigen::VectorXcd::Zero(std::max(n2, 0));
  bool full_valid = false, sparse_valid = false;

  auto decode_full = [&](const Eigen::VectorXcd& y_res) {
    Eigen::VectorXcd z = (bases.S1.adjoint() * y_res) / b1;
    std::tie(bits_full, x_full) = decode(z);
    full_valid = true;
  };
  auto decode_sparse = [&](const Eigen::VectorXcd& y_res) {
    if (!has_sparse) return;
    Eigen::VectorXcd z = (bases.S2.leftCols(n2).adjoint() * y_res) / b2;
    std::tie(bits_sparse, x_sparse) = decode(z);
    sparse_valid = true;
  };
  auto residual_minus_full = [&]() {
    return full_valid ? (y - b1 * (bases.S1 * x_full)).eval() : y;
  };
  auto residual_minus_sparse = [&]() {
    return sparse_valid && has_sparse
               ? (y - b2 * (bases.S2.leftCols(n2) * x_sparse)).eval()
               : y;
  };

  const bool full_first = cfg.order == DetectOrder::FullFirst || !has_sparse;
  for (int pass = 0; pass <= cfg.turbo_iters; ++pass) {
    if (full_first) {
      decode_full(residual_minus_sparse());
      decode_sparse(residual_minus_full());
    } else {
      decode_sparse(residual_minus_full());
      decode_full(residual_minus_sparse());
    }
  }

  MubDetectResult out;
  out.bits1 = bits_full;
  out.bits2 = bits_sparse;
  out.x1_hat = x_full;
  out.x2_hat = x_sparse;
  return out;
}

RatePoint effective_rate(double alpha, double delta, double snr_linear,
                         double d_free, int M, int N) {
  require(alpha >= 0.0 && alpha <= 1.0, "effective_rate: alpha in [0, 1]");
  require(delta >= 0.0 && delta <= 1.0, "effective_rate: delta in [0, 1]");
  const double MN = double(M) * double(N);
  const double P = snr_linear;  // unit noise variance
  RatePoint r;
  r.sinr1 = alpha * P / (1.0 + delta * (1.0 - alpha) * P / MN);
  r.p_s1 = 0.5 * std::erfc(std::sqrt(2.0 * d_free * r.sinr1) / std::sqrt(2.0));
  r.sinr2 = (1.0 - alpha) * P / (1.0 + alpha * P * r.p_s1 / MN);
  r.r1 = std::log2(1.0 + r.sinr1);
  r.r2 = std::log2(1.0 + r.sinr2);
  r.r_eff = r.r1 + delta * r.r2;
  return r;
}

double delta_bound(double alpha, double gamma, double sigma2) {
  require(gamma > 1.0, "delta_bound: gamma must exceed 1");
  require(alpha > 0.0 && alpha < 1.0, "delta_bound: alpha must lie in (0, 1)");
  double raw = (alpha - gamma * sigma2) / (gamma * (1.0 - alpha));
  return std::min(1.0, std::max(0.0, raw));
}

}  // namespace zakdd
