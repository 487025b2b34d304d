#pragma once
// Doubly-selective channel simulation and the shaped transmit/receive chain.
//
// Two views of the same channel: a continuous path list (delays in seconds,
// Dopplers in Hz) acting on oversampled time-domain frames, and an effective
// discrete channel h_eff[k, l] acting on the information grid by twisted
// convolution. probe_effective_channel connects the two.

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "zakdd/common.hpp"
#include "zakdd/filters.hpp"
#include "zakdd/grid.hpp"

namespace zakdd {

struct PathSpec {
  cd gain;
  double delay_s = 0.0;
  double doppler_hz = 0.0;
};

struct ChannelInstance {
  std::vector<PathSpec> paths;
};

std::string channel_to_json(const ChannelInstance& ch);
ChannelInstance channel_from_json(const std::string& text);

// Vehicular-A power-delay profile (powers normalized to unit total) with
// Rayleigh path gains and Jakes Dopplers nu_max cos(theta), theta uniform.
ChannelInstance sample_veh_a(double nu_max_hz, Rng& rng);

struct DDTap {
  int k = 0;
  int l = 0;
  cd h;
};

struct EffectiveChannel {
  GridParams grid;
  std::vector<DDTap> taps;
};

// Y = h *_sigma X over the information torus (quasi-periodic in both axes).
DDArray twisted_convolve(const EffectiveChannel& h, const DDArray& X);

// Dense MN x MN matrix H with vec(Y) = H vec(X), vec index k*N + l.
Eigen::MatrixXcd build_channel_matrix(const EffectiveChannel& h);

// Transmit chain: window the rate-B pulse train by the time window, then
// convolve with the delay factor. Output has Q samples per delay bin.
TDSequence shape_and_modulate(const DDArray& X, const FilterSpec& w, int Q);

// y(t) = sum_i g_i s(t - tau_i) e^{j 2 pi nu_i (t - tau_i)} with delays
// rounded to the sample grid; cyclic wraps the frame, otherwise the frame is
// zero-padded and late energy is dropped.
TDSequence apply_ltv(const TDSequence& s, const ChannelInstance& ch,
                     bool cyclic = true);

// Matched receive: convolve with the conjugate-reversed delay factor, weight
// by the conjugate time window, decimate to rate B, Zak transform, scale by T
// so that a Sinc-filtered loopback is the identity.
DDArray receive_front_end(const TDSequence& y, const FilterSpec& w);

// Complex AWGN with variance 10^{-snr_db/10} per sample; +inf is a no-op.
void add_awgn(std::vector<cd>& v, double snr_db, Rng& rng);

// Sound the chain with a centered pilot impulse and read the effective taps
// in the window |a| <= half_k, |b| <= half_l (window must fit the grid).
// Taps below 1e-7 of the peak are dropped.
EffectiveChannel probe_effective_channel(const ChannelInstance& ch,
                                         const FilterSpec& w,
                                         const GridParams& g, int Q,
                                         int half_k, int half_l);

}  // namespace zakdd
