#pragma once
// Frame-level signaling schemes: differential (data-as-pilot) channel
// tracking, trellis-coded modulation, and the unbiased-basis superposition
// scheme with successive interference cancellation, plus its rate model.

#include <Eigen/Dense>
#include <vector>

#include "zakdd/channel.hpp"
#include "zakdd/grid.hpp"
#include "zakdd/transforms.hpp"

namespace zakdd {

// ---------------------------------------------------------------------------
// Trellis-coded modulation, rate 1 bit per real dimension.
//
// Each real stream runs a 4-state code over the sliding bit window
// [b_{t-2}, b_{t-1}, b_t] (newest last) with taps g11 = [0,1,0] and
// g12 = [1,1,1]; the level ((-1)^{g11.b} - 3(-1)^{g12.b})/2 lies in
// {-2,-1,1,2}. Even input bits feed I, odd bits feed Q, two zero bits per
// stream terminate the trellis, and symbols are scaled to unit mean energy.

int tcm_level(int b_prev2, int b_prev1, int b_cur);  // in {-2,-1,1,2}

// bits must have even length; output length bits.size()/2 + 2.
std::vector<cd> tcm_encode(const std::vector<int>& bits);

// Maximum-likelihood sequence decision per stream; returns the data bits
// (termination stripped). sigma2 is accepted for interface symmetry, the
// metric is Euclidean either way.
std::vector<int> tcm_viterbi_decode(const std::vector<cd>& symbols,
                                    double sigma2);

// ---------------------------------------------------------------------------
// Data-as-pilot channel estimation and the differential frame pipeline.

// Tap estimates over the window: cross-ambiguity of the received frame
// against the (detected) transmit frame, normalized by the frame energy.
EffectiveChannel estimate_from_data(const TDSequence& y,
                                    const TDSequence& x_hat, int half_k,
                                    int half_l);

struct DiffFrameStats {
  bool is_pilot = false;
  double ber = 0.0;        // data frames only
  double tap_error = 0.0;  // squared tap error relative to the true channel
};

// Frame t is detected with the estimate from frame t-1, then the detected
// frame re-estimates the channel. A pilot pulsone frame (full frame energy)
// is inserted every pilot_period frames, starting at frame 0.
std::vector<DiffFrameStats> differential_run(
    const GridParams& g, const std::vector<EffectiveChannel>& channels,
    int pilot_period, double snr_db, int half_k, int half_l, Rng& rng);

// Per-frame drifted copies of a base channel: frame t scales each physical
// path's effective contribution by exp(j 2 pi nu_i T t), gains held fixed.
std::vector<EffectiveChannel> drifted_channel_sequence(
    const GridParams& g, const ChannelInstance& base, const FilterSpec& w,
    int Q, int half_k, int half_l, int n_frames);

// ---------------------------------------------------------------------------
// Superposed transmission on a mutually unbiased basis pair.

struct MubBases {
  GridParams grid;
  Eigen::MatrixXcd S1;  // pulsone basis
  Eigen::MatrixXcd S2;  // spread (GDAFT-rotated pulsone) basis
  double max_flatness_deviation = 0.0;
};

// Builds the pair and verifies mutual unbiasedness: every |<S1_i, S2_j>|
// equals 1/sqrt(MN) within 1e-8. Requires odd MN.
MubBases make_mub_bases(const GridParams& g, const SymplecticParams& p);

enum class DetectOrder { FullFirst, SparseFirst };

struct MubConfig {
  double alpha = 0.9;   // power fraction of the full frame, in (0, 1]
  double delta = 0.25;  // occupancy fraction of the sparse frame, in (0, 1]
  int turbo_iters = 2;
  DetectOrder order = DetectOrder::FullFirst;
  bool use_tcm = true;
};

void validate_mub_config(const MubConfig& cfg);

// Number of symbols carried by the sparse frame: floor(delta * MN).
int mub_second_frame_size(const GridParams& g, double delta);

// Scales so total transmit energy is 1 for unit-modulus symbol streams:
// beta1 = sqrt(alpha / MN), beta2 = sqrt((1 - alpha) / n2).
double mub_beta1(const GridParams& g, const MubConfig& cfg);
double mub_beta2(const GridParams& g, const MubConfig& cfg);

// Precoded superposition Q (beta1 S1 x1 + beta2 S2 [x2; 0]). x1 has MN
// symbols; x2 occupies the first floor(delta MN) basis indices.
Eigen::VectorXcd mub_transmit(const Eigen::VectorXcd& x1,
                              const Eigen::VectorXcd& x2,
                              const MubBases& bases, const MubConfig& cfg,
                              const Eigen::MatrixXcd& Qmat);

struct MubDetectResult {
  std::vector<int> bits1, bits2;
  Eigen::VectorXcd x1_hat, x2_hat;  // re-encoded final decisions
};

// Successive interference cancellation with decision-directed re-encoding,
// alternated 1 + turbo_iters times, on the combined observation
// y ~ beta1 S1 x1 + beta2 S2 x2 + noise.
MubDetectResult mub_detect(const Eigen::VectorXcd& y, const MubBases& bases,
                           const MubConfig& cfg, double sigma2);

// ---------------------------------------------------------------------------
// Analytical rate model of the superposition scheme.

struct RatePoint {
  double sinr1 = 0.0, sinr2 = 0.0;
  double p_s1 = 0.0;  // first-frame symbol error proxy Q(sqrt(2 d_free SINR1))
  double r1 = 0.0, r2 = 0.0, r_eff = 0.0;
};

RatePoint effective_rate(double alpha, double delta, double snr_linear,
                         double d_free, int M, int N);

// Occupancy bound delta <= (alpha - gamma sigma2) / (gamma (1 - alpha)),
// clamped to [0, 1]. Requires gamma > 1 and alpha in (0, 1).
double delta_bound(double alpha, double gamma, double sigma2);

}  // namespace zakdd
