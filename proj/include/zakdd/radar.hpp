#pragma once
// Discrete delay-Doppler radar: scene simulation, imaging by cross-ambiguity
// (with fast paths for pulsone and rotated-pulsone transmit waveforms),
// subgroup selection against a scattering region, symplectic waveform
// libraries with PAPR accounting, ROC evaluation, and dual-polarization
// scattering estimation.

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "zakdd/ambiguity.hpp"
#include "zakdd/channel.hpp"
#include "zakdd/grid.hpp"
#include "zakdd/transforms.hpp"
#include "zakdd/waveforms.hpp"

namespace zakdd {

struct ClutterSpec {
  double gamma_db = -1.99;  // total clutter power relative to a unit target
  int n_scatterers = 64;
  RegionBox region;
};

struct SceneSpec {
  std::vector<PathSpec> targets;  // gain = reflectivity
  bool has_clutter = false;
  ClutterSpec clutter;
};

// Materializes the scene: targets plus clutter scatterers drawn iid uniform
// on the region's integer cells with Rayleigh amplitudes of the configured
// total power.
std::vector<PathSpec> realize_scene(const SceneSpec& scene,
                                    const GridParams& g, Rng& rng);

// Scene action on a rate-B waveform (zero-padded by default; radar scenes
// are not frame-periodic) plus receiver noise.
TDSequence radar_receive(const TDSequence& tx,
                         const std::vector<PathSpec>& paths, double snr_db,
                         Rng& rng, bool cyclic = false);

// Transmit waveform with enough provenance to pick the fast imaging path.
struct RadarWaveform {
  TDSequence x;
  bool is_pulsone = false;
  int k0 = 0, l0 = 0;
  bool rotated = false;  // x = gdaft(pulsone) when is_pulsone && rotated
  SymplecticParams rotation;
};

RadarWaveform make_pulsone_waveform(const GridParams& g, int k0, int l0);
RadarWaveform make_rotated_waveform(const GridParams& g, int k0, int l0,
                                    const SymplecticParams& p);
RadarWaveform make_custom_waveform(const TDSequence& x);

// image[k,l] = <rx, D_(k,l) tx>. Pulsone transmit uses the cached-transform
// fast path; a rotated pulsone is imaged by un-rotating the receive signal
// and transporting cells through the symplectic map with the exact
// intertwining phase; anything else falls back to the direct sum.
AmbiguitySurface radar_image(const TDSequence& rx, const RadarWaveform& tx,
                             const PointList& region);

struct SelectedWaveform {
  SubgroupSpec subgroup;
  TDSequence waveform;
};

// First subgroup whose translates keep the scattering box C alias-free:
// the rectangular lattice, then Line slopes in increasing order (odd MN).
// Throws if none complies.
SelectedWaveform select_waveform(const RegionBox& C, const GridParams& g);

std::vector<TDSequence> waveform_library(
    const TDSequence& tmpl, const std::vector<SymplecticParams>& params);

// 10 log10(max |x|^2 / mean |x|^2); throws on zero input.
double papr_db(const TDSequence& x);

// Empirical complementary CDF of PAPR over draws from a waveform generator.
std::vector<std::pair<double, double>> papr_ccdf(
    const std::function<TDSequence(Rng&)>& generator, int n_draws, Rng& rng);

// Phase-coded comparison baseline: N Zadoff-Chu chips of M rectangular
// samples each, unit energy. Requires gcd(root, N) = 1.
TDSequence phase_coded_baseline(int root, const GridParams& g);

// ---------------------------------------------------------------------------
// Dual polarization.

struct PolTarget {
  int k = 0, l = 0;
  cd amplitude{1.0, 0.0};
  Eigen::Matrix2cd sigma;  // per-target scattering matrix
};

struct PolChannel {
  GridParams grid;
  Eigen::Matrix2cd c_tx, c_rx;  // antenna coupling
  // Effective channels indexed [rx][tx], 0 = H, 1 = V.
  EffectiveChannel h[2][2];
};

// h^(j,i) accumulates amplitude * (C_RX Sigma_p C_TX)(j,i) at each target.
PolChannel make_pol_channel(const GridParams& g,
                            const std::vector<PolTarget>& targets,
                            const Eigen::Matrix2cd& c_tx,
                            const Eigen::Matrix2cd& c_rx);

// Cyclic twisted action of an effective channel on a rate-B sequence.
TDSequence apply_effective_td(const EffectiveChannel& h, const TDSequence& x);

struct DualPolRx {
  TDSequence y_h, y_v;
};

DualPolRx dual_pol_simulate(const TDSequence& x_h, const TDSequence& x_v,
                            const PolChannel& pol, double snr_db, Rng& rng);

struct PolEstimate {
  // Estimates indexed [rx][tx]: cross-ambiguity of y_rx against tx waveform.
  EffectiveChannel h[2][2];
};

PolEstimate instant_polarimetry(const TDSequence& y_h, const TDSequence& y_v,
                                const RadarWaveform& tx_h,
                                const RadarWaveform& tx_v, int half_k,
                                int half_l);

// ---------------------------------------------------------------------------
// Detection.

struct RocPoint {
  double threshold = 0.0;
  double pfa = 0.0;
  double pd = 0.0;
};

// Oracle-cell detector: threshold |image| at the hypothesized target cell.
// scene_gen(present, rng) yields matched target-present / target-absent
// scenes; each trial draws one of each.
std::vector<RocPoint> detection_roc(
    const std::function<SceneSpec(bool, Rng&)>& scene_gen,
    const RadarWaveform& wf, const std::vector<double>& thresholds,
    int n_trials, double snr_db, Point target_cell, Rng& rng);

}  // namespace zakdd
