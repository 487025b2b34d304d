#pragma once
// Separable delay-Doppler pulse-shaping filters w(tau, nu) = w1(tau) w2(nu).
//
// Each factor is a normalized profile g evaluated on a unitless axis:
//   w1(tau) = sqrt(B) g_tau(B tau),   w2(nu) = sqrt(T) g_nu(T nu),
// and every family ships with the closed-form Fourier transform of g, which
// gives both the transmit time-window (transform of the Doppler factor) and
// spectral quantities for the metrics without numerical transforms of w.

#include <vector>

#include "zakdd/grid.hpp"

namespace zakdd {

enum class FilterFamily { Sinc, Rrc, Gaussian, GaussianSinc, Hermite };

struct FilterSpec {
  FilterFamily family = FilterFamily::Sinc;
  // RRC roll-offs per axis.
  double rrc_beta_tau = 0.6, rrc_beta_nu = 0.6;
  // Gaussian decay (exp(-alpha x^2) on the normalized axis).
  double gauss_alpha_tau = 1.584, gauss_alpha_nu = 1.584;
  // Gaussian-sinc decay and energy correction.
  double gs_alpha_tau = 0.044, gs_alpha_nu = 0.044;
  double gs_omega_tau = 1.0278, gs_omega_nu = 1.0278;
  // Hermite profile: even orders 0, 2, ..., 2(terms-1), all-ones coefficient
  // profile normalized to unit energy; width matched to the Gaussian family.
  int hermite_terms = 3;
  double hermite_alpha = 1.584;
  // Tap truncation half-width for sampled kernels, in bins of the axis.
  double trunc_bins = 4.0;
};

FilterSpec sinc_filter();
FilterSpec rrc_filter(double beta_tau, double beta_nu);
FilterSpec gaussian_filter();
FilterSpec gaussian_sinc_filter();
FilterSpec hermite_filter();

// Root-raised-cosine profile with the removable singularities at x = 0 and
// |x| = 1/(4 beta) filled by their limits.
double rrc_point(double beta, double x);

// Normalized axis profile g(x) and its transform ghat(u) = int g e^{j2pi xu}.
double filter_axis_value(const FilterSpec& spec, bool delay_axis, double x);
double filter_axis_transform(const FilterSpec& spec, bool delay_axis, double u);

// w(tau, nu), its factors, and the matched receive filter
// w_rx(tau, nu) = conj(w(-tau, -nu)) exp(j 2 pi nu tau).
double eval_filter(const FilterSpec& spec, const GridParams& g, double tau,
                   double nu);
double delay_factor(const FilterSpec& spec, const GridParams& g, double tau);
double doppler_factor(const FilterSpec& spec, const GridParams& g, double nu);
cd matched_eval(const FilterSpec& spec, const GridParams& g, double tau,
                double nu);

// Transmit time window: transform of the Doppler factor, periodized to the
// frame (the chain is frame-cyclic). t in seconds.
double time_window(const FilterSpec& spec, const GridParams& g, double t);

struct FilterMetrics {
  double orthogonality_residual = 0.0;
  double max_sidelobe_db = 0.0;
  double band_energy_fraction = 0.0;
  double time_energy_fraction = 0.0;
};

FilterMetrics filter_metrics(const FilterSpec& spec, const GridParams& g);

}  // namespace zakdd
