#include "zakdd/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "zakdd/common.hpp"

namespace zakdd {
namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-12) return 1.0;
  return std::sin(kPi * x) / (kPi * x);
}

// Physicists' Hermite polynomial H_n.
double hermite_poly(int n, double z) {
  double hm = 1.0, h = 2.0 * z;
  if (n == 0) return hm;
  for (int k = 1; k < n; ++k) {
    double next = 2.0 * z * h - 2.0 * k * hm;
    hm = h;
    h = next;
  }
  return h;
}

// Unit-energy Hermite function of scale s: phi_n(s, x) = sqrt(s) psi_n(s x).
double hermite_phi(int n, double s, double x) {
  double z = s * x;
  double logfac = 0.0;
  for (int k = 2; k <= n; ++k) logfac += std::log(double(k));
  double norm = std::sqrt(s) * std::pow(kPi, -0.25) *
                std::exp(-0.5 * (n * std::log(2.0) + logfac));
  return norm * hermite_poly(n, z) * std::exp(-0.5 * z * z);
}

struct AxisParams {
  double rrc_beta, gauss_alpha, gs_alpha, gs_omega, hermite_alpha;
  int hermite_terms;
};

AxisParams axis_params(const FilterSpec& spec, bool delay_axis) {
  if (delay_axis)
    return {spec.rrc_beta_tau, spec.gauss_alpha_tau, spec.gs_alpha_tau,
            spec.gs_omega_tau, spec.hermite_alpha, spec.hermite_terms};
  return {spec.rrc_beta_nu, spec.gauss_alpha_nu, spec.gs_alpha_nu,
          spec.gs_omega_nu, spec.hermite_alpha, spec.hermite_terms};
}

// Square-root raised cosine spectrum (transform of rrc_point).
double srrc_spectrum(double beta, double u) {
  double au = std::abs(u);
  if (beta < 1e-12) return au < 0.5 ? 1.0 : (au == 0.5 ? 0.5 : 0.0);
  double lo = 0.5 * (1.0 - beta), hi = 0.5 * (1.0 + beta);
  if (au <= lo) return 1.0;
  if (au >= hi) return 0.0;
  return std::cos(kPi / (2.0 * beta) * (au - lo));
}

// Raised-cosine Nyquist response: exact value of int |srrc|^2 e^{j2pi u a} du.
double rc_response(double beta, double a) {
  if (std::abs(a) < 1e-12) return 1.0;
  double denom = 1.0 - 4.0 * beta * beta * a * a;
  if (std::abs(denom) < 1e-9) {
    // a = 1/(2 beta): removable singularity.
    return 0.25 * kPi * sinc(1.0 / (2.0 * beta));
  }
  return sinc(a) * std::cos(kPi * beta * a) / denom;
}

double gaussian_axis(double alpha, double x) {
  return std::pow(2.0 * alpha / kPi, 0.25) * std::exp(-alpha * x * x);
}

double gaussian_axis_transform(double alpha, double u) {
  return std::pow(2.0 * alpha / kPi, 0.25) * std::sqrt(kPi / alpha) *
         std::exp(-kPi * kPi * u * u / alpha);
}

// Half-support of the transform beyond which it is numerically zero.
double transform_support(const FilterSpec& spec, bool delay_axis) {
  AxisParams p = axis_params(spec, delay_axis);
  switch (spec.family) {
    case FilterFamily::Sinc:
      return 0.5;
    case FilterFamily::Rrc:
      return 0.5 * (1.0 + p.rrc_beta);
    case FilterFamily::Gaussian:
      return std::sqrt(32.0 * p.gauss_alpha) / kPi;
    case FilterFamily::GaussianSinc:
      return 0.5 + std::sqrt(32.0 * p.gs_alpha) / kPi;
    case FilterFamily::Hermite:
      // Widest Hermite term spreads the Gaussian tail by roughly sqrt(2n+1).
      return 3.0 * std::sqrt(32.0 * p.hermite_alpha) / kPi;
  }
  return 4.0;
}

std::vector<double> transform_breakpoints(const FilterSpec& spec,
                                          bool delay_axis) {
  AxisParams p = axis_params(spec, delay_axis);
  switch (spec.family) {
    case FilterFamily::Sinc:
      return {-0.5, 0.5};
    case FilterFamily::Rrc:
      return {-0.5 * (1.0 + p.rrc_beta), -0.5 * (1.0 - p.rrc_beta),
              0.5 * (1.0 - p.rrc_beta), 0.5 * (1.0 + p.rrc_beta)};
    default:
      return {};
  }
}

// Simpson quadrature of |ghat|^2 over [lo, hi], split at spectrum kinks.
double integrate_sq_transform(const FilterSpec& spec, bool delay_axis,
                              double lo, double hi) {
  std::vector<double> cuts = {lo, hi};
  for (double b : transform_breakpoints(spec, delay_axis))
    if (b > lo && b < hi) cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  double total = 0.0;
  for (size_t seg = 0; seg + 1 < cuts.size(); ++seg) {
    double a = cuts[seg], b = cuts[seg + 1];
    if (b - a < 1e-15) continue;
    const int K = 1024;  // intervals, even
    double h = (b - a) / K;
    double acc = 0.0;
    for (int i = 0; i <= K; ++i) {
      double v = filter_axis_transform(spec, delay_axis, a + i * h);
      double w = (i == 0 || i == K) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      acc += w * v * v;
    }
    total += acc * h / 3.0;
  }
  return total;
}

// Autocorrelation of the normalized axis profile at integer lag a.
double axis_autocorrelation(const FilterSpec& spec, bool delay_axis, int a) {
  AxisParams p = axis_params(spec, delay_axis);
  switch (spec.family) {
    case FilterFamily::Sinc:
      return a == 0 ? 1.0 : 0.0;
    case FilterFamily::Rrc:
      return rc_response(p.rrc_beta, a);
    case FilterFamily::Gaussian:
      return std::exp(-0.5 * p.gauss_alpha * a * a);
    default:
      break;
  }
  // Time-domain Simpson; the remaining profiles decay as a Gaussian.
  double alpha = spec.family == FilterFamily::GaussianSinc
                     ? p.gs_alpha
                     : 0.5 * p.hermite_alpha;
  double x_max = std::sqrt(34.0 / std::max(alpha, 1e-6)) + 1.0;
  double lo = -x_max, hi = x_max + a;
  const int K = 2 * int(64.0 * (hi - lo) / 2.0 + 1.0);
  double h = (hi - lo) / K;
  double acc = 0.0;
  for (int i = 0; i <= K; ++i) {
    double x = lo + i * h;
    double v = filter_axis_value(spec, delay_axis, x) *
               filter_axis_value(spec, delay_axis, x - a);
    double w = (i == 0 || i == K) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * v;
  }
  return acc * h / 3.0;
}

}  // namespace

FilterSpec sinc_filter() { return FilterSpec{}; }

FilterSpec rrc_filter(double beta_tau, double beta_nu) {
  FilterSpec s;
  s.family = FilterFamily::Rrc;
  s.rrc_beta_tau = beta_tau;
  s.rrc_beta_nu = beta_nu;
  return s;
}

FilterSpec gaussian_filter() {
  FilterSpec s;
  s.family = FilterFamily::Gaussian;
  return s;
}

FilterSpec gaussian_sinc_filter() {
  FilterSpec s;
  s.family = FilterFamily::GaussianSinc;
  return s;
}

FilterSpec hermite_filter() {
  FilterSpec s;
  s.family = FilterFamily::Hermite;
  return s;
}

double rrc_point(double beta, double x) {
  if (beta < 1e-12) return sinc(x);
  double ax = std::abs(x);
  if (ax < 1e-12) return 1.0 - beta + 4.0 * beta / kPi;
  double q = 4.0 * beta * ax;
  if (std::abs(q - 1.0) < 1e-9) {
    double c = kPi / (4.0 * beta);
    return (beta / std::sqrt(2.0)) * ((1.0 + 2.0 / kPi) * std::sin(c) +
                                      (1.0 - 2.0 / kPi) * std::cos(c));
  }
  double num = std::sin(kPi * ax * (1.0 - beta)) +
               q * std::cos(kPi * ax * (1.0 + beta));
  return num / (kPi * ax * (1.0 - q * q));
}

double filter_axis_value(const FilterSpec& spec, bool delay_axis, double x) {
  AxisParams p = axis_params(spec, delay_axis);
  switch (spec.family) {
    case FilterFamily::Sinc:
      return sinc(x);
    case FilterFamily::Rrc:
      return rrc_point(p.rrc_beta, x);
    case FilterFamily::Gaussian:
      return gaussian_axis(p.gauss_alpha, x);
    case FilterFamily::GaussianSinc:
      return p.gs_omega * sinc(x) * std::exp(-p.gs_alpha * x * x);
    case FilterFamily::Hermite: {
      double s = std::sqrt(2.0 * p.hermite_alpha);
      double c = 1.0 / std::sqrt(double(p.hermite_terms));
      double acc = 0.0;
      for (int i = 0; i < p.hermite_terms; ++i)
        acc += c * hermite_phi(2 * i, s, x);
      return acc;
    }
  }
  return 0.0;
}

double filter_axis_transform(const FilterSpec& spec, bool delay_axis,
                             double u) {
  AxisParams p = axis_params(spec, delay_axis);
  switch (spec.family) {
    case FilterFamily::Sinc:
      return srrc_spectrum(0.0, u);
    case FilterFamily::Rrc:
      return srrc_spectrum(p.rrc_beta, u);
    case FilterFamily::Gaussian:
      return gaussian_axis_transform(p.gauss_alpha, u);
    case FilterFamily::GaussianSinc: {
      double r = kPi / std::sqrt(p.gs_alpha);
      return 0.5 * p.gs_omega *
             (std::erf(r * (u + 0.5)) - std::erf(r * (u - 0.5)));
    }
    case FilterFamily::Hermite: {
      // FT of phi_n(s, .) is j^n phi_n(2 pi / s, .); even orders stay real.
      double s = std::sqrt(2.0 * p.hermite_alpha);
      double c = 1.0 / std::sqrt(double(p.hermite_terms));
      double acc = 0.0;
      for (int i = 0; i < p.hermite_terms; ++i) {
        double sign = (i % 2 == 0) ? 1.0 : -1.0;
        acc += sign * c * hermite_phi(2 * i, kTwoPi / s, u);
      }
      return acc;
    }
  }
  return 0.0;
}

double delay_factor(const FilterSpec& spec, const GridParams& g, double tau) {
  return std::sqrt(g.B) * filter_axis_value(spec, true, g.B * tau);
}

double doppler_factor(const FilterSpec& spec, const GridParams& g, double nu) {
  return std::sqrt(g.T) * filter_axis_value(spec, false, g.T * nu);
}

double eval_filter(const FilterSpec& spec, const GridParams& g, double tau,
                   double nu) {
  return delay_factor(spec, g, tau) * doppler_factor(spec, g, nu);
}

cd matched_eval(const FilterSpec& spec, const GridParams& g, double tau,
                double nu) {
  return eval_filter(spec, g, -tau, -nu) * cis(kTwoPi * nu * tau);
}

double time_window(const FilterSpec& spec, const GridParams& g, double t) {
  double acc = 0.0;
  for (int m = -4; m <= 4; ++m)
    acc += filter_axis_transform(spec, false, t / g.T - m);
  return acc / std::sqrt(g.T);
}

FilterMetrics filter_metrics(const FilterSpec& spec, const GridParams& g) {
  FilterMetrics out;

  double worst = 0.0;
  for (int axis = 0; axis < 2; ++axis) {
    bool delay_axis = axis == 0;
    double r0 = axis_autocorrelation(spec, delay_axis, 0);
    int a_max = 2 * (delay_axis ? g.M : g.N);
    for (int a = 1; a <= a_max; ++a) {
      double r = std::abs(axis_autocorrelation(spec, delay_axis, a)) / r0;
      worst = std::max(worst, r);
    }
  }
  out.orthogonality_residual = worst;

  // First-sidelobe level of the delay cross-section |g(x)|.
  {
    const int steps_per_unit = 256;
    double peak = std::abs(filter_axis_value(spec, true, 0.0));
    double prev = peak;
    bool past_mainlobe = false;
    double side = 0.0;
    for (int i = 1; i <= 8 * steps_per_unit; ++i) {
      double v =
          std::abs(filter_axis_value(spec, true, double(i) / steps_per_unit));
      if (!past_mainlobe && v > prev + 1e-15) past_mainlobe = true;
      if (past_mainlobe) side = std::max(side, v);
      prev = v;
    }
    out.max_sidelobe_db = past_mainlobe
                              ? 20.0 * std::log10(side / peak)
                              : -std::numeric_limits<double>::infinity();
  }

  for (int axis = 0; axis < 2; ++axis) {
    bool delay_axis = axis == 0;
    double span = std::max(transform_support(spec, delay_axis), 0.5);
    double total = integrate_sq_transform(spec, delay_axis, -span, span);
    double inband = integrate_sq_transform(spec, delay_axis, -0.5, 0.5);
    double frac = std::min(inband / total, 1.0);
    (delay_axis ? out.band_energy_fraction : out.time_energy_fraction) = frac;
  }
  return out;
}

}  // namespace zakdd
