#include "zakdd/rxchain.hpp"

#include <cmath>
#include <limits>

#include "zakdd/ambiguity.hpp"
#include "zakdd/transforms.hpp"
#include "zakdd/waveforms.hpp"

namespace zakdd {

cd qam4_map(int b0, int b1) {
  const double s = 1.0 / std::sqrt(2.0);
  return cd((1 - 2 * b0) * s, (1 - 2 * b1) * s);
}

std::pair<int, int> qam4_demap(cd v) {
  return {v.real() < 0.0 ? 1 : 0, v.imag() < 0.0 ? 1 : 0};
}

std::vector<cd> qam4_map_bits(const std::vector<int>& bits) {
  require(bits.size() % 2 == 0, "qam4_map_bits: bit count must be even");
  std::vector<cd> out(bits.size() / 2);
  for (size_t i = 0; i < out.size(); ++i)
    out[i] = qam4_map(bits[2 * i], bits[2 * i + 1]);
  return out;
}

std::vector<int> qam4_demap_symbols(const std::vector<cd>& symbols) {
  std::vector<int> bits(2 * symbols.size());
  for (size_t i = 0; i < symbols.size(); ++i) {
    auto [b0, b1] = qam4_demap(symbols[i]);
    bits[2 * i] = b0;
    bits[2 * i + 1] = b1;
  }
  return bits;
}

MmseResult mmse_equalize(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                         double sigma2) {
  require(H.rows() == H.cols(), "mmse_equalize: H must be square");
  require(sigma2 >= 0.0, "mmse_equalize: sigma2 must be nonnegative");
  const Eigen::Index n = H.rows();
  Eigen::MatrixXcd G = H.adjoint() * H;
  G.diagonal().array() += sigma2;
  Eigen::LLT<Eigen::MatrixXcd> llt(G);
  if (llt.info() != Eigen::Success)
    fail("mmse_equalize: normal matrix is not positive definite");
  MmseResult out;
  out.x = llt.solve(H.adjoint() * y);
  double dmax = 0.0, dmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    double d = llt.matrixLLT()(i, i).real();
    dmax = std::max(dmax, d);
    dmin = std::min(dmin, d);
  }
  out.ill_conditioned = !(dmin > 0.0) || (dmax / dmin) * (dmax / dmin) > 1e12;
  return out;
}

Eigen::VectorXcd one_tap_equalize(const Eigen::VectorXcd& h_diag,
                                  const Eigen::VectorXcd& y, double sigma2) {
  require(h_diag.size() == y.size(), "one_tap_equalize: size mismatch");
  Eigen::VectorXcd x(y.size());
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    double denom = std::norm(h_diag[i]) + sigma2;
    x[i] = denom > 0.0 ? std::conj(h_diag[i]) * y[i] / denom : cd(0.0, 0.0);
  }
  return x;
}

QrFactors qr_precode(const Eigen::MatrixXcd& H) {
  require(H.rows() == H.cols(), "qr_precode: H must be square");
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(H.adjoint());
  QrFactors f;
  f.Q = qr.householderQ();
  f.R = qr.matrixQR().triangularView<Eigen::Upper>();
  return f;
}

Eigen::VectorXcd apply_precoder(const Eigen::MatrixXcd& Q,
                                const Eigen::VectorXcd& x) {
  return Q * x;
}

Eigen::VectorXcd rx_combine(const Eigen::MatrixXcd& R,
                            const Eigen::VectorXcd& y, double sigma2) {
  Eigen::MatrixXcd G = R * R.adjoint();
  G.diagonal().array() += sigma2;
  Eigen::LLT<Eigen::MatrixXcd> llt(G);
  if (llt.info() != Eigen::Success)
    fail("rx_combine: combiner matrix is not positive definite");
  return llt.solve(R * y);
}

Eigen::MatrixXcd to_fd_matrix(const Eigen::MatrixXcd& H_dd,
                              const GridParams& g) {
  const long long n = g.MN;
  require(H_dd.rows() == n && H_dd.cols() == n, "to_fd_matrix: size mismatch");
  std::vector<cd> root(n);
  for (long long t = 0; t < n; ++t) root[t] = cis(kTwoPi * double(t) / n);
  const double scale = 1.0 / std::sqrt(double(g.M));

  // A = H R^H:  A[r, i] = scale * sum_k H[r, k N + (i mod N)] e^{+j2pi ik/MN}
  Eigen::MatrixXcd A(n, n);
  for (long long i = 0; i < n; ++i) {
    const int l = int(i % g.N);
    for (long long r = 0; r < n; ++r) {
      cd acc(0.0, 0.0);
      for (int k = 0; k < g.M; ++k)
        acc += H_dd(r, k * g.N + l) * root[(i * k) % n];
      A(r, i) = scale * acc;
    }
  }
  // H_FD = R A:  [i', i] = scale * sum_k e^{-j2pi i'k/MN} A[k N + (i' mod N), i]
  Eigen::MatrixXcd F(n, n);
  for (long long ip = 0; ip < n; ++ip) {
    const int l = int(ip % g.N);
    for (long long i = 0; i < n; ++i) {
      cd acc(0.0, 0.0);
      for (int k = 0; k < g.M; ++k)
        acc += std::conj(root[(ip * k) % n]) * A(k * g.N + l, i);
      F(ip, i) = scale * acc;
    }
  }
  return F;
}

Eigen::VectorXcd to_fd_vector(const Eigen::VectorXcd& y_dd,
                              const GridParams& g) {
  DDArray X(g);
  for (long long i = 0; i < g.MN; ++i) X.a[i] = y_dd[i];
  TDSequence s = idfzt(X);
  return Eigen::Map<const Eigen::VectorXcd>(s.s.data(), g.MN);
}

Eigen::VectorXcd from_fd_vector(const Eigen::VectorXcd& r_fd,
                                const GridParams& g) {
  TDSequence s(g);
  for (long long i = 0; i < g.MN; ++i) s.s[i] = r_fd[i];
  DDArray X = idfzt_adjoint(s);
  return Eigen::Map<const Eigen::VectorXcd>(X.a.data(), g.MN);
}

BandedFDMatrix make_banded(const Eigen::MatrixXcd& H_FD, const GridParams& g,
                           int b) {
  const long long n = g.MN;
  require(H_FD.rows() == n && H_FD.cols() == n, "make_banded: size mismatch");
  require(b >= 0 && 2 * b + 1 <= n, "make_banded: invalid half-bandwidth");
  BandedFDMatrix B;
  B.grid = g;
  B.b = b;
  B.diagonals.assign(2 * b + 1, Eigen::VectorXcd(n));
  double band_energy = 0.0;
  for (int o = -b; o <= b; ++o) {
    Eigen::VectorXcd& diag = B.diagonals[o + b];
    for (long long i = 0; i < n; ++i) {
      cd v = H_FD(i, fmod_pos(i + o, n));
      diag[i] = v;
      band_energy += std::norm(v);
    }
  }
  double total = H_FD.squaredNorm();
  B.discarded_energy = total > 0.0 ? 1.0 - band_energy / total : 0.0;
  return B;
}

Eigen::VectorXcd banded_matvec(const BandedFDMatrix& B,
                               const Eigen::VectorXcd& x) {
  const long long n = B.grid.MN;
  require(x.size() == n, "banded_matvec: size mismatch");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  for (int o = -B.b; o <= B.b; ++o) {
    const Eigen::VectorXcd& diag = B.diagonals[o + B.b];
    for (long long i = 0; i < n; ++i)
      y[i] += diag[i] * x[fmod_pos(i + o, n)];
  }
  return y;
}

Eigen::VectorXcd banded_matvec_adjoint(const BandedFDMatrix& B,
                                       const Eigen::VectorXcd& x) {
  const long long n = B.grid.MN;
  require(x.size() == n, "banded_matvec_adjoint: size mismatch");
  Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n);
  for (int o = -B.b; o <= B.b; ++o) {
    const Eigen::VectorXcd& diag = B.diagonals[o + B.b];
    for (long long i = 0; i < n; ++i)
      y[fmod_pos(i + o, n)] += std::conj(diag[i]) * x[i];
  }
  return y;
}

int default_half_bandwidth(const GridParams& g, double nu_max_hz) {
  return int(std::ceil(nu_max_hz * g.T)) + 1;
}

namespace {

// Algorithm: conjugate gradients on (H^H H + R_n) s = H^H r, run exactly as
// listed with squared-residual bookkeeping.
template <typename RnApply>
CgmResult cgm_run(const BandedFDMatrix& H, const Eigen::VectorXcd& r,
                  RnApply rn_apply, const CgmConfig& cfg) {
  require(cfg.max_iters >= 1, "cgm_solve: max_iters must be >= 1");
  require(cfg.tolerance > 0.0, "cgm_solve: tolerance must be positive");
  const long long n = H.grid.MN;
  require(r.size() == n, "cgm_solve: size mismatch");

  Eigen::VectorXcd b = banded_matvec_adjoint(H, r);
  Eigen::VectorXcd s = Eigen::VectorXcd::Zero(n);
  Eigen::VectorXcd c = b;  // b - (H^H H) s0 - R_n s0 with s0 = 0
  Eigen::VectorXcd p = c;
  double c_norm = c.squaredNorm();

  CgmResult out;
  out.residual_history.push_back(c_norm);
  const double eps2 = cfg.tolerance * cfg.tolerance;
  if (c_norm < eps2) {
    out.s = s;
    out.converged = true;
    return out;
  }
  for (int i = 1; i <= cfg.max_iters; ++i) {
    Eigen::VectorXcd a_p =
        banded_matvec_adjoint(H, banded_matvec(H, p)) + rn_apply(p);
    cd alpha = c_norm / p.dot(a_p);
    s += alpha * p;
    c -= alpha * a_p;
    double c_norm_new = c.squaredNorm();
    out.residual_history.push_back(c_norm_new);
    out.iterations = i;
    if (c_norm_new < eps2) {
      out.converged = true;
      break;
    }
    p = c + (c_norm_new / c_norm) * p;
    c_norm = c_norm_new;
  }
  out.s = s;
  return out;
}

}  // namespace

CgmResult cgm_solve(const BandedFDMatrix& H, const Eigen::VectorXcd& r,
                    double sigma2, const CgmConfig& cfg) {
  require(sigma2 >= 0.0, "cgm_solve: sigma2 must be nonnegative");
  return cgm_run(
      H, r, [sigma2](const Eigen::VectorXcd& p) { return (sigma2 * p).eval(); },
      cfg);
}

CgmResult cgm_solve(const BandedFDMatrix& H, const Eigen::VectorXcd& r,
                    const Eigen::MatrixXcd& Rn, const CgmConfig& cfg) {
  require(Rn.rows() == H.grid.MN && Rn.cols() == H.grid.MN,
          "cgm_solve: covariance size mismatch");
  return cgm_run(
      H, r, [&Rn](const Eigen::VectorXcd& p) { return (Rn * p).eval(); }, cfg);
}

EffectiveChannel estimate_channel_pilot(const DDArray& y_dd, int k_p, int l_p,
                                        int half_k, int half_l) {
  const GridParams& g = y_dd.grid;
  require(2 * half_k + 1 <= g.M && 2 * half_l + 1 <= g.N,
          "estimate_channel_pilot: window larger than fundamental period");
  TDSequence y = idzt(y_dd);
  PointList region = box_region(g, -half_k, half_k, -half_l, half_l);
  AmbiguitySurface A = fast_cross_ambiguity_pulsone(y, k_p, l_p, region);
  // Within a window smaller than one period the pulsone images of distinct
  // taps are orthogonal, so the ambiguity reads each tap exactly.
  EffectiveChannel h;
  h.grid = g;
  for (int a = -half_k; a <= half_k; ++a)
    for (int b = -half_l; b <= half_l; ++b)
      h.taps.push_back(
          {a, b, A.value_at(fmod_pos(a, g.MN), fmod_pos(b, g.MN))});
  return h;
}

int count_bit_errors(const std::vector<int>& a, const std::vector<int>& b) {
  require(a.size() == b.size(), "count_bit_errors: length mismatch");
  int errs = 0;
  for (size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) ++errs;
  return errs;
}

}  // namespace zakdd
