#pragma once
// Receiver primitives: symbol mapping, equalizers, QR precoding, the
// frequency-domain view of the DD system, and the banded conjugate-gradient
// solver that exploits its modulo-banded structure.

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "zakdd/channel.hpp"
#include "zakdd/grid.hpp"

namespace zakdd {

// 4-QAM, Gray mapped, unit energy; bit pair 00 -> (+1+j)/sqrt(2), the first
// bit selects the real sign, the second the imaginary sign.
cd qam4_map(int b0, int b1);
std::pair<int, int> qam4_demap(cd v);
std::vector<cd> qam4_map_bits(const std::vector<int>& bits);
std::vector<int> qam4_demap_symbols(const std::vector<cd>& symbols);

struct MmseResult {
  Eigen::VectorXcd x;
  bool ill_conditioned = false;  // normal-equation condition estimate > 1e12
};

// x = (H^H H + sigma2 I)^{-1} H^H y by Cholesky of the normal equations.
// Throws at sigma2 = 0 when the normal matrix is not positive definite.
MmseResult mmse_equalize(const Eigen::MatrixXcd& H, const Eigen::VectorXcd& y,
                         double sigma2);

// Per-entry MMSE against a diagonal channel: conj(h) y / (|h|^2 + sigma2).
Eigen::VectorXcd one_tap_equalize(const Eigen::VectorXcd& h_diag,
                                  const Eigen::VectorXcd& y, double sigma2);

// H^H = Q R with R upper triangular. Transmit precoding x' = Q x turns the
// channel into R^H; rx_combine applies W = (R R^H + sigma2 I)^{-1} R, so
// W H Q -> I as sigma2 -> 0.
struct QrFactors {
  Eigen::MatrixXcd Q, R;
};
QrFactors qr_precode(const Eigen::MatrixXcd& H);
Eigen::VectorXcd apply_precoder(const Eigen::MatrixXcd& Q,
                                const Eigen::VectorXcd& x);
Eigen::VectorXcd rx_combine(const Eigen::MatrixXcd& R,
                            const Eigen::VectorXcd& y, double sigma2);

// Change of basis to the frequency domain: H_FD = R H R^H with R the IDFZT
// matrix. R has M nonzeros per row, so both products cost O((MN)^2 M).
Eigen::MatrixXcd to_fd_matrix(const Eigen::MatrixXcd& H_dd,
                              const GridParams& g);
Eigen::VectorXcd to_fd_vector(const Eigen::VectorXcd& y_dd,
                              const GridParams& g);
Eigen::VectorXcd from_fd_vector(const Eigen::VectorXcd& r_fd,
                                const GridParams& g);

// Modulo-banded storage: diagonals[o + b][i] = H_FD[i, (i + o) mod MN] for
// offsets o in [-b, b]; everything outside the band is dropped and the
// discarded Frobenius energy fraction is recorded.
struct BandedFDMatrix {
  GridParams grid;
  int b = 0;
  std::vector<Eigen::VectorXcd> diagonals;
  double discarded_energy = 0.0;
};

BandedFDMatrix make_banded(const Eigen::MatrixXcd& H_FD, const GridParams& g,
                           int b);
Eigen::VectorXcd banded_matvec(const BandedFDMatrix& B,
                               const Eigen::VectorXcd& x);
Eigen::VectorXcd banded_matvec_adjoint(const BandedFDMatrix& B,
                                       const Eigen::VectorXcd& x);

struct CgmConfig {
  int max_iters = 250;
  double tolerance = 1e-6;
  int half_bandwidth = 1;  // band used when compressing H_FD
};

// Half-bandwidth heuristic matched to the Doppler spread: ceil(nu_max T) + 1.
int default_half_bandwidth(const GridParams& g, double nu_max_hz);

struct CgmResult {
  Eigen::VectorXcd s;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residual_history;  // squared residual norms c_norm
};

// Conjugate gradients on the normal equations (H^H H + R_n) s = H^H r with
// R_n = sigma2 I (white) or an explicit covariance. Stops when the squared
// residual falls below tolerance^2.
CgmResult cgm_solve(const BandedFDMatrix& H, const Eigen::VectorXcd& r,
                    double sigma2, const CgmConfig& cfg);
CgmResult cgm_solve(const BandedFDMatrix& H, const Eigen::VectorXcd& r,
                    const Eigen::MatrixXcd& Rn, const CgmConfig& cfg);

// Read effective-channel taps around a DD pilot impulse at (k_p, l_p) from a
// received frame, via cross-ambiguity against the pilot pulsone. Window
// half-widths must fit inside one fundamental period.
EffectiveChannel estimate_channel_pilot(const DDArray& y_dd, int k_p, int l_p,
                                        int half_k, int half_l);

int count_bit_errors(const std::vector<int>& a, const std::vector<int>& b);

}  // namespace zakdd
