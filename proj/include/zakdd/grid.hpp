#pragma once
// Delay-Doppler grid geometry and the two signal containers.
//
// A frame lives on an M x N delay-Doppler grid with Doppler period nu_p and
// delay period tau_p = 1/nu_p. Bandwidth B = M*nu_p, duration T = N*tau_p,
// so the time-bandwidth product is exactly M*N samples at rate B.

#include <vector>

#include "zakdd/common.hpp"

namespace zakdd {

struct GridParams {
  int M = 0;           // delay bins per period
  int N = 0;           // Doppler bins per period
  double nu_p = 0.0;   // Doppler period [Hz]
  double tau_p = 0.0;  // delay period [s], always 1/nu_p
  double B = 0.0;      // bandwidth [Hz]
  double T = 0.0;      // frame duration [s]
  long long MN = 0;

  bool operator==(const GridParams& o) const {
    return M == o.M && N == o.N && nu_p == o.nu_p;
  }
};

GridParams make_grid(int M, int N, double nu_p);

// M x N complex delay-Doppler frame, row-major in (k, l): index k*N + l.
struct DDArray {
  GridParams grid;
  std::vector<cd> a;

  DDArray() = default;
  explicit DDArray(const GridParams& g) : grid(g), a(g.MN, cd{0.0, 0.0}) {}

  cd& at(int k, int l) { return a[static_cast<size_t>(k) * grid.N + l]; }
  const cd& at(int k, int l) const {
    return a[static_cast<size_t>(k) * grid.N + l];
  }
};

// Length-MN time sequence at rate B (one frame period).
struct TDSequence {
  GridParams grid;
  std::vector<cd> s;

  TDSequence() = default;
  explicit TDSequence(const GridParams& g) : grid(g), s(g.MN, cd{0.0, 0.0}) {}
};

// Quasi-periodic extension of a core frame to any integer (k, l):
//   X[k + nM, l + mN] = X[k, l] * exp(j 2 pi n l / N).
cd quasi_extend(const DDArray& X, long long k, long long l);

// Column-stacking used by the channel-matrix convention: v[k*N + l] = X[k, l].
std::vector<cd> dd_to_vector(const DDArray& X);
DDArray vector_to_dd(const std::vector<cd>& v, const GridParams& g);

double frame_energy(const std::vector<cd>& v);

}  // namespace zakdd
