#include "zakdd/grid.hpp"

namespace zakdd {

GridParams make_grid(int M, int N, double nu_p) {
  require(M >= 1, "make_grid: M must be a positive integer");
  require(N >= 1, "make_grid: N must be a positive integer");
  require(nu_p > 0.0, "make_grid: nu_p must be positive");
  GridParams g;
  g.M = M;
  g.N = N;
  g.nu_p = nu_p;
  g.tau_p = 1.0 / nu_p;
  g.B = M * nu_p;
  g.T = N * g.tau_p;
  g.MN = static_cast<long long>(M) * N;
  return g;
}

cd quasi_extend(const DDArray& X, long long k, long long l) {
  const int M = X.grid.M, N = X.grid.N;
  long long km = fmod_pos(k, M);
  long long lm = fmod_pos(l, N);
  long long n = fdiv_floor(k, M);
  cd phase = cis(kTwoPi * static_cast<double>(fmod_pos(n * lm, N)) / N);
  return X.at(static_cast<int>(km), static_cast<int>(lm)) * phase;
}

std::vector<cd> dd_to_vector(const DDArray& X) { return X.a; }

DDArray vector_to_dd(const std::vector<cd>& v, const GridParams& g) {
  require(static_cast<long long>(v.size()) == g.MN,
          "vector_to_dd: length must equal M*N");
  DDArray X(g);
  X.a = v;
  return X;
}

double frame_energy(const std::vector<cd>& v) {
  double e = 0.0;
  for (const cd& z : v) e += std::norm(z);
  return e;
}

}  // namespace zakdd
