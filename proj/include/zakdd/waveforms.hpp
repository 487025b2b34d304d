#pragma once
// Waveform families on the MN-sample frame, discrete Heisenberg shifts, and
// commutative shift subgroups with their eigenvector (carrier) families.

#include <map>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "zakdd/grid.hpp"
#include "zakdd/transforms.hpp"

namespace zakdd {

// Time-domain pulsone: the inverse Zak image of a DD impulse at (k0, l0).
//   v[k0 + dM] = (1/sqrt(N)) exp(j 2 pi d l0 / N), d in [0, N).
TDSequence pulsone(const GridParams& g, int k0, int l0);

// Quadratic chirp v[n] = (1/sqrt(MN)) exp(j 2 pi (alpha n^2 + beta n + gamma)/MN).
TDSequence chirp_sequence(const GridParams& g, long long alpha, long long beta,
                          long long gamma);

// Discrete Heisenberg shift: y[n] = x[(n-k) mod MN] exp(j 2 pi l (n-k) / MN).
TDSequence heisenberg_shift(const TDSequence& x, long long k, long long l);

// The same operator conjugated into the DD domain:
//   Y[k',l'] = quasi_extend(X, k'-k, l'-l) exp(j 2 pi l (k'-k) / MN).
DDArray dd_shift(const DDArray& X, long long k, long long l);

enum class BasisFamily { ZakPulsone, Ofdm, Afdm, Otsm, SpreadCazac };

struct BasisSpec {
  GridParams grid;
  BasisFamily family = BasisFamily::ZakPulsone;
  // AFDM chirp constants c1 = c1_num/MN and c2 = c2_num/MN.
  long long afdm_c1_num = 1;
  long long afdm_c2_num = 0;
  // SpreadCazac rotation.
  SymplecticParams symplectic;
};

void validate_basis(const BasisSpec& spec);
TDSequence basis_element(const BasisSpec& spec, long long i);
Eigen::MatrixXcd basis_matrix(const BasisSpec& spec);

enum class SubgroupKind { RectLattice, Line };

struct SubgroupSpec {
  GridParams grid;
  SubgroupKind kind = SubgroupKind::RectLattice;
  long long alpha = 1;  // Line slope; the set is {(k, 2 alpha k mod MN)}
};

SubgroupSpec rect_subgroup(const GridParams& g);
// Requires odd MN and gcd(alpha, MN) = 1.
SubgroupSpec line_subgroup(const GridParams& g, long long alpha);

// All MN elements of the subgroup as (k, l) pairs in Z_MN x Z_MN.
std::vector<std::pair<long long, long long>> subgroup_index_set(
    const SubgroupSpec& sg);

// Eigenvector of index i for the subgroup: pulsone (i = k0 + l0 M) for the
// rectangular lattice, chirp with slope alpha and linear term i for a Line.
TDSequence subgroup_eigenvector(const SubgroupSpec& sg, long long i);

struct EigenCheckResult {
  bool is_eigenvector = false;
  double max_residual = 0.0;
  // eigenvalue per subgroup element, keyed by (k, l)
  std::map<std::pair<long long, long long>, cd> eigenvalues;
};

// lambda_s = <D_s x, x> for each s in S; eigenvector iff every residual
// ||D_s x - lambda_s x|| < tol (x is normalized internally).
EigenCheckResult eigen_check(const TDSequence& x, const SubgroupSpec& sg,
                             double tol = 1e-8);

}  // namespace zakdd
