#pragma once
// Discrete cross-ambiguity surfaces on the MN x MN torus, the fast pulsone
// path, Moyal's identity, and the predictability / crystallization checks.

#include <set>
#include <utility>
#include <vector>

#include "zakdd/grid.hpp"
#include "zakdd/waveforms.hpp"

namespace zakdd {

using Point = std::pair<long long, long long>;
using PointList = std::vector<Point>;

// Cells evaluated by an ambiguity computation, in Z_MN x Z_MN.
PointList core_region(const GridParams& g);    // [0,M) x [0,N)
PointList torus_region(const GridParams& g);   // [0,MN) x [0,MN)
// Inclusive box, wrapped into the torus (bounds may be negative).
PointList box_region(const GridParams& g, long long k_min, long long k_max,
                     long long l_min, long long l_max);

struct AmbiguitySurface {
  GridParams grid;
  PointList region;
  std::vector<cd> values;  // aligned with region

  cd value_at(long long k, long long l) const;  // throws if cell not present
};

// A[k,l] = sum_n x[n] conj(y[(n-k) mod MN]) exp(-j 2 pi l (n-k) / MN).
AmbiguitySurface cross_ambiguity(const TDSequence& x, const TDSequence& y,
                                 const PointList& region);

// Same surface for y = pulsone(k0, l0), via one cached length-N transform per
// delay residue; O(1) multiplies per requested cell after the M transforms.
AmbiguitySurface fast_cross_ambiguity_pulsone(const TDSequence& x, int k0,
                                              int l0, const PointList& region);

// Moyal: (1/MN) sum_{k,l over the torus} conj(A_x[k,l]) A_y[k,l] = |<x,y>|^2.
struct MoyalCheck {
  cd lhs;
  double rhs;
};
MoyalCheck moyal_check(const TDSequence& x, const TDSequence& y);

// Difference set K_S = {s1 - s2 mod MN : s1, s2 in S}.
PointList channel_support_kset(const PointList& support, long long MN);

// True iff the self-ambiguity is 1 at the origin and < tol on K_S \ {0}.
// Throws if the surface's region does not cover K_S.
bool predictability_check(const AmbiguitySurface& self_ambiguity,
                          const PointList& support, double tol = 1e-6);

struct RegionBox {
  long long k_min = 0, k_max = 0, l_min = 0, l_max = 0;
  bool contains(long long k, long long l) const {
    return k >= k_min && k <= k_max && l >= l_min && l <= l_max;
  }
};

// True iff the translates {C + s : s in S} are pairwise disjoint on the torus,
// i.e. no nonzero difference of S elements falls inside C - C.
bool crystallization_check(const PointList& subgroup_set, const RegionBox& C,
                           long long MN);

}  // namespace zakdd
