#pragma once
// Unitary transforms between the time, delay-Doppler, and chirp domains.
//
// dzt:    X[k,l]    = (1/sqrt(N)) sum_p x[k + pM] exp(-j 2 pi p l / N)
// idzt:   x[k + pM] = (1/sqrt(N)) sum_l X[k,l]    exp(+j 2 pi p l / N)
// idfzt:  s[i]      = (1/sqrt(M)) sum_k0 X[k0, i mod N] exp(-j 2 pi i k0 / MN)
// gdaft:  y[n] = (1/sqrt(MN)) sum_m exp(j pi binv (d n^2 - 2 n m + a m^2)/MN) x[m]
//         with binv the modular inverse of b mod MN; requires gcd(b, MN) = 1
//         and a d - b c = 1 (mod MN). Exponents are integers reduced mod 2MN.

#include "zakdd/grid.hpp"

namespace zakdd {

DDArray dzt(const TDSequence& x);
TDSequence idzt(const DDArray& X);

// Frequency-domain (OFDM-view) map and its adjoint; the transform is unitary,
// so the adjoint is the inverse.
TDSequence idfzt(const DDArray& X);
DDArray idfzt_adjoint(const TDSequence& s);

struct SymplecticParams {
  long long a = 1, b = 1, c = 0, d = 1;
};

// Throws invalid_argument unless gcd(b, MN) = 1 and ad - bc = 1 (mod MN).
void validate_symplectic(const SymplecticParams& g, long long MN);

long long mod_inverse(long long b, long long m);  // extended Euclid

// Lift of b^-1 mod MN used inside half-angle exponents exp(j pi t / MN):
// such exponents only see t mod 2MN, so for odd MN the even lift is taken,
// which makes the kernel well defined on residues and preserves the
// Heisenberg covariance of the transform. For even MN squares are already
// lift-independent mod 2MN and the canonical inverse is returned.
long long gdaft_phase_inverse(long long b, long long MN);

TDSequence gdaft(const TDSequence& x, const SymplecticParams& g);
TDSequence gdaft_inverse(const TDSequence& y, const SymplecticParams& g);

// Image of a DD point under the symplectic action: (k,l) -> (ak+bl, ck+dl)
// mod MN. Ambiguity surfaces transport along this map.
std::pair<long long, long long> symplectic_apply(const SymplecticParams& g,
                                                 long long k, long long l,
                                                 long long MN);

}  // namespace zakdd
