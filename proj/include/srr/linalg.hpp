#pragma once

#include <cstdint>
#include <random>

#include "srr/types.hpp"

namespace srr {

// Deterministic standard-normal source: mt19937_64 + explicit Box-Muller so
// streams are identical across standard libraries. gauss() hands out one
// N(0,1) variate; complex entries take (re, im) as two consecutive draws
// scaled by 1/sqrt(2).
class Mt64 {
 public:
  explicit Mt64(std::uint64_t seed) : eng_(seed) {}
  double uniform();    // (0, 1], never exactly 0
  double gauss();      // N(0, 1)
  Cplx cgauss_unit();  // CN(0, 1): (g1 + i g2)/sqrt(2)

 private:
  std::mt19937_64 eng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Frobenius norm of the anti-Hermitian part, ||A - A^H||_F.
double hermitian_defect(const CMat& a);

inline CMat hermitian_part(const CMat& a) { return 0.5 * (a + a.adjoint()); }

// log(det(M)) for Hermitian positive definite M, via Cholesky pivots.
// Throws DomainError when M is not Hermitian (defect > tol) or not PD; the
// PD failure message carries the offending smallest eigenvalue.
double logdet_hermitian_pd(const CMat& m, double herm_tol = 1e-9);

// Smallest eigenvalue of the Hermitian part of A.
double min_eigenvalue(const CMat& a);

// Symmetrize and clip tiny negative eigenvalues (>= clip_floor) to zero.
// Eigenvalues below clip_floor raise DomainError: that is corruption, not
// roundoff.
CMat sanitize_psd(const CMat& a, double clip_floor = -1e-9);

// Random Hermitian PSD with the given trace (G*G^H scaled); used by property
// tests and perturbation trials.
CMat random_psd(Mt64& gen, int n, double trace);
// Random Hermitian with the given Frobenius norm, indefinite in general.
CMat random_hermitian(Mt64& gen, int n, double fro_norm);

}  // namespace srr
