#include "srr/linalg.hpp"

#include <cmath>
#include <sstream>

namespace srr {

double Mt64::uniform() {
  // Map to (0, 1]: zero would break the Box-Muller log.
  return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
}

double Mt64::gauss() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Cplx Mt64::cgauss_unit() {
  double re = gauss();
  double im = gauss();
  return Cplx(re, im) * M_SQRT1_2;
}

double hermitian_defect(const CMat& a) {
  return (a - a.adjoint()).norm();
}

double min_eigenvalue(const CMat& a) {
  Eigen::SelfAdjointEigenSolver<CMat> es(hermitian_part(a),
                                         Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double logdet_hermitian_pd(const CMat& m, double herm_tol) {
  if (m.rows() != m.cols()) throw DomainError("logdet: matrix not square");
  double defect = hermitian_defect(m);
  if (!(defect <= herm_tol)) {
    std::ostringstream os;
    os << "logdet: matrix not Hermitian (defect " << defect << ")";
    throw DomainError(os.str());
  }
  Eigen::LLT<CMat> llt(hermitian_part(m));
  if (llt.info() != Eigen::Success) {
    std::ostringstream os;
    os << "logdet: matrix not positive definite (min eigenvalue "
       << min_eigenvalue(m) << ")";
    throw DomainError(os.str());
  }
  double acc = 0.0;
  const auto& l = llt.matrixLLT();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

CMat sanitize_psd(const CMat& a, double clip_floor) {
  CMat h = hermitian_part(a);
  Eigen::SelfAdjointEigenSolver<CMat> es(h);
  RVec ev = es.eigenvalues();
  double lo = ev.minCoeff();
  if (lo < clip_floor) {
    std::ostringstream os;
    os << "covariance eigenvalue " << lo << " below clip floor " << clip_floor;
    throw DomainError(os.str());
  }
  if (lo >= 0.0) return h;
  RVec clipped = ev.cwiseMax(0.0);
  return es.eigenvectors() * clipped.asDiagonal() *
         es.eigenvectors().adjoint();
}

CMat random_psd(Mt64& gen, int n, double trace) {
  CMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gen.cgauss_unit();
  CMat p = g * g.adjoint();
  double t = p.real().trace();
  if (t <= 0.0) return CMat::Identity(n, n) * (trace / n);
  return p * (trace / t);
}

CMat random_hermitian(Mt64& gen, int n, double fro_norm) {
  CMat g(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) g(i, j) = gen.cgauss_unit();
  CMat h = hermitian_part(g);
  double nrm = h.norm();
  if (nrm <= 0.0) return CMat::Zero(n, n);
  return h * (fro_norm / nrm);
}

}  // namespace srr
