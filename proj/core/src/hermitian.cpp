#include "secrelay/hermitian.hpp"

#include <cmath>

#include "secrelay/errors.hpp"

namespace secrelay {

bool is_hermitian(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  if (!m.allFinite()) return false;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

HermitianMatrix::HermitianMatrix(const CMatrix& m, double tol) {
  if (m.rows() != m.cols()) throw DomainError("HermitianMatrix: matrix is not square");
  if (!m.allFinite()) throw DomainError("HermitianMatrix: non-finite entry");
  if (!is_hermitian(m, tol)) throw DomainError("HermitianMatrix: matrix is not conjugate-symmetric");
  m_ = 0.5 * (m + m.adjoint());
}

HermitianMatrix HermitianMatrix::zero(Eigen::Index n) { return HermitianMatrix(CMatrix::Zero(n, n)); }

HermitianMatrix HermitianMatrix::identity(Eigen::Index n) { return HermitianMatrix(CMatrix::Identity(n, n)); }

HermitianMatrix HermitianMatrix::outer(const CVector& v) { return HermitianMatrix(v * v.adjoint()); }

RVector HermitianMatrix::eigenvalues() const {
  if (dim() == 0) return RVector();
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(m_, Eigen::EigenvaluesOnly);
  return eig.eigenvalues();
}

double HermitianMatrix::min_eigenvalue() const {
  if (dim() == 0) return 0.0;
  return eigenvalues()(0);
}

RMatrix complex_to_real_embed(const HermitianMatrix& h) {
  const Eigen::Index n = h.dim();
  const CMatrix& m = h.matrix();
  RMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = m.real();
  out.topRightCorner(n, n) = -m.imag();
  out.bottomLeftCorner(n, n) = m.imag();
  out.bottomRightCorner(n, n) = m.real();
  return out;
}

RMatrix complex_to_real_embed(const CMatrix& h) {
  if (!is_hermitian(h)) throw DomainError("complex_to_real_embed: input is not Hermitian");
  return complex_to_real_embed(HermitianMatrix(h));
}

}  // namespace secrelay
