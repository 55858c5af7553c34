#pragma once

#include <Eigen/Dense>
#include <complex>

namespace secrelay {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

/// Dense complex matrix known to be conjugate-symmetric.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  /// Throws DomainError unless `m` is square, finite and Hermitian within
  /// `tol` (relative to its largest entry); the stored value is symmetrized.
  explicit HermitianMatrix(const CMatrix& m, double tol = 1e-12);

  static HermitianMatrix zero(Eigen::Index n);
  static HermitianMatrix identity(Eigen::Index n);
  /// v v^*
  static HermitianMatrix outer(const CVector& v);

  Eigen::Index dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }
  double trace() const { return m_.trace().real(); }
  /// Eigenvalues in ascending order.
  RVector eigenvalues() const;
  double min_eigenvalue() const;

 private:
  CMatrix m_;
};

/// [[Re H, -Im H], [Im H, Re H]]. H is PSD iff the embedding is, and each
/// eigenvalue of H appears twice in the embedding.
RMatrix complex_to_real_embed(const HermitianMatrix& h);
/// Same, validating Hermitian structure first (DomainError otherwise).
RMatrix complex_to_real_embed(const CMatrix& h);

bool is_hermitian(const CMatrix& m, double tol = 1e-12);

}  // namespace secrelay
