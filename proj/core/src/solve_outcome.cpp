#include "secrelay/solve_outcome.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "secrelay/errors.hpp"

namespace secrelay {

const char* to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::Ok:
      return "ok";
    case SolveStatus::EavDirectLinkExceedsR0:
      return "eav_direct_link_exceeds_R0";
    case SolveStatus::DirectLinkDominates:
      return "direct_link_dominates";
    case SolveStatus::RobustInfeasibleAtZero:
      return "robust_infeasible_at_zero";
    case SolveStatus::RelayLinkUnusable:
      return "relay_link_unusable";
    case SolveStatus::SolverFailure:
      return "solver_failure";
  }
  return "unknown";
}

double SolveOutcome::scalar(const std::string& name) const {
  for (const auto& [key, value] : scalars) {
    if (key == name) return value;
  }
  throw DomainError("SolveOutcome: no scalar named '" + name + "'");
}

Beamvector extract_beamvector(const HermitianMatrix& Phi) {
  const Eigen::Index n = Phi.dim();
  Beamvector out;
  out.phi = CVector::Zero(n);
  if (n == 0) return out;

  Eigen::SelfAdjointEigenSolver<CMatrix> eig(Phi.matrix());
  const RVector& values = eig.eigenvalues();  // ascending
  const double top = values(n - 1);
  const double scale = std::max(top, 0.0);
  if (values(0) < -1e-9 * std::max(1.0, scale)) {
    throw DomainError("extract_beamvector: matrix is not positive semidefinite");
  }
  constexpr double kTiny = 1e-14;
  if (top <= kTiny) return out;

  out.rank_ratio = n > 1 ? std::max(values(n - 2), 0.0) / top : 0.0;
  CVector v = eig.eigenvectors().col(n - 1) * std::sqrt(top);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(v(i)) > 1e-12 * v.norm()) {
      v *= std::conj(v(i)) / std::abs(v(i));
      v(i) = Complex(v(i).real(), 0.0);
      break;
    }
  }
  out.phi = v;
  return out;
}

}  // namespace secrelay
