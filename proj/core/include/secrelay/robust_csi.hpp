#pragma once

#include <string>
#include <vector>

#include "secrelay/lmi.hpp"
#include "secrelay/mutual_information.hpp"
#include "secrelay/scenario.hpp"
#include "secrelay/solve_outcome.hpp"

namespace secrelay {

/// The worst-case (lower-bound) program for channel estimates with
/// norm-bounded errors, at a fixed R0 and source power.
struct RobustInstance {
  ChannelSet estimates;
  UncertaintyRadii radii;
  /// Robust bounds: a and c deflated, b_j and a_max inflated.
  ScalarBounds bounds;
  double N0 = 1.0;
  double Pr_max = 1.0;
  double rho_eav_cap = 0.0;
  double R0 = 0.0;
  double Ps = 0.0;
  bool use_an = true;

  static RobustInstance make(const ChannelSet& estimates, const UncertaintyRadii& radii, const PowerConfig& power,
                             const MiEvaluator& mi, double R0, bool use_an);

  bool apriori_infeasible() const;
};

/// One S-procedure block: Q + m I, Q h^*, h Q, corner + h Q h^* - m eps^2,
/// requiring  corner + (h+e) Q (h+e)^* >= 0  for all ||e|| <= eps.
struct SProcedureBlock {
  enum class Which { A1, A2, A3, A4, B1, B2 };
  Which which;
  /// Eavesdropper index for B1/B2, -1 otherwise.
  int eavesdropper = -1;
  std::string multiplier;
  /// Zero radius: assembled as the nominal 1x1 inequality, no multiplier.
  bool scalar_form = false;
  std::string name() const;
};

/// (N+1)x(N+1) S-procedure matrix for the quadratic form Q around the row
/// estimate `row`, with multiplier m and radius eps.
CMatrix s_procedure_matrix(const CMatrix& Q, const CVector& row, double corner, double multiplier, double eps);

struct RobustVariables {
  MatrixVar Phi;
  MatrixVar Psi;  ///< id -1 when use_an is false
  ScalarVar r1, r2, r3, r4;
  /// Multipliers have id -1 for blocks in scalar form.
  ScalarVar lambda1, lambda2, lambda3, lambda4;
  std::vector<ScalarVar> s1, s2, mu1, mu2;  ///< empty when the cap is infinite
  std::vector<SProcedureBlock> blocks;
};

/// Feasibility of worst-case destination SNR >= r. Scalars r1, r4, s2j and
/// all multipliers are nonnegative; r2, r3, s1j are free. When the
/// eavesdropper cap is infinite the s/mu variables and B blocks are omitted;
/// blocks with zero radius reduce to their nominal scalar inequality.
LmiProblem build_robust_feasibility(const RobustInstance& inst, double r, RobustVariables* vars = nullptr);

/// Bisection on r over [0, c] with the same witness refinement as the
/// perfect-CSI solver; secrecy_rate is the lower bound max(0, I(r_max)/2 - R0).
SolveOutcome solve_robust_rate(const RobustInstance& inst, const MiEvaluator& mi, const SolverSettings& settings);

}  // namespace secrelay
