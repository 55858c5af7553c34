#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "secrelay/lmi.hpp"

namespace secrelay {

enum class FeasibilityStatus { StrictlyFeasible, Infeasible, Marginal };

const char* to_string(FeasibilityStatus status) noexcept;

struct FeasibilityOptions {
  /// Smallest common slack accepted as strict feasibility.
  double feas_tol = 1e-7;
  /// Newton-step cap; exceeding it yields Marginal.
  int max_iterations = 200;
  /// Variables are confined to ||x|| <= radius so the barrier stays bounded
  /// below on problems with recession directions.
  double radius = 1e4;
  /// Return as soon as an iterate has slack > feas_tol. When false, the
  /// phase-I problem is solved to optimality and the max-slack point returned.
  bool stop_at_first_feasible = true;
  /// Per-iteration CSV dump (iteration,tau,slack,barrier,decrement,step).
  std::ostream* trace = nullptr;
};

struct FeasibilityReport {
  FeasibilityStatus status = FeasibilityStatus::Marginal;
  /// Present unless status is Infeasible.
  std::optional<Assignment> witness;
  /// Best common slack reached by the phase-I iterates.
  double slack = 0.0;
  /// Certified upper bound on the optimal common slack (+inf if unknown).
  double slack_upper_bound = 0.0;
  /// Direct-evaluation violation of the witness (0 when none).
  double max_violation = 0.0;
  int iterations = 0;
  /// Marginal because of a numerical failure or the iteration cap, rather
  /// than an optimum inside the tolerance band.
  bool breakdown = false;
  std::string diagnostic;

  bool feasible() const noexcept { return status == FeasibilityStatus::StrictlyFeasible; }
};

/// Phase-I barrier method: maximize s such that every constraint block,
/// shifted by -s I, is satisfiable. Strictly feasible iff the optimum exceeds
/// feas_tol; a certified optimum below -feas_tol is Infeasible; anything in
/// between (or a numerical breakdown) is Marginal.
FeasibilityReport solve_feasibility(const LmiProblem& problem, const FeasibilityOptions& options = {});

struct MinimizeOptions {
  /// Stop once the barrier duality-gap bound m / tau falls below this.
  double gap_tol = 1e-8;
  int max_iterations = 400;
  double radius = 1e4;
  std::ostream* trace = nullptr;
};

struct MinimizeReport {
  bool converged = false;
  std::optional<Assignment> solution;
  double objective = 0.0;
  double gap_bound = 0.0;
  int iterations = 0;
  std::string diagnostic;
};

/// Barrier method for min objective(x) subject to the problem's constraints,
/// started from a strictly feasible point (for instance a phase-I witness).
/// `objective` must be affine.
MinimizeReport minimize(const LmiProblem& problem, const LmiProblem::ScalarMap& objective,
                        const Assignment& strictly_feasible_start, const MinimizeOptions& options = {});

}  // namespace secrelay
