#include "rate_bisection.hpp"

#include <algorithm>

#include "secrelay/bisection.hpp"
#include "secrelay/feasibility.hpp"

namespace secrelay::detail {

void solve_level(const LevelProblem& build, double hi, const MiEvaluator& mi, const SolverSettings& settings,
                 SolveStatus infeasible_status, SolveOutcome& outcome) {
  FeasibilityOptions options;
  options.feas_tol = settings.feas_tol;
  options.max_iterations = settings.max_iterations;

  bool breakdown_at_zero = false;
  std::string diagnostic_at_zero;
  const std::function<std::optional<Assignment>(double)> check = [&](double t) -> std::optional<Assignment> {
    MatrixVar phi, psi;
    const LmiProblem problem = build(t, phi, psi);
    FeasibilityReport report = solve_feasibility(problem, options);
    if (t == 0.0) {
      breakdown_at_zero = report.breakdown;
      diagnostic_at_zero = report.diagnostic;
    }
    if (!report.feasible()) return std::nullopt;
    return std::move(report.witness);
  };

  const double tol = std::max(settings.bisect_tol * hi, 1e-300);
  auto result = bisect_max<Assignment>(check, 0.0, hi, tol, true);
  outcome.probes = result.probes;
  outcome.monotone_spot_check = result.monotone_spot_check;

  MatrixVar phi_var, psi_var;
  const LmiProblem problem = build(result.value, phi_var, psi_var);
  const int n = problem.layout().matrices.at(static_cast<std::size_t>(phi_var.id)).dim;

  if (result.problem_infeasible) {
    outcome.status = breakdown_at_zero ? SolveStatus::SolverFailure : infeasible_status;
    outcome.diagnostic = diagnostic_at_zero;
    outcome.t_max = 0.0;
    outcome.Phi = HermitianMatrix::zero(n);
    outcome.Psi = HermitianMatrix::zero(n);
    outcome.phi = CVector::Zero(n);
    outcome.rank_ratio = 0.0;
    outcome.secrecy_rate = 0.0;
    outcome.power_used = 0.0;
    return;
  }

  // The phase-I witness sits deep inside the feasible set (full rank when
  // decodability binds); the least-power point at the same level does not.
  Assignment witness = *result.witness;
  const auto power = [phi_var, psi_var](const Assignment& x) {
    double p = x.matrix(phi_var).trace().real();
    if (psi_var.id >= 0) p += x.matrix(psi_var).trace().real();
    return p;
  };
  MinimizeOptions refine;
  refine.max_iterations = 4 * settings.max_iterations;
  const MinimizeReport refined = minimize(problem, power, witness, refine);
  if (refined.solution) witness = *refined.solution;
  if (!refined.converged) outcome.diagnostic = "power refinement: " + refined.diagnostic;

  outcome.status = SolveStatus::Ok;
  outcome.t_max = result.value;
  outcome.Phi = witness.hermitian(phi_var);
  outcome.Psi = psi_var.id >= 0 ? witness.hermitian(psi_var) : HermitianMatrix::zero(n);
  const Beamvector beam = extract_beamvector(outcome.Phi);
  outcome.phi = beam.phi;
  outcome.rank_ratio = beam.rank_ratio;
  outcome.power_used = outcome.Phi.trace() + outcome.Psi.trace();
  outcome.secrecy_rate = std::max(0.0, mi.half_rate(outcome.t_max) - outcome.R0);
  outcome.witness_violation = max_violation(evaluate_constraints(problem, witness));
  outcome.scalars.clear();
  for (std::size_t i = 0; i < problem.layout().scalars.size(); ++i) {
    outcome.scalars.emplace_back(problem.layout().scalars[i].name, witness.scalar(ScalarVar{static_cast<int>(i)}));
  }
}

}  // namespace secrelay::detail
