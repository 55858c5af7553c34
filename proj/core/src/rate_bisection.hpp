#pragma once

#include <functional>

#include "secrelay/lmi.hpp"
#include "secrelay/mutual_information.hpp"
#include "secrelay/scenario.hpp"
#include "secrelay/solve_outcome.hpp"

namespace secrelay::detail {

/// Builds the feasibility problem at level t; reports the Phi/Psi handles
/// (Psi id -1 when absent).
using LevelProblem = std::function<LmiProblem(double t, MatrixVar& phi, MatrixVar& psi)>;

/// Shared driver of the perfect and robust programs: bisection on the level
/// over [0, hi], minimum-power refinement of the final witness, beamvector
/// extraction and rate recovery. `outcome` arrives with R0/Ps set and is
/// filled in.
void solve_level(const LevelProblem& build, double hi, const MiEvaluator& mi, const SolverSettings& settings,
                 SolveStatus infeasible_status, SolveOutcome& outcome);

}  // namespace secrelay::detail
