#pragma once

#include <vector>

#include "secrelay/lmi.hpp"
#include "secrelay/mutual_information.hpp"
#include "secrelay/scenario.hpp"
#include "secrelay/solve_outcome.hpp"

namespace secrelay {

/// One perfect-CSI secrecy-rate problem at a fixed R0 and source power.
struct PerfectInstance {
  ScalarBounds bounds;
  CVector h;
  std::vector<CVector> z;
  double N0 = 1.0;
  double Pr_max = 1.0;
  /// I^-1(2 R0); +infinity when the eavesdropper constraints are vacuous.
  double rho_eav_cap = 0.0;
  double R0 = 0.0;
  double Ps = 0.0;
  /// When false the artificial-noise covariance is fixed at zero.
  bool use_an = true;

  static PerfectInstance make(const ChannelSet& channels, const PowerConfig& power, const MiEvaluator& mi,
                              double R0, bool use_an);

  /// Some b_j exceeds the eavesdropper SNR cap.
  bool apriori_infeasible() const;
};

/// Handles into the problem returned by build_feasibility.
struct PerfectVariables {
  MatrixVar Phi;
  MatrixVar Psi;  ///< id -1 when use_an is false
};

/// Destination-SNR feasibility at level t: destination SNR >= t, every
/// eavesdropper SNR <= cap, decodability at the relay, relay power budget.
LmiProblem build_feasibility(const PerfectInstance& inst, double t, PerfectVariables* vars = nullptr);

/// Bisection on t over [0, c], followed by a minimum-power re-solve at the
/// final level so the returned Phi is the rank-one optimum.
SolveOutcome solve_rate(const PerfectInstance& inst, const MiEvaluator& mi, const SolverSettings& settings);

struct PerfectSweep {
  /// R_D = I(Ps_max ||g||^2 / N0) / 2, the top of the R0 grid.
  double R_D = 0.0;
  double delta = 0.0;
  bool use_an = true;
  /// One outcome per grid point R0 = l * delta, l = 0..L (best over the Ps grid).
  std::vector<SolveOutcome> points;
  std::size_t argmax = 0;

  double argmax_R0() const { return points.at(argmax).R0; }
  double max_rate() const { return points.at(argmax).secrecy_rate; }
};

/// Sweeps R0 over L+1 grid points. With settings.grid_K > 1 each point is
/// also maximized over Ps = k Ps_max / K, k = 1..K. Points run on `threads`
/// workers; results are in grid order regardless.
PerfectSweep sweep_R0(const Scenario& scenario, const MiEvaluator& mi, int L, bool use_an, int threads = 1);

struct KktReport {
  /// (t - a)(N0 + hPsih*) - hPhih* at the witness; the destination constraint
  /// must be active at the optimum.
  double destination_residual = 0.0;
  /// (c - a)(N0 + hPsih*) - hPhih*, >= 0; > tol means decodability is slack.
  double decodability_slack = 0.0;
  /// Power saturation is expected (decodability slack and no eavesdropper
  /// constraint can absorb the remaining power).
  bool saturation_expected = false;
  double power_residual = 0.0;  ///< Pr_max - Tr(Phi + Psi)
  bool t_exceeds_a = true;
  bool passed = true;
};

KktReport verify_kkt(const SolveOutcome& outcome, const PerfectInstance& inst, double tol);

}  // namespace secrelay
