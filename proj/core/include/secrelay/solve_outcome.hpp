#pragma once

#include <string>
#include <utility>
#include <vector>

#include "secrelay/hermitian.hpp"

namespace secrelay {

enum class SolveStatus {
  Ok,
  /// Some eavesdropper's direct-link SNR b_j already exceeds I^-1(2 R0).
  EavDirectLinkExceedsR0,
  /// c <= a: the decodability constraint leaves no room for the relay.
  DirectLinkDominates,
  /// The robust program has no strictly feasible point even at r = 0.
  RobustInfeasibleAtZero,
  /// Worst-case first-hop SNR c is zero.
  RelayLinkUnusable,
  /// The feasibility solver broke down on a probe that had to succeed.
  SolverFailure,
};

const char* to_string(SolveStatus status) noexcept;

struct SolveOutcome {
  double R0 = 0.0;
  /// Source power used for this point.
  double Ps = 0.0;
  /// Largest certified destination SNR term (t_max, or r_max when robust).
  double t_max = 0.0;
  HermitianMatrix Phi;
  HermitianMatrix Psi;
  CVector phi;
  /// lambda_2 / lambda_1 of Phi.
  double rank_ratio = 0.0;
  /// max(0, I(t_max)/2 - R0).
  double secrecy_rate = 0.0;
  double power_used = 0.0;
  SolveStatus status = SolveStatus::Ok;
  /// Remaining scalar variables of the witness (multipliers, auxiliaries).
  std::vector<std::pair<std::string, double>> scalars;
  int probes = 0;
  /// Feasibility re-probe at t_max / 2 succeeded.
  bool monotone_spot_check = true;
  /// Largest direct-evaluation constraint violation of the returned witness.
  double witness_violation = 0.0;
  std::string diagnostic;

  double scalar(const std::string& name) const;
};

/// Principal eigenpair of Phi as a beamvector sqrt(lambda_1) u_1, phase
/// normalized so its first nonzero entry is real and nonnegative.
struct Beamvector {
  CVector phi;
  double rank_ratio = 0.0;
};

/// Throws DomainError if Phi has an eigenvalue below -1e-9 (relative to its
/// largest). Phi ~ 0 yields the zero vector with rank_ratio 0.
Beamvector extract_beamvector(const HermitianMatrix& Phi);

}  // namespace secrelay
