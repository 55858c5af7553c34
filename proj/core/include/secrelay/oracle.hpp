#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "secrelay/alphabet.hpp"
#include "secrelay/perfect_csi.hpp"
#include "secrelay/robust_csi.hpp"

namespace secrelay {

/// Brute-force verifiers that share no code path with the quadrature and
/// the SDP solver.
struct OracleConfig {
  std::int64_t mc_samples = 1'000'000;
  std::int64_t search_samples = 100'000;
  std::int64_t error_samples = 10'000;
  std::uint64_t seed = 20240611;
  int threads = 1;

  /// Throws DomainError unless every count is at least 1000.
  void validate() const;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// Sample-mean estimate of I(rho): uniform symbol, CN(0,1) noise, exact
/// log-likelihood ratio per draw. Batches use seeds derived from cfg.seed, so
/// results do not depend on the thread count.
MonteCarloEstimate mi_monte_carlo(const Alphabet& alphabet, double rho, const OracleConfig& cfg);

struct BeamformerCandidate {
  /// a + h Phi h^* / (N0 + h Psi h^*) at the candidate.
  double t = 0.0;
  CVector phi;
  HermitianMatrix Psi;
  std::int64_t evaluations = 0;
};

/// Direct search over rank-one Phi = phi phi^* and Psi >= 0 for the largest
/// destination SNR term satisfying the eavesdropper, decodability and power
/// constraints. Directions (phi / ||phi||, Psi / Tr Psi) are sampled at
/// random and polished by Nelder-Mead; for each direction pair the split of
/// relay power between signal and noise is optimized exactly. Returns nullopt
/// when no direction is feasible (e.g. b_j above the cap). Requires N <= 3.
std::optional<BeamformerCandidate> beamformer_search(const PerfectInstance& inst, const OracleConfig& cfg);

enum class Extremum { Min, Max };

struct WorstCase {
  double value = 0.0;
  double nominal = 0.0;
  /// Minimizing (or maximizing) error row vector.
  CVector error;
  /// Best value over the random ball/sphere samples alone.
  double sampled = 0.0;
};

/// Extreme of  constant + (row + e) Q (row + e)^*  over ||e|| <= eps: exact
/// trust-region solution (eigen-decomposition plus secular equation),
/// cross-checked against cfg.error_samples random points of the ball and its
/// boundary. The better of the two is returned.
WorstCase worst_case_quadratic(const CMatrix& Q, const CVector& row, double constant, double eps,
                               Extremum extremum, const OracleConfig& cfg);

/// The six worst-case quantities of the robust program.
enum class ErrorSelector {
  DestinationNumerator,    ///< min a N0 + (h+e)(a Psi + Phi)(h+e)^*  >= r1
  DestinationDenominator,  ///< max N0 + (h+e) Psi (h+e)^*           <= r2
  EavesdropperNumerator,   ///< max b N0 + (z+e)(b Psi + Phi)(z+e)^* <= s1j
  EavesdropperDenominator, ///< min N0 + (z+e) Psi (z+e)^*           >= s2j
  RelaySignal,             ///< max (h+e) Phi (h+e)^*                <= r3
  DestinationNoise,        ///< min N0 + (h+e) Psi (h+e)^*           >= r4
};

const char* to_string(ErrorSelector selector) noexcept;

WorstCase worst_case_error_search(ErrorSelector selector, int eavesdropper, const HermitianMatrix& Phi,
                                  const HermitianMatrix& Psi, const RobustInstance& inst, const OracleConfig& cfg);

struct ReplayCheck {
  std::string name;
  /// Amount by which the check fails (<= 0 means satisfied).
  double violation = 0.0;
};

struct ReplayReport {
  std::vector<ReplayCheck> checks;
  double max_violation() const;
};

/// Re-evaluates the rate expressions with the extracted rank-one phi and Psi:
/// destination SNR >= t_max, eavesdropper SNRs <= cap, decodability, power.
ReplayReport replay_perfect(const SolveOutcome& outcome, const PerfectInstance& inst);

/// Draws cfg.error_samples errors uniformly in each uncertainty ball and
/// checks the six worst-case inequalities against the witness auxiliaries
/// (r1..r4, s1j, s2j); blocks in scalar form are checked at e = 0.
ReplayReport replay_s_procedure(const SolveOutcome& outcome, const RobustInstance& inst, const OracleConfig& cfg);

}  // namespace secrelay
