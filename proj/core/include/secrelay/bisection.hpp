#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>

namespace secrelay {

template <class Witness>
struct BisectionResult {
  /// Largest value found feasible (lo when the problem is infeasible).
  double value = 0.0;
  std::optional<Witness> witness;
  int probes = 0;
  /// check(lo) failed: there is no feasible point in the interval.
  bool problem_infeasible = false;
  /// The re-probe at value/2 (if requested) was feasible.
  bool monotone_spot_check = true;
};

/// Largest v in [lo, hi] (within tol) with check(v) feasible, assuming
/// feasibility is monotone (feasible at v implies feasible below v). `check`
/// returns the witness on success and nullopt otherwise.
template <class Witness>
BisectionResult<Witness> bisect_max(const std::function<std::optional<Witness>(double)>& check, double lo,
                                    double hi, double tol, bool spot_check = false) {
  if (!(tol > 0.0)) throw std::invalid_argument("bisect_max: tol must be positive");
  if (!(hi >= lo)) throw std::invalid_argument("bisect_max: hi < lo");

  BisectionResult<Witness> out;
  out.value = lo;
  auto at_lo = check(lo);
  ++out.probes;
  if (!at_lo) {
    out.problem_infeasible = true;
    return out;
  }
  out.witness = std::move(at_lo);

  if (hi - lo > 0.0) {
    auto at_hi = check(hi);
    ++out.probes;
    if (at_hi) {
      out.value = hi;
      out.witness = std::move(at_hi);
    } else {
      double good = lo;
      double bad = hi;
      while (bad - good > tol) {
        const double mid = 0.5 * (good + bad);
        auto w = check(mid);
        ++out.probes;
        if (w) {
          good = mid;
          out.witness = std::move(w);
        } else {
          bad = mid;
        }
      }
      out.value = good;
    }
  }

  if (spot_check && out.value > lo) {
    out.monotone_spot_check = check(0.5 * (lo + out.value)).has_value();
    ++out.probes;
  }
  return out;
}

}  // namespace secrelay
