#pragma once

#include <memory>
#include <span>
#include <utility>
#include <vector>

#include "secrelay/alphabet.hpp"

namespace secrelay {

/// Nodes and weights of the n-point Gauss-Hermite rule for weight exp(-x^2).
struct HermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

HermiteRule gauss_hermite(int order);

/// Piecewise-cubic monotone (PCHIP) interpolant of I(rho) on a fixed grid.
/// Immutable once built, so it can be shared across sweep threads.
class MonotoneTable {
 public:
  MonotoneTable(std::vector<double> rho, std::vector<double> bits);

  double min_rho() const noexcept { return lo_; }
  double max_rho() const noexcept { return hi_; }
  bool contains(double rho) const noexcept { return rho >= lo_ && rho <= hi_; }
  /// Interpolated value; rho outside [min_rho, max_rho] throws DomainError.
  double operator()(double rho) const;

 private:
  struct Impl;
  std::shared_ptr<const Impl> impl_;
  double lo_ = 0.0;
  double hi_ = 0.0;
};

/// Finite-alphabet mutual information over the complex AWGN channel,
///
///   I(rho) = log2 M - (1/M) sum_l E_n[ log2 sum_m exp(-|n + sqrt(rho)(a_l - a_m)|^2 + |n|^2) ],
///
/// with n ~ CN(0, 1). The expectation is taken by a tensor-product
/// Gauss-Hermite rule centred on each transmitted symbol.
///
/// Exact evaluations are memoized in a cache shared between copies; the
/// cache is guarded by a reader/writer lock so one evaluator can serve a
/// whole thread pool.
class MiEvaluator {
 public:
  static constexpr int kDefaultOrder = 48;
  static constexpr int kMinimumOrder = 16;

  explicit MiEvaluator(Alphabet alphabet, int quadrature_order = kDefaultOrder);

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  int quadrature_order() const noexcept { return order_; }

  /// I(rho) in bits per symbol. Throws DomainError for rho < 0 and
  /// NumericError if the quadrature produces a non-finite value.
  double mutual_information(double rho) const;

  /// 0.5 * I(rho): the per-hop rate of a two-hop link.
  double half_rate(double rho) const { return 0.5 * mutual_information(rho); }

  /// The SNR at which I reaches `target_bits`, or +infinity when the target
  /// is at or above log2 M (the constraint it encodes is vacuous).
  double inverse(double target_bits) const;

  /// Builds a monotone interpolation table on `rho_grid` (sorted, >= 2 points).
  MonotoneTable tabulate(std::span<const double> rho_grid) const;

  void set_cache_enabled(bool enabled) noexcept { cache_enabled_ = enabled; }
  std::size_t cache_size() const;

 private:
  double evaluate(double rho) const;

  struct Cache;

  Alphabet alphabet_;
  int order_;
  // Flattened 2-D rule: complex node offsets and their product weights / pi.
  std::vector<std::pair<double, double>> nodes_;
  std::vector<double> weights_;
  std::shared_ptr<Cache> cache_;
  bool cache_enabled_ = true;
};

}  // namespace secrelay
