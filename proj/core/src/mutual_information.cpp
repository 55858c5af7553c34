#include "secrelay/mutual_information.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/special_functions/fpclassify.hpp>  // pchip.hpp needs isnan in scope
#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <shared_mutex>
#include <sstream>

#include "secrelay/errors.hpp"

namespace secrelay {

HermiteRule gauss_hermite(int order) {
  if (order < 1) throw DomainError("gauss_hermite: order must be positive");
  const int n = order;

  // Golub-Welsch: eigenvalues of the Jacobi matrix of the physicists' Hermite
  // recurrence give the nodes.
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(k / 2.0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);

  // Orthonormal Hermite functions p_0..p_n at x (weight exp(-x^2)).
  auto orthonormal = [n](double x, std::vector<double>& p) {
    p.assign(n + 1, 0.0);
    p[0] = std::pow(std::numbers::pi, -0.25);
    if (n >= 1) p[1] = std::sqrt(2.0) * x * p[0];
    for (int k = 1; k < n; ++k) {
      p[k + 1] = std::sqrt(2.0 / (k + 1)) * x * p[k] - std::sqrt(static_cast<double>(k) / (k + 1)) * p[k - 1];
    }
  };

  HermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  std::vector<double> p;
  for (int i = 0; i < n; ++i) {
    double x = eig.eigenvalues()(i);
    // Newton polish on p_n, using p_n' = sqrt(2n) p_{n-1}.
    for (int it = 0; it < 4; ++it) {
      orthonormal(x, p);
      const double step = p[n] / (std::sqrt(2.0 * n) * p[n - 1]);
      x -= step;
      if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    orthonormal(x, p);
    double christoffel = 0.0;
    for (int k = 0; k < n; ++k) christoffel += p[k] * p[k];
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / christoffel;
  }
  return rule;
}

struct MonotoneTable::Impl {
  boost::math::interpolators::pchip<std::vector<double>> spline;
};

MonotoneTable::MonotoneTable(std::vector<double> rho, std::vector<double> bits) {
  if (rho.size() < 4 || rho.size() != bits.size()) {
    throw DomainError("MonotoneTable: need >= 4 matching (rho, I) samples");
  }
  if (!std::is_sorted(rho.begin(), rho.end()) ||
      std::adjacent_find(rho.begin(), rho.end()) != rho.end()) {
    throw DomainError("MonotoneTable: rho grid must be strictly increasing");
  }
  // Quadrature noise near saturation can dip by ~1e-16; PCHIP preserves
  // monotonicity only of monotone data.
  for (std::size_t i = 1; i < bits.size(); ++i) bits[i] = std::max(bits[i], bits[i - 1]);
  lo_ = rho.front();
  hi_ = rho.back();
  impl_ = std::make_shared<const Impl>(Impl{
      boost::math::interpolators::pchip<std::vector<double>>(std::move(rho), std::move(bits))});
}

double MonotoneTable::operator()(double rho) const {
  if (!contains(rho)) {
    std::ostringstream os;
    os << "MonotoneTable: rho=" << rho << " outside [" << lo_ << ", " << hi_ << "]";
    throw DomainError(os.str());
  }
  return impl_->spline(rho);
}

struct MiEvaluator::Cache {
  mutable std::shared_mutex mutex;
  std::map<double, double> values;
};

MiEvaluator::MiEvaluator(Alphabet alphabet, int quadrature_order)
    : alphabet_(std::move(alphabet)), order_(quadrature_order), cache_(std::make_shared<Cache>()) {
  if (order_ < kMinimumOrder) {
    throw DomainError("MiEvaluator: quadrature order must be >= " + std::to_string(kMinimumOrder));
  }
  const HermiteRule rule = gauss_hermite(order_);
  nodes_.reserve(static_cast<std::size_t>(order_) * order_);
  weights_.reserve(nodes_.capacity());
  for (int i = 0; i < order_; ++i) {
    for (int j = 0; j < order_; ++j) {
      nodes_.emplace_back(rule.nodes[i], rule.nodes[j]);
      weights_.push_back(rule.weights[i] * rule.weights[j] / std::numbers::pi);
    }
  }
}

double MiEvaluator::evaluate(double rho) const {
  const auto& a = alphabet_.symbols();
  const int m = alphabet_.size();
  const double amp = std::sqrt(rho);

  std::vector<Complex> d(static_cast<std::size_t>(m) * m);
  for (int l = 0; l < m; ++l) {
    for (int k = 0; k < m; ++k) d[l * m + k] = amp * (a[l] - a[k]);
  }

  std::vector<double> expo(m);
  double expected_log = 0.0;
  for (int l = 0; l < m; ++l) {
    const Complex* dl = &d[static_cast<std::size_t>(l) * m];
    double acc = 0.0;
    for (std::size_t q = 0; q < nodes_.size(); ++q) {
      const double nr = nodes_[q].first;
      const double ni = nodes_[q].second;
      // -|n + d|^2 + |n|^2 = -|d|^2 - 2 Re(conj(n) d)
      double peak = -std::numeric_limits<double>::infinity();
      for (int k = 0; k < m; ++k) {
        const double e = -std::norm(dl[k]) - 2.0 * (nr * dl[k].real() + ni * dl[k].imag());
        expo[k] = e;
        peak = std::max(peak, e);
      }
      double sum = 0.0;
      for (int k = 0; k < m; ++k) sum += std::exp(expo[k] - peak);
      acc += weights_[q] * (peak + std::log(sum));
    }
    expected_log += acc;
  }
  const double bits = alphabet_.capacity_bits() - expected_log / (m * std::numbers::ln2);
  if (!std::isfinite(bits)) {
    std::ostringstream os;
    os << "mutual_information: non-finite result at rho=" << rho << " (quadrature order " << order_ << ")";
    throw NumericError(os.str());
  }
  return std::clamp(bits, 0.0, alphabet_.capacity_bits());
}

double MiEvaluator::mutual_information(double rho) const {
  if (!(rho >= 0.0)) {
    std::ostringstream os;
    os << "mutual_information: SNR must be nonnegative, got " << rho;
    throw DomainError(os.str());
  }
  if (rho == 0.0) return 0.0;
  if (std::isinf(rho)) return alphabet_.capacity_bits();

  if (cache_enabled_) {
    std::shared_lock lock(cache_->mutex);
    if (auto it = cache_->values.find(rho); it != cache_->values.end()) return it->second;
  }
  const double bits = evaluate(rho);
  if (cache_enabled_) {
    std::unique_lock lock(cache_->mutex);
    cache_->values.emplace(rho, bits);
  }
  return bits;
}

double MiEvaluator::inverse(double target_bits) const {
  if (!(target_bits >= 0.0)) {
    std::ostringstream os;
    os << "inverse_mi: target must be nonnegative, got " << target_bits;
    throw DomainError(os.str());
  }
  if (target_bits >= alphabet_.capacity_bits()) return std::numeric_limits<double>::infinity();
  if (target_bits == 0.0) return 0.0;

  auto f = [&](double rho) { return mutual_information(rho) - target_bits; };

  double lo = 0.0;
  double hi = 1.0;
  double f_hi = f(hi);
  while (f_hi < 0.0) {
    lo = hi;
    hi *= 4.0;
    if (hi > 1e15) return std::numeric_limits<double>::infinity();
    f_hi = f(hi);
  }
  if (f_hi == 0.0) return hi;
  const double f_lo = lo == 0.0 ? -target_bits : f(lo);

  boost::uintmax_t max_iter = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15 * std::max(1.0, std::abs(b)); };
  const auto [left, right] = boost::math::tools::toms748_solve(f, lo, hi, f_lo, f_hi, tol, max_iter);
  const double fl = f(left);
  const double fr = f(right);
  return std::abs(fl) <= std::abs(fr) ? left : right;
}

MonotoneTable MiEvaluator::tabulate(std::span<const double> rho_grid) const {
  std::vector<double> rho(rho_grid.begin(), rho_grid.end());
  std::vector<double> bits;
  bits.reserve(rho.size());
  for (double r : rho) bits.push_back(mutual_information(r));
  return MonotoneTable(std::move(rho), std::move(bits));
}

std::size_t MiEvaluator::cache_size() const {
  std::shared_lock lock(cache_->mutex);
  return cache_->values.size();
}

}  // namespace secrelay
