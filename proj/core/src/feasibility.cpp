#include "secrelay/feasibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "secrelay/errors.hpp"

namespace secrelay {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Term {
  int var;
  RMatrix coeff;
};

struct Block {
  std::string name;
  RMatrix constant;
  std::vector<Term> terms;
  int dim() const { return static_cast<int>(constant.rows()); }
};

/// Constraints as real symmetric affine maps of the reduced coordinates y,
/// with x = origin + basis * y absorbing the equality constraints.
struct Compiled {
  int full = 0;
  int reduced = 0;
  RVector origin;
  RMatrix basis;
  std::vector<Block> blocks;
  bool inconsistent_equalities = false;
  double equality_residual = 0.0;

  int degree() const {
    int m = 0;
    for (const auto& b : blocks) m += b.dim();
    return m;
  }
};

RMatrix to_real(const CMatrix& m) {
  if (m.rows() == 1) return RMatrix::Constant(1, 1, m(0, 0).real());
  const Eigen::Index n = m.rows();
  const CMatrix sym = 0.5 * (m + m.adjoint());
  RMatrix out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = sym.real();
  out.topRightCorner(n, n) = -sym.imag();
  out.bottomLeftCorner(n, n) = sym.imag();
  out.bottomRightCorner(n, n) = sym.real();
  return out;
}

RMatrix evaluate_block(const LmiProblem::Constraint& c, const Assignment& x) {
  if (c.kind == LmiProblem::Kind::Psd) {
    const CMatrix m = c.matrix(x);
    if (m.rows() != c.dim || m.cols() != c.dim) {
      throw std::logic_error("constraint '" + c.name + "' returned a matrix of the wrong size");
    }
    return to_real(m);
  }
  // f <= 0 is the 1x1 block -f >= 0.
  return RMatrix::Constant(1, 1, -c.scalar(x));
}

Compiled compile(const LmiProblem& problem) {
  Compiled out;
  const int n = problem.variable_count();
  out.full = n;
  const auto constraints = problem.all_constraints();

  std::vector<Block> raw;
  std::vector<RVector> eq_rows;
  std::vector<double> eq_rhs;

  RVector probe = RVector::Zero(n);
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  RVector random_point(n);
  for (int i = 0; i < n; ++i) random_point(i) = unit(rng);

  for (const auto& c : constraints) {
    if (c.kind == LmiProblem::Kind::EqualZero) {
      const double f0 = c.scalar(problem.assignment(RVector::Zero(n)));
      RVector row(n);
      for (int i = 0; i < n; ++i) {
        probe.setZero();
        probe(i) = 1.0;
        row(i) = c.scalar(problem.assignment(probe)) - f0;
      }
      const double at_random = c.scalar(problem.assignment(random_point));
      if (std::abs(at_random - (f0 + row.dot(random_point))) > 1e-8 * (1.0 + std::abs(at_random))) {
        throw std::logic_error("equality '" + c.name + "' is not affine in the variables");
      }
      eq_rows.push_back(std::move(row));
      eq_rhs.push_back(f0);
      continue;
    }

    Block b;
    b.name = c.name;
    b.constant = evaluate_block(c, problem.assignment(RVector::Zero(n)));
    RMatrix predicted = b.constant;
    for (int i = 0; i < n; ++i) {
      probe.setZero();
      probe(i) = 1.0;
      RMatrix coeff = evaluate_block(c, problem.assignment(probe)) - b.constant;
      if (coeff.cwiseAbs().maxCoeff() == 0.0) continue;
      predicted += random_point(i) * coeff;
      b.terms.push_back({i, std::move(coeff)});
    }
    const RMatrix actual = evaluate_block(c, problem.assignment(random_point));
    if ((actual - predicted).cwiseAbs().maxCoeff() > 1e-8 * (1.0 + actual.cwiseAbs().maxCoeff())) {
      throw std::logic_error("constraint '" + c.name + "' is not affine in the variables");
    }
    raw.push_back(std::move(b));
  }

  if (eq_rows.empty()) {
    out.reduced = n;
    out.origin = RVector::Zero(n);
    out.basis = RMatrix::Identity(n, n);
    out.blocks = std::move(raw);
    return out;
  }

  RMatrix a(static_cast<Eigen::Index>(eq_rows.size()), n);
  RVector rhs(static_cast<Eigen::Index>(eq_rows.size()));
  for (std::size_t k = 0; k < eq_rows.size(); ++k) {
    a.row(static_cast<Eigen::Index>(k)) = eq_rows[k].transpose();
    rhs(static_cast<Eigen::Index>(k)) = -eq_rhs[k];
  }
  Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const RVector& sv = svd.singularValues();
  const double cutoff = 1e-10 * std::max(1.0, sv.size() > 0 ? sv(0) : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) ++rank;
  }
  svd.setThreshold(cutoff / std::max(1.0, sv.size() > 0 ? sv(0) : 1.0));
  out.origin = svd.solve(rhs);
  out.equality_residual = (a * out.origin - rhs).cwiseAbs().maxCoeff();
  out.inconsistent_equalities = out.equality_residual > 1e-9 * (1.0 + rhs.cwiseAbs().maxCoeff());
  out.reduced = n - rank;
  out.basis = svd.matrixV().rightCols(out.reduced);

  for (auto& b : raw) {
    Block reduced;
    reduced.name = b.name;
    reduced.constant = b.constant;
    for (const auto& t : b.terms) reduced.constant += out.origin(t.var) * t.coeff;
    for (int j = 0; j < out.reduced; ++j) {
      RMatrix coeff = RMatrix::Zero(b.dim(), b.dim());
      for (const auto& t : b.terms) coeff += out.basis(t.var, j) * t.coeff;
      if (coeff.cwiseAbs().maxCoeff() <= 1e-14) continue;
      reduced.terms.push_back({j, std::move(coeff)});
    }
    out.blocks.push_back(std::move(reduced));
  }
  return out;
}

/// -tau * (linear . v) ... barrier over blocks plus the radius ball, in the
/// coordinates v = (y) or v = (y, s) for phase I.
class Barrier {
 public:
  Barrier(const Compiled& c, RVector linear, double radius, bool phase_one)
      : c_(c), linear_(std::move(linear)), radius_sq_(radius * radius), phase_one_(phase_one) {}

  int size() const { return c_.reduced + (phase_one_ ? 1 : 0); }
  int degree() const { return c_.degree() + 1; }

  RVector full_point(const RVector& v) const { return c_.origin + c_.basis * v.head(c_.reduced); }

  RMatrix block_value(const Block& b, const RVector& v) const {
    RMatrix s = b.constant;
    for (const auto& t : b.terms) s.noalias() += v(t.var) * t.coeff;
    if (phase_one_) s.diagonal().array() -= v(c_.reduced);
    return s;
  }

  /// Smallest eigenvalue over all blocks (phase-I slack excluded).
  double min_block_eigenvalue(const RVector& v) const {
    double lo = kInf;
    for (const auto& b : c_.blocks) {
      RMatrix s = b.constant;
      for (const auto& t : b.terms) s.noalias() += v(t.var) * t.coeff;
      Eigen::SelfAdjointEigenSolver<RMatrix> eig(s, Eigen::EigenvaluesOnly);
      lo = std::min(lo, eig.eigenvalues()(0));
    }
    return lo;
  }

  bool value(const RVector& v, double tau, double& f) const {
    f = tau * linear_.dot(v);
    for (const auto& b : c_.blocks) {
      Eigen::LLT<RMatrix> llt(block_value(b, v));
      if (llt.info() != Eigen::Success) return false;
      const RVector diag = llt.matrixLLT().diagonal();
      for (Eigen::Index i = 0; i < diag.size(); ++i) {
        if (!(diag(i) > 0.0)) return false;
        f -= 2.0 * std::log(diag(i));
      }
    }
    const RVector x = full_point(v);
    const double q = radius_sq_ - x.squaredNorm();
    if (!(q > 0.0)) return false;
    f -= std::log(q);
    return std::isfinite(f);
  }

  bool derivatives(const RVector& v, double tau, double& f, RVector& g, RMatrix& h) const {
    const int p = size();
    f = tau * linear_.dot(v);
    g = tau * linear_;
    h = RMatrix::Zero(p, p);

    std::vector<RMatrix> products;
    std::vector<int> vars;
    for (const auto& b : c_.blocks) {
      const int d = b.dim();
      Eigen::LLT<RMatrix> llt(block_value(b, v));
      if (llt.info() != Eigen::Success) return false;
      const RMatrix l = llt.matrixL();
      for (int i = 0; i < d; ++i) {
        if (!(l(i, i) > 0.0)) return false;
        f -= 2.0 * std::log(l(i, i));
      }
      const RMatrix inv = llt.solve(RMatrix::Identity(d, d));

      products.clear();
      vars.clear();
      for (const auto& t : b.terms) {
        products.push_back(inv * t.coeff);
        vars.push_back(t.var);
      }
      if (phase_one_) {
        products.push_back(-inv);
        vars.push_back(c_.reduced);
      }
      for (std::size_t i = 0; i < products.size(); ++i) {
        g(vars[i]) -= products[i].trace();
        for (std::size_t j = 0; j <= i; ++j) {
          const double hij = (products[i].array() * products[j].transpose().array()).sum();
          h(vars[i], vars[j]) += hij;
          if (i != j) h(vars[j], vars[i]) += hij;
        }
      }
    }

    const RVector x = full_point(v);
    const double q = radius_sq_ - x.squaredNorm();
    if (!(q > 0.0)) return false;
    f -= std::log(q);
    const RVector gx = c_.basis.transpose() * x;
    g.head(c_.reduced) += 2.0 * gx / q;
    h.topLeftCorner(c_.reduced, c_.reduced) +=
        2.0 * (c_.basis.transpose() * c_.basis) / q + 4.0 * (gx * gx.transpose()) / (q * q);
    return std::isfinite(f) && g.allFinite() && h.allFinite();
  }

 private:
  const Compiled& c_;
  RVector linear_;
  double radius_sq_;
  bool phase_one_;
};

struct NewtonResult {
  bool ok = true;
  bool centered = false;
  double decrement_sq = 0.0;
  double step = 0.0;
  std::string failure;
};

/// One damped Newton step on the barrier at fixed tau.
NewtonResult newton_step(const Barrier& barrier, RVector& v, double tau) {
  NewtonResult r;
  double f = 0.0;
  RVector g;
  RMatrix h;
  if (!barrier.derivatives(v, tau, f, g, h)) {
    r.ok = false;
    r.failure = "barrier evaluation failed at the current iterate";
    return r;
  }
  Eigen::LDLT<RMatrix> ldlt(h);
  RVector d = ldlt.solve(-g);
  if (ldlt.info() != Eigen::Success || !d.allFinite() || g.dot(d) >= 0.0) {
    // Regularize an ill-conditioned Hessian and retry once.
    const double shift = 1e-12 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
    Eigen::LDLT<RMatrix> reg(h + shift * RMatrix::Identity(h.rows(), h.cols()));
    d = reg.solve(-g);
    if (!d.allFinite() || g.dot(d) >= 0.0) {
      r.ok = false;
      r.failure = "Newton system is singular";
      return r;
    }
  }
  r.decrement_sq = -g.dot(d);
  if (r.decrement_sq <= 1e-7) {
    r.centered = true;
    return r;
  }

  double alpha = 1.0;
  double f_new = 0.0;
  const double slope = g.dot(d);
  int halvings = 0;
  // At large tau the barrier value carries rounding noise of order eps*|f|;
  // decreases below that level cannot be resolved.
  const double noise = 64.0 * std::numeric_limits<double>::epsilon() * std::abs(f);
  while (true) {
    const RVector trial = v + alpha * d;
    if (barrier.value(trial, tau, f_new) && f_new <= f + 0.25 * alpha * slope + noise) {
      v = trial;
      break;
    }
    alpha *= 0.5;
    if (++halvings > 60) {
      // Numerically converged even though the decrement estimate says otherwise.
      r.centered = r.decrement_sq < 1e-6;
      if (!r.centered) {
        r.ok = false;
        r.failure = "line search failed";
      }
      return r;
    }
  }
  r.step = alpha;
  // A damped step with a tiny decrement means the iterate is as centered as
  // the arithmetic allows.
  if (alpha < 1.0 && r.decrement_sq < 1e-6) r.centered = true;
  return r;
}

void trace_header(std::ostream* os) {
  if (os) *os << "iteration,tau,slack,barrier,decrement,step\n";
}

void trace_row(std::ostream* os, int it, double tau, double slack, const Barrier& b, const RVector& v,
               const NewtonResult& nr) {
  if (!os) return;
  double f = 0.0;
  b.value(v, tau, f);
  *os << it << ',' << tau << ',' << slack << ',' << f << ',' << std::sqrt(nr.decrement_sq) << ',' << nr.step
      << '\n';
}

}  // namespace

const char* to_string(FeasibilityStatus status) noexcept {
  switch (status) {
    case FeasibilityStatus::StrictlyFeasible:
      return "strictly_feasible";
    case FeasibilityStatus::Infeasible:
      return "infeasible";
    case FeasibilityStatus::Marginal:
      return "marginal";
  }
  return "unknown";
}

FeasibilityReport solve_feasibility(const LmiProblem& problem, const FeasibilityOptions& options) {
  if (!(options.feas_tol > 0.0 && options.feas_tol <= 1e-3)) {
    throw DomainError("solve_feasibility: feas_tol must lie in (0, 1e-3]");
  }
  FeasibilityReport report;
  const Compiled compiled = compile(problem);
  if (compiled.inconsistent_equalities) {
    report.status = FeasibilityStatus::Infeasible;
    std::ostringstream os;
    os << "equality constraints are inconsistent (residual " << compiled.equality_residual << ")";
    report.diagnostic = os.str();
    report.slack = report.slack_upper_bound = -kInf;
    return report;
  }
  if (compiled.origin.norm() >= options.radius) {
    report.status = FeasibilityStatus::Marginal;
    report.diagnostic = "equality-constrained origin lies outside the search radius";
    return report;
  }

  const int p = compiled.reduced + 1;
  RVector linear = RVector::Zero(p);
  linear(compiled.reduced) = -1.0;  // maximize s
  const Barrier barrier(compiled, linear, options.radius, true);
  const int degree = barrier.degree();

  RVector v = RVector::Zero(p);
  const double start_eig = compiled.blocks.empty() ? 0.0 : barrier.min_block_eigenvalue(v);
  if (compiled.blocks.empty()) {
    // Only equalities: any consistent point is strictly feasible.
    report.status = FeasibilityStatus::StrictlyFeasible;
    report.witness = problem.assignment(barrier.full_point(v));
    report.slack = report.slack_upper_bound = kInf;
    return report;
  }
  v(compiled.reduced) = start_eig - std::max(1.0, std::abs(start_eig));

  auto finish = [&](FeasibilityStatus status, std::string diagnostic, bool breakdown = false) {
    report.status = status;
    report.breakdown = breakdown;
    report.slack = v(compiled.reduced);
    report.diagnostic = std::move(diagnostic);
    if (status != FeasibilityStatus::Infeasible) {
      report.witness = problem.assignment(barrier.full_point(v));
      report.max_violation = max_violation(evaluate_constraints(problem, *report.witness));
    }
    return report;
  };

  trace_header(options.trace);
  double tau = 1.0;
  constexpr double kGrowth = 10.0;
  report.slack_upper_bound = kInf;
  while (true) {
    // Centering at this tau.
    while (true) {
      if (report.iterations >= options.max_iterations) {
        return finish(FeasibilityStatus::Marginal, "iteration cap reached", true);
      }
      const NewtonResult nr = newton_step(barrier, v, tau);
      ++report.iterations;
      trace_row(options.trace, report.iterations, tau, v(compiled.reduced), barrier, v, nr);
      if (!nr.ok) return finish(FeasibilityStatus::Marginal, nr.failure, true);
      if (options.stop_at_first_feasible && v(compiled.reduced) > options.feas_tol) {
        return finish(FeasibilityStatus::StrictlyFeasible, "");
      }
      if (nr.centered) break;
    }
    const double s = v(compiled.reduced);
    const double upper = s + degree / tau;
    report.slack_upper_bound = std::min(report.slack_upper_bound, upper);

    if (options.stop_at_first_feasible) {
      if (upper < -options.feas_tol) return finish(FeasibilityStatus::Infeasible, "");
      if (upper <= options.feas_tol && s >= -options.feas_tol) {
        return finish(FeasibilityStatus::Marginal, "optimal slack within the feasibility tolerance band");
      }
    } else if (degree / tau < 1e-3 * options.feas_tol) {
      if (s > options.feas_tol) return finish(FeasibilityStatus::StrictlyFeasible, "");
      if (upper < -options.feas_tol) return finish(FeasibilityStatus::Infeasible, "");
      return finish(FeasibilityStatus::Marginal, "optimal slack within the feasibility tolerance band");
    }
    tau *= kGrowth;
  }
}

MinimizeReport minimize(const LmiProblem& problem, const LmiProblem::ScalarMap& objective,
                        const Assignment& start, const MinimizeOptions& options) {
  MinimizeReport report;
  const Compiled compiled = compile(problem);
  if (compiled.inconsistent_equalities) {
    report.diagnostic = "equality constraints are inconsistent";
    return report;
  }
  const int n = compiled.full;

  // Objective gradient in full coordinates, then in reduced ones.
  RVector probe = RVector::Zero(n);
  const double f0 = objective(problem.assignment(probe));
  RVector grad(n);
  for (int i = 0; i < n; ++i) {
    probe.setZero();
    probe(i) = 1.0;
    grad(i) = objective(problem.assignment(probe)) - f0;
  }
  const RVector linear = compiled.basis.transpose() * grad;
  const Barrier barrier(compiled, linear, options.radius, false);
  const int degree = barrier.degree();

  RVector v = compiled.basis.transpose() * (start.values() - compiled.origin);
  double f = 0.0;
  if (!barrier.value(v, 1.0, f)) {
    report.diagnostic = "starting point is not strictly feasible";
    return report;
  }

  trace_header(options.trace);
  double tau = std::max(1.0, degree / std::max(1.0, std::abs(linear.dot(v))));
  constexpr double kGrowth = 10.0;
  constexpr int kCenteringCap = 50;
  while (true) {
    for (int steps = 0;; ++steps) {
      if (steps >= kCenteringCap && report.iterations > 0) {
        // Rounding noise dominates the Newton decrement at this tau; the
        // previous center is as accurate as the arithmetic supports.
        std::ostringstream os;
        os << "centering stalled at gap bound " << degree / tau;
        report.diagnostic = os.str();
        report.solution = problem.assignment(barrier.full_point(v));
        report.objective = objective(*report.solution);
        report.gap_bound = degree / tau;
        return report;
      }
      if (report.iterations >= options.max_iterations) {
        report.diagnostic = "iteration cap reached";
        report.solution = problem.assignment(barrier.full_point(v));
        report.objective = objective(*report.solution);
        report.gap_bound = degree / tau;
        return report;
      }
      const NewtonResult nr = newton_step(barrier, v, tau);
      ++report.iterations;
      trace_row(options.trace, report.iterations, tau, 0.0, barrier, v, nr);
      if (!nr.ok) {
        report.diagnostic = nr.failure;
        report.solution = problem.assignment(barrier.full_point(v));
        report.objective = objective(*report.solution);
        report.gap_bound = degree / tau;
        return report;
      }
      if (nr.centered) break;
    }
    report.gap_bound = degree / tau;
    if (report.gap_bound < options.gap_tol) break;
    tau *= kGrowth;
  }
  report.converged = true;
  report.solution = problem.assignment(barrier.full_point(v));
  report.objective = objective(*report.solution);
  return report;
}

}  // namespace secrelay
