#include "secrelay/lmi.hpp"

#include <algorithm>
#include <stdexcept>

#include "secrelay/errors.hpp"

namespace secrelay {

Assignment::Assignment(std::shared_ptr<const VariableLayout> layout, RVector values)
    : layout_(std::move(layout)), values_(std::move(values)) {
  if (values_.size() != layout_->size) throw DomainError("Assignment: value count does not match layout");
}

CMatrix Assignment::matrix(MatrixVar v) const {
  const auto& slot = layout_->matrices.at(static_cast<std::size_t>(v.id));
  const int n = slot.dim;
  CMatrix m(n, n);
  int k = slot.offset;
  for (int i = 0; i < n; ++i) m(i, i) = Complex(values_(k++), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Complex entry(values_(k), values_(k + 1));
      k += 2;
      m(i, j) = entry;
      m(j, i) = std::conj(entry);
    }
  }
  return m;
}

double Assignment::scalar(ScalarVar v) const {
  return values_(layout_->scalars.at(static_cast<std::size_t>(v.id)).offset);
}

LmiProblem::LmiProblem() : layout_(std::make_shared<VariableLayout>()) {}

MatrixVar LmiProblem::add_psd_variable(std::string name, int dim) {
  if (dim < 1) throw DomainError("add_psd_variable: dimension must be positive");
  layout_->matrices.push_back({std::move(name), dim, layout_->size});
  layout_->size += dim * dim;
  return MatrixVar{static_cast<int>(layout_->matrices.size()) - 1};
}

ScalarVar LmiProblem::add_scalar_variable(std::string name, ScalarKind kind) {
  layout_->scalars.push_back({std::move(name), kind, layout_->size});
  layout_->size += 1;
  return ScalarVar{static_cast<int>(layout_->scalars.size()) - 1};
}

void LmiProblem::add_psd_constraint(std::string name, int dim, MatrixMap map) {
  constraints_.push_back({std::move(name), Kind::Psd, dim, std::move(map), {}});
}

void LmiProblem::add_inequality(std::string name, ScalarMap map) {
  constraints_.push_back({std::move(name), Kind::LessEqualZero, 1, {}, std::move(map)});
}

void LmiProblem::add_equality(std::string name, ScalarMap map) {
  constraints_.push_back({std::move(name), Kind::EqualZero, 1, {}, std::move(map)});
}

Assignment LmiProblem::assignment(RVector values) const { return Assignment(layout_, std::move(values)); }

Assignment LmiProblem::zero() const { return Assignment(layout_, RVector::Zero(layout_->size)); }

std::vector<LmiProblem::Constraint> LmiProblem::all_constraints() const {
  std::vector<Constraint> out;
  for (std::size_t i = 0; i < layout_->matrices.size(); ++i) {
    const MatrixVar var{static_cast<int>(i)};
    const auto& slot = layout_->matrices[i];
    out.push_back({slot.name + " >= 0", Kind::Psd, slot.dim,
                   [var](const Assignment& x) { return x.matrix(var); }, {}});
  }
  for (std::size_t i = 0; i < layout_->scalars.size(); ++i) {
    const auto& slot = layout_->scalars[i];
    if (slot.kind != ScalarKind::Nonnegative) continue;
    const ScalarVar var{static_cast<int>(i)};
    out.push_back({slot.name + " >= 0", Kind::LessEqualZero, 1, {},
                   [var](const Assignment& x) { return -x.scalar(var); }});
  }
  out.insert(out.end(), constraints_.begin(), constraints_.end());
  return out;
}

std::vector<ConstraintResidual> evaluate_constraints(const LmiProblem& problem, const Assignment& x) {
  std::vector<ConstraintResidual> out;
  for (const auto& c : problem.all_constraints()) {
    ConstraintResidual r;
    r.name = c.name;
    switch (c.kind) {
      case LmiProblem::Kind::Psd: {
        const CMatrix m = c.matrix(x);
        const CMatrix sym = 0.5 * (m + m.adjoint());
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(sym, Eigen::EigenvaluesOnly);
        r.slack = eig.eigenvalues()(0);
        r.violation = std::max(0.0, -r.slack);
        break;
      }
      case LmiProblem::Kind::LessEqualZero: {
        const double f = c.scalar(x);
        r.slack = -f;
        r.violation = std::max(0.0, f);
        break;
      }
      case LmiProblem::Kind::EqualZero: {
        const double f = c.scalar(x);
        r.slack = -std::abs(f);
        r.violation = std::abs(f);
        break;
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

double max_violation(const std::vector<ConstraintResidual>& residuals) {
  double worst = 0.0;
  for (const auto& r : residuals) worst = std::max(worst, r.violation);
  return worst;
}

}  // namespace secrelay
