#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "secrelay/hermitian.hpp"

namespace secrelay {

struct MatrixVar {
  int id = -1;
};
struct ScalarVar {
  int id = -1;
};

enum class ScalarKind { Nonnegative, Free };

/// Maps named variables onto one flat real coordinate vector. A Hermitian
/// n x n variable takes n^2 coordinates: the diagonal, then (Re, Im) of each
/// strictly-upper entry in row-major order.
struct VariableLayout {
  struct MatrixSlot {
    std::string name;
    int dim = 0;
    int offset = 0;
  };
  struct ScalarSlot {
    std::string name;
    ScalarKind kind = ScalarKind::Nonnegative;
    int offset = 0;
  };
  std::vector<MatrixSlot> matrices;
  std::vector<ScalarSlot> scalars;
  int size = 0;
};

/// A point in variable space, readable through the typed handles.
class Assignment {
 public:
  Assignment(std::shared_ptr<const VariableLayout> layout, RVector values);

  CMatrix matrix(MatrixVar v) const;
  HermitianMatrix hermitian(MatrixVar v) const { return HermitianMatrix(matrix(v)); }
  double scalar(ScalarVar v) const;
  const RVector& values() const noexcept { return values_; }
  const VariableLayout& layout() const noexcept { return *layout_; }

 private:
  std::shared_ptr<const VariableLayout> layout_;
  RVector values_;
};

/// A problem of affine matrix inequalities over Hermitian PSD matrix variables
/// and real scalars. Constraint maps are closures over an Assignment; they must
/// be affine in the variables (checked when the problem is compiled).
class LmiProblem {
 public:
  using MatrixMap = std::function<CMatrix(const Assignment&)>;
  using ScalarMap = std::function<double(const Assignment&)>;

  enum class Kind { Psd, LessEqualZero, EqualZero };

  struct Constraint {
    std::string name;
    Kind kind;
    int dim;           // matrix dimension for Psd, 1 otherwise
    MatrixMap matrix;  // Psd
    ScalarMap scalar;  // LessEqualZero / EqualZero
  };

  LmiProblem();

  /// Declares X (dim x dim, Hermitian) with the implied constraint X >= 0.
  MatrixVar add_psd_variable(std::string name, int dim);
  /// Declares a real scalar; Nonnegative implies x >= 0.
  ScalarVar add_scalar_variable(std::string name, ScalarKind kind = ScalarKind::Nonnegative);

  /// map(x) must be positive semidefinite.
  void add_psd_constraint(std::string name, int dim, MatrixMap map);
  /// map(x) <= 0.
  void add_inequality(std::string name, ScalarMap map);
  /// map(x) == 0.
  void add_equality(std::string name, ScalarMap map);

  const VariableLayout& layout() const noexcept { return *layout_; }
  std::shared_ptr<const VariableLayout> shared_layout() const noexcept { return layout_; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  int variable_count() const noexcept { return layout_->size; }

  Assignment assignment(RVector values) const;
  Assignment zero() const;

  /// Variable-implied PSD / sign constraints followed by the explicit ones.
  std::vector<Constraint> all_constraints() const;

 private:
  std::shared_ptr<VariableLayout> layout_;
  std::vector<Constraint> constraints_;
};

struct ConstraintResidual {
  std::string name;
  /// Amount by which the constraint fails (0 when satisfied): -lambda_min for
  /// PSD blocks, max(0, f) for f <= 0, |f| for equalities.
  double violation = 0.0;
  /// lambda_min for PSD blocks, -f for inequalities, -|f| for equalities.
  double slack = 0.0;
};

/// Direct evaluation of every constraint (including variable-implied ones)
/// at `x`, independent of the solver's compiled coefficients.
std::vector<ConstraintResidual> evaluate_constraints(const LmiProblem& problem, const Assignment& x);
double max_violation(const std::vector<ConstraintResidual>& residuals);

}  // namespace secrelay
