#include "secrelay/robust_csi.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rate_bisection.hpp"
#include "secrelay/errors.hpp"

namespace secrelay {

RobustInstance RobustInstance::make(const ChannelSet& estimates, const UncertaintyRadii& radii,
                                    const PowerConfig& power, const MiEvaluator& mi, double R0, bool use_an) {
  if (!(R0 >= 0.0)) throw DomainError("RobustInstance: R0 must be nonnegative");
  radii.validate(estimates.eavesdroppers());
  RobustInstance inst;
  inst.estimates = estimates;
  inst.radii = radii;
  inst.bounds = scalar_bounds_robust(estimates, radii, power);
  inst.N0 = power.N0;
  inst.Pr_max = power.Pr_max;
  inst.rho_eav_cap = mi.inverse(2.0 * R0);
  inst.R0 = R0;
  inst.Ps = power.Ps;
  inst.use_an = use_an;
  return inst;
}

bool RobustInstance::apriori_infeasible() const {
  return std::any_of(bounds.b.begin(), bounds.b.end(), [this](double b) { return b > rho_eav_cap; });
}

std::string SProcedureBlock::name() const {
  switch (which) {
    case Which::A1:
      return "A1";
    case Which::A2:
      return "A2";
    case Which::A3:
      return "A3";
    case Which::A4:
      return "A4";
    case Which::B1:
      return "B1_" + std::to_string(eavesdropper + 1);
    case Which::B2:
      return "B2_" + std::to_string(eavesdropper + 1);
  }
  return "?";
}

CMatrix s_procedure_matrix(const CMatrix& Q, const CVector& row, double corner, double multiplier, double eps) {
  const Eigen::Index n = Q.rows();
  CMatrix m(n + 1, n + 1);
  const CVector col = Q * row.conjugate();
  m.topLeftCorner(n, n) = Q + multiplier * CMatrix::Identity(n, n);
  m.topRightCorner(n, 1) = col;
  m.bottomLeftCorner(1, n) = col.adjoint();
  m(n, n) = corner + (row.transpose() * col)(0).real() - multiplier * eps * eps;
  return m;
}

LmiProblem build_robust_feasibility(const RobustInstance& inst, double r, RobustVariables* out_vars) {
  if (!(r >= 0.0)) throw DomainError("build_robust_feasibility: r must be nonnegative");
  const int n = inst.estimates.relay_antennas();
  const int J = inst.estimates.eavesdroppers();
  const bool cap_finite = std::isfinite(inst.rho_eav_cap);

  LmiProblem p;
  RobustVariables v;
  v.Phi = p.add_psd_variable("Phi", n);
  v.Psi = inst.use_an ? p.add_psd_variable("Psi", n) : MatrixVar{};
  v.r1 = p.add_scalar_variable("r1", ScalarKind::Nonnegative);
  v.r2 = p.add_scalar_variable("r2", ScalarKind::Free);
  v.r3 = p.add_scalar_variable("r3", ScalarKind::Free);
  v.r4 = p.add_scalar_variable("r4", ScalarKind::Nonnegative);

  const MatrixVar phi = v.Phi;
  const MatrixVar psi = v.Psi;
  auto Psi = [psi, n](const Assignment& x) -> CMatrix {
    return psi.id >= 0 ? x.matrix(psi) : CMatrix::Zero(n, n);
  };
  using Form = std::function<CMatrix(const Assignment&)>;
  using Corner = std::function<double(const Assignment&)>;
  using W = SProcedureBlock::Which;

  // corner(x) + (row+e) Q(x) (row+e)^* >= 0 for all ||e|| <= eps. A zero
  // radius leaves only e = 0, where the multiplier would have to grow without
  // bound; the nominal scalar inequality is the exact equivalent.
  auto add_block = [&](W which, int j, const std::string& multiplier, const CVector& row, double eps, Form Q,
                       Corner corner) -> ScalarVar {
    SProcedureBlock block{which, j, multiplier, eps == 0.0};
    const std::string name = block.name();
    v.blocks.push_back(block);
    if (eps == 0.0) {
      p.add_inequality(name, [row, Q, corner](const Assignment& x) { return -(corner(x) + quad_form(row, Q(x))); });
      return ScalarVar{};
    }
    const ScalarVar m = p.add_scalar_variable(multiplier);
    p.add_psd_constraint(name, n + 1, [row, eps, Q, corner, m](const Assignment& x) {
      return s_procedure_matrix(Q(x), row, corner(x), x.scalar(m), eps);
    });
    return m;
  };

  const double a = inst.bounds.a;
  const double N0 = inst.N0;
  const double eps_h = inst.radii.eps_h;
  const CVector h = inst.estimates.h;
  const ScalarVar r1 = v.r1, r2 = v.r2, r3 = v.r3, r4 = v.r4;

  const double budget = inst.Pr_max;
  p.add_inequality("relay power", [phi, Psi, budget](const Assignment& x) {
    return x.matrix(phi).trace().real() + Psi(x).trace().real() - budget;
  });
  p.add_inequality("r r2 - r1", [r, r1, r2](const Assignment& x) { return r * x.scalar(r2) - x.scalar(r1); });
  const double margin = inst.bounds.c - inst.bounds.a_max;
  p.add_inequality("r3 - (c - a_max) r4",
                   [margin, r3, r4](const Assignment& x) { return x.scalar(r3) - margin * x.scalar(r4); });

  // Worst-case destination numerator >= r1.
  v.lambda1 = add_block(
      W::A1, -1, "lambda1", h, eps_h, [=](const Assignment& x) -> CMatrix { return a * Psi(x) + x.matrix(phi); },
      [=](const Assignment& x) { return a * N0 - x.scalar(r1); });
  // Worst-case destination denominator <= r2.
  v.lambda2 = add_block(
      W::A2, -1, "lambda2", h, eps_h, [=](const Assignment& x) -> CMatrix { return -Psi(x); },
      [=](const Assignment& x) { return -N0 + x.scalar(r2); });
  // Worst-case relay signal at the destination <= r3.
  v.lambda3 = add_block(
      W::A3, -1, "lambda3", h, eps_h, [=](const Assignment& x) -> CMatrix { return -x.matrix(phi); },
      [=](const Assignment& x) { return x.scalar(r3); });
  // Worst-case destination noise >= r4.
  v.lambda4 = add_block(
      W::A4, -1, "lambda4", h, eps_h, [=](const Assignment& x) -> CMatrix { return Psi(x); },
      [=](const Assignment& x) { return N0 - x.scalar(r4); });

  if (cap_finite) {
    const double cap = inst.rho_eav_cap;
    for (int j = 0; j < J; ++j) {
      const auto idx = static_cast<std::size_t>(j);
      const std::string k = std::to_string(j + 1);
      const CVector z = inst.estimates.z[idx];
      const double b = inst.bounds.b[idx];
      const double eps_z = inst.radii.eps_z[idx];
      const ScalarVar s1 = p.add_scalar_variable("s1_" + k, ScalarKind::Free);
      const ScalarVar s2 = p.add_scalar_variable("s2_" + k, ScalarKind::Nonnegative);
      v.s1.push_back(s1);
      v.s2.push_back(s2);
      p.add_inequality("s1_" + k + " - s2_" + k + " cap",
                       [s1, s2, cap](const Assignment& x) { return x.scalar(s1) - x.scalar(s2) * cap; });
      // Worst-case eavesdropper numerator <= s1j.
      v.mu1.push_back(add_block(
          W::B1, j, "mu1_" + k, z, eps_z,
          [=](const Assignment& x) -> CMatrix { return -(b * Psi(x) + x.matrix(phi)); },
          [=](const Assignment& x) { return -b * N0 + x.scalar(s1); }));
      // Worst-case eavesdropper denominator >= s2j.
      v.mu2.push_back(add_block(
          W::B2, j, "mu2_" + k, z, eps_z, [=](const Assignment& x) -> CMatrix { return Psi(x); },
          [=](const Assignment& x) { return N0 - x.scalar(s2); }));
    }
  }

  if (out_vars) *out_vars = std::move(v);
  return p;
}

SolveOutcome solve_robust_rate(const RobustInstance& inst, const MiEvaluator& mi, const SolverSettings& settings) {
  SolveOutcome out;
  out.R0 = inst.R0;
  out.Ps = inst.Ps;
  const Eigen::Index n = inst.estimates.relay_antennas();
  auto zero_rate = [&](SolveStatus status) {
    out.status = status;
    out.Phi = HermitianMatrix::zero(n);
    out.Psi = HermitianMatrix::zero(n);
    out.phi = CVector::Zero(n);
    return out;
  };
  if (!(inst.bounds.c > 0.0)) return zero_rate(SolveStatus::RelayLinkUnusable);
  if (inst.apriori_infeasible()) return zero_rate(SolveStatus::RobustInfeasibleAtZero);
  if (inst.bounds.c <= inst.bounds.a_max) return zero_rate(SolveStatus::DirectLinkDominates);

  const detail::LevelProblem build = [&inst](double r, MatrixVar& phi, MatrixVar& psi) {
    RobustVariables vars;
    LmiProblem p = build_robust_feasibility(inst, r, &vars);
    phi = vars.Phi;
    psi = vars.Psi;
    return p;
  };
  detail::solve_level(build, inst.bounds.c, mi, settings, SolveStatus::RobustInfeasibleAtZero, out);
  return out;
}

}  // namespace secrelay
