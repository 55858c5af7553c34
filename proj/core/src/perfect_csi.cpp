#include "secrelay/perfect_csi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rate_bisection.hpp"
#include "secrelay/errors.hpp"
#include "secrelay/parallel.hpp"

namespace secrelay {

PerfectInstance PerfectInstance::make(const ChannelSet& channels, const PowerConfig& power, const MiEvaluator& mi,
                                      double R0, bool use_an) {
  if (!(R0 >= 0.0)) throw DomainError("PerfectInstance: R0 must be nonnegative");
  PerfectInstance inst;
  inst.bounds = scalar_bounds_perfect(channels, power);
  inst.h = channels.h;
  inst.z = channels.z;
  inst.N0 = power.N0;
  inst.Pr_max = power.Pr_max;
  inst.rho_eav_cap = mi.inverse(2.0 * R0);
  inst.R0 = R0;
  inst.Ps = power.Ps;
  inst.use_an = use_an;
  return inst;
}

bool PerfectInstance::apriori_infeasible() const {
  return std::any_of(bounds.b.begin(), bounds.b.end(), [this](double b) { return b > rho_eav_cap; });
}

LmiProblem build_feasibility(const PerfectInstance& inst, double t, PerfectVariables* vars) {
  if (!(t >= 0.0)) throw DomainError("build_feasibility: t must be nonnegative");
  const int n = static_cast<int>(inst.h.size());
  LmiProblem p;
  const MatrixVar phi = p.add_psd_variable("Phi", n);
  const MatrixVar psi = inst.use_an ? p.add_psd_variable("Psi", n) : MatrixVar{};
  if (vars) *vars = {phi, psi};

  const double a = inst.bounds.a;
  const double c = inst.bounds.c;
  const double N0 = inst.N0;
  const CVector h = inst.h;
  // N0 + row Psi row^*, with Psi = 0 when AN is off.
  auto noise = [psi, N0](const CVector& row, const Assignment& x) {
    return psi.id >= 0 ? N0 + quad_form(row, x.matrix(psi)) : N0;
  };

  p.add_inequality("destination", [=](const Assignment& x) {
    return (t - a) * noise(h, x) - quad_form(h, x.matrix(phi));
  });
  if (std::isfinite(inst.rho_eav_cap)) {
    for (std::size_t j = 0; j < inst.z.size(); ++j) {
      const CVector z = inst.z[j];
      const double margin = inst.rho_eav_cap - inst.bounds.b[j];
      p.add_inequality("eavesdropper " + std::to_string(j + 1), [=](const Assignment& x) {
        return quad_form(z, x.matrix(phi)) - margin * noise(z, x);
      });
    }
  }
  p.add_inequality("decodability", [=](const Assignment& x) {
    return quad_form(h, x.matrix(phi)) - (c - a) * noise(h, x);
  });
  const double budget = inst.Pr_max;
  p.add_inequality("relay power", [phi, psi, budget](const Assignment& x) {
    double used = x.matrix(phi).trace().real();
    if (psi.id >= 0) used += x.matrix(psi).trace().real();
    return used - budget;
  });
  return p;
}

SolveOutcome solve_rate(const PerfectInstance& inst, const MiEvaluator& mi, const SolverSettings& settings) {
  SolveOutcome out;
  out.R0 = inst.R0;
  out.Ps = inst.Ps;
  const auto n = static_cast<Eigen::Index>(inst.h.size());
  auto zero_rate = [&](SolveStatus status) {
    out.status = status;
    out.Phi = HermitianMatrix::zero(n);
    out.Psi = HermitianMatrix::zero(n);
    out.phi = CVector::Zero(n);
    return out;
  };
  if (inst.apriori_infeasible()) return zero_rate(SolveStatus::EavDirectLinkExceedsR0);
  if (inst.bounds.c <= inst.bounds.a) return zero_rate(SolveStatus::DirectLinkDominates);

  const detail::LevelProblem build = [&inst](double t, MatrixVar& phi, MatrixVar& psi) {
    PerfectVariables vars;
    LmiProblem p = build_feasibility(inst, t, &vars);
    phi = vars.Phi;
    psi = vars.Psi;
    return p;
  };
  detail::solve_level(build, inst.bounds.c, mi, settings, SolveStatus::EavDirectLinkExceedsR0, out);
  return out;
}

PerfectSweep sweep_R0(const Scenario& scenario, const MiEvaluator& mi, int L, bool use_an, int threads) {
  if (L < 10) throw DomainError("sweep_R0: L must be at least 10");
  const PowerConfig& power = scenario.power;
  const int K = std::max(1, scenario.solver.grid_K);

  PerfectSweep sweep;
  sweep.use_an = use_an;
  sweep.R_D = mi.half_rate(power.Ps_max * scenario.channels.g.squaredNorm() / power.N0);
  sweep.delta = sweep.R_D / L;
  sweep.points.resize(static_cast<std::size_t>(L) + 1);

  std::vector<double> source_powers;
  if (K == 1) {
    source_powers.push_back(power.Ps);
  } else {
    for (int k = 1; k <= K; ++k) source_powers.push_back(k * power.Ps_max / K);
  }

  parallel_for(sweep.points.size(), threads, [&](std::size_t l) {
    const double R0 = static_cast<double>(l) * sweep.delta;
    SolveOutcome best;
    bool have = false;
    for (double Ps : source_powers) {
      PowerConfig pw = power;
      pw.Ps = Ps;
      SolveOutcome o;
      try {
        o = solve_rate(PerfectInstance::make(scenario.channels, pw, mi, R0, use_an), mi, scenario.solver);
      } catch (const NumericError& e) {
        // Recorded per point; the rest of the sweep still runs.
        o.R0 = R0;
        o.Ps = Ps;
        o.status = SolveStatus::SolverFailure;
        o.diagnostic = e.what();
      }
      if (!have || o.secrecy_rate > best.secrecy_rate) {
        best = std::move(o);
        have = true;
      }
    }
    sweep.points[l] = std::move(best);
  });

  for (std::size_t l = 1; l < sweep.points.size(); ++l) {
    if (sweep.points[l].secrecy_rate > sweep.points[sweep.argmax].secrecy_rate) sweep.argmax = l;
  }
  return sweep;
}

KktReport verify_kkt(const SolveOutcome& outcome, const PerfectInstance& inst, double tol) {
  KktReport r;
  const CMatrix& Phi = outcome.Phi.matrix();
  const CMatrix& Psi = outcome.Psi.matrix();
  const double a = inst.bounds.a;
  const double dest_noise = inst.N0 + quad_form(inst.h, Psi);
  const double dest_signal = quad_form(inst.h, Phi);

  r.destination_residual = (outcome.t_max - a) * dest_noise - dest_signal;
  r.decodability_slack = (inst.bounds.c - a) * dest_noise - dest_signal;

  bool eavesdropper_active = false;
  if (std::isfinite(inst.rho_eav_cap)) {
    for (std::size_t j = 0; j < inst.z.size(); ++j) {
      const double slack = (inst.rho_eav_cap - inst.bounds.b[j]) * (inst.N0 + quad_form(inst.z[j], Psi)) -
                           quad_form(inst.z[j], Phi);
      if (slack <= tol) eavesdropper_active = true;
    }
  }
  r.saturation_expected = r.decodability_slack > tol && (inst.use_an || !eavesdropper_active);
  r.power_residual = inst.Pr_max - outcome.power_used;
  r.t_exceeds_a = outcome.Phi.trace() <= tol || outcome.t_max > a;

  r.passed = std::abs(r.destination_residual) <= tol && r.t_exceeds_a &&
             (!r.saturation_expected || std::abs(r.power_residual) <= tol);
  return r;
}

}  // namespace secrelay
