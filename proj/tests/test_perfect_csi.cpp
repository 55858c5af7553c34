#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "secrelay/errors.hpp"
#include "secrelay/feasibility.hpp"
#include "secrelay/mutual_information.hpp"
#include "secrelay/perfect_csi.hpp"
#include "secrelay/scenario.hpp"

using namespace secrelay;

namespace {

const Scenario& bundled() {
  static const Scenario sc = load_scenario(std::string(SECRELAY_TEST_DATA) + "/scenario_sec5.json");
  return sc;
}

const MiEvaluator& bpsk() {
  static const MiEvaluator mi(Alphabet::bpsk());
  return mi;
}

PerfectInstance instance(int J, double R0, bool an) {
  const Scenario s = bundled().with_eavesdroppers(J);
  return PerfectInstance::make(s.channels, s.power, bpsk(), R0, an);
}

SolveOutcome solve(int J, double R0, bool an, double bisect_tol = 1e-6) {
  SolverSettings settings = bundled().solver;
  settings.bisect_tol = bisect_tol;
  return solve_rate(instance(J, R0, an), bpsk(), settings);
}

double destination_snr(const PerfectInstance& inst, const CVector& phi, const CMatrix& Psi) {
  const double signal = std::norm(inst.h.cwiseProduct(phi).sum());
  return inst.bounds.a + signal / (inst.N0 + quad_form(inst.h, Psi));
}

double eavesdropper_snr(const PerfectInstance& inst, std::size_t j, const CVector& phi, const CMatrix& Psi) {
  const double signal = std::norm(inst.z[j].cwiseProduct(phi).sum());
  return inst.bounds.b[j] + signal / (inst.N0 + quad_form(inst.z[j], Psi));
}

}  // namespace

TEST_CASE("level zero with a vacuous cap admits the zero beamformer") {
  const PerfectInstance inst = instance(3, 0.5, true);
  CHECK(std::isinf(inst.rho_eav_cap));
  const LmiProblem p = build_feasibility(inst, 0.0);
  CHECK(max_violation(evaluate_constraints(p, p.zero())) == 0.0);
  CHECK(solve_feasibility(p).feasible());
  for (const auto& c : p.constraints()) CHECK(c.name.find("eavesdropper") == std::string::npos);
}

TEST_CASE("level above c is infeasible") {
  PerfectInstance inst = instance(1, 0.5, true);
  inst.Pr_max = 1e3;
  CHECK_FALSE(solve_feasibility(build_feasibility(inst, inst.bounds.c + 1e-3)).feasible());
  CHECK(solve_feasibility(build_feasibility(inst, inst.bounds.c * (1 - 1e-3))).feasible());
}

TEST_CASE("no eavesdropper leakage and a large relay budget reach c") {
  Scenario s = bundled().with_eavesdroppers(1);
  s.channels.z0[0] = 0.0;
  s.channels.z[0].setZero();
  s.power.Pr_max = 1e3;
  const PerfectInstance inst = PerfectInstance::make(s.channels, s.power, bpsk(), 0.6, false);
  const SolveOutcome o = solve_rate(inst, bpsk(), s.solver);
  REQUIRE(o.status == SolveStatus::Ok);
  CHECK(std::abs(o.t_max - inst.bounds.c) <= 2e-6 * inst.bounds.c);
}

TEST_CASE("matched filter without eavesdropper constraints") {
  // With AN off and an infinite cap, t = a + P_R ||h||^2 / N0 until c binds.
  Scenario s = bundled().with_eavesdroppers(1);
  s.power.Pr_max = 2.0;
  const PerfectInstance inst = PerfectInstance::make(s.channels, s.power, bpsk(), 0.6, false);
  const double expect = std::min(inst.bounds.c, inst.bounds.a + s.power.Pr_max * inst.h.squaredNorm() / inst.N0);
  const SolveOutcome o = solve_rate(inst, bpsk(), s.solver);
  CHECK(o.t_max == doctest::Approx(expect).epsilon(2e-6));
  const CVector dir = inst.h.conjugate().normalized();
  CHECK(std::abs(std::abs(dir.dot(o.phi.normalized())) - 1.0) <= 1e-6);
}

TEST_CASE("section V values at R0 = 0.0810") {
  // Cross-checked against the beamformer search oracle (agreement ~1e-6).
  struct Row {
    int J;
    bool an;
    double t;
  };
  const Row rows[] = {{1, true, 3.5355105}, {2, true, 1.7362882}, {2, false, 0.7270319},
                      {3, true, 1.3267318}, {3, false, 0.6300710}};
  for (const auto& r : rows) {
    CAPTURE(r.J);
    CAPTURE(r.an);
    const SolveOutcome o = solve(r.J, 0.0810, r.an);
    REQUIRE(o.status == SolveStatus::Ok);
    CHECK(o.t_max == doctest::Approx(r.t).epsilon(2e-6));
    CHECK(o.rank_ratio <= 1e-6);
    CHECK(o.monotone_spot_check);
    CHECK(o.witness_violation <= 1e-7);
    CHECK(o.secrecy_rate == doctest::Approx(bpsk().half_rate(o.t_max) - 0.0810));
  }
}

TEST_CASE("J = 1 curves with and without AN coincide") {
  for (double R0 : {0.001445, 0.05, 0.2, 0.4}) {
    CAPTURE(R0);
    CHECK(std::abs(solve(1, R0, true).secrecy_rate - solve(1, R0, false).secrecy_rate) <= 1e-3);
  }
}

TEST_CASE("J = 2 with AN peaks near R0 = 0.080959") {
  const double peak = solve(2, 0.080959, true).secrecy_rate;
  CHECK(peak >= solve(2, 0.070, true).secrecy_rate);
  CHECK(peak >= solve(2, 0.092, true).secrecy_rate);
}

TEST_CASE("status taxonomy") {
  // b_1 = 3.4e-4 exceeds the cap when R0 is tiny.
  CHECK(solve(1, 1e-5, true).status == SolveStatus::EavDirectLinkExceedsR0);
  CHECK(solve(1, 1e-5, true).secrecy_rate == 0.0);
  CHECK(solve(1, 0.0, false).status == SolveStatus::EavDirectLinkExceedsR0);

  Scenario s = bundled().with_eavesdroppers(1);
  s.channels.g *= 0.1;  // c = 0.061 < a
  const SolveOutcome weak = solve_rate(PerfectInstance::make(s.channels, s.power, bpsk(), 0.1, true), bpsk(), s.solver);
  CHECK(weak.status == SolveStatus::DirectLinkDominates);
  CHECK(weak.t_max == 0.0);
  CHECK(weak.Phi.trace() == 0.0);

  CHECK_THROWS_AS(PerfectInstance::make(s.channels, s.power, bpsk(), -0.1, true), DomainError);
  CHECK_THROWS_AS(build_feasibility(instance(1, 0.1, true), -1.0), DomainError);
}

TEST_CASE("sweep grid") {
  const PerfectSweep sweep = sweep_R0(bundled().with_eavesdroppers(1), bpsk(), 10, true, 2);
  REQUIRE(sweep.points.size() == 11);
  CHECK(sweep.R_D == doctest::Approx(0.499505785244846).epsilon(1e-5));
  CHECK(sweep.delta == doctest::Approx(sweep.R_D / 10));
  for (std::size_t l = 1; l < sweep.points.size(); ++l) CHECK(sweep.points[l].R0 > sweep.points[l - 1].R0);
  CHECK(sweep.points.front().R0 == 0.0);
  CHECK(sweep.points.back().R0 == doctest::Approx(sweep.R_D));
  CHECK_THROWS_AS(sweep_R0(bundled(), bpsk(), 9, true), DomainError);
}

TEST_CASE("sweep results do not depend on the thread count") {
  const Scenario s = bundled().with_eavesdroppers(2);
  const PerfectSweep one = sweep_R0(s, bpsk(), 12, true, 1);
  const PerfectSweep four = sweep_R0(s, bpsk(), 12, true, 4);
  for (std::size_t l = 0; l < one.points.size(); ++l) {
    CHECK(one.points[l].t_max == four.points[l].t_max);
    CHECK(one.points[l].secrecy_rate == four.points[l].secrecy_rate);
  }
  CHECK(one.argmax == four.argmax);
}

TEST_CASE("source power grid takes the best Ps per point") {
  Scenario s = bundled().with_eavesdroppers(2);
  s.solver.grid_K = 4;
  const PerfectSweep grid = sweep_R0(s, bpsk(), 10, true);
  s.solver.grid_K = 1;
  const PerfectSweep fixed = sweep_R0(s, bpsk(), 10, true);
  for (std::size_t l = 0; l < grid.points.size(); ++l) {
    CHECK(grid.points[l].secrecy_rate >= fixed.points[l].secrecy_rate - 1e-9);
    CHECK(grid.points[l].Ps > 0.0);
    CHECK(grid.points[l].Ps <= s.power.Ps_max);
  }
}

TEST_CASE("rate invariants along coarse sweeps") {
  const double cap_rate = 0.5 * bpsk().alphabet().capacity_bits();
  for (int J : {1, 2, 3}) {
    const Scenario s = bundled().with_eavesdroppers(J);
    const PerfectSweep on = sweep_R0(s, bpsk(), 40, true, 2);
    const PerfectSweep off = sweep_R0(s, bpsk(), 40, false, 2);
    for (std::size_t l = 0; l < on.points.size(); ++l) {
      CAPTURE(J);
      CAPTURE(l);
      CHECK(on.points[l].secrecy_rate >= off.points[l].secrecy_rate - 1e-6);
      for (const PerfectSweep* sweep : {&on, &off}) {
        const SolveOutcome& p = sweep->points[l];
        CHECK(p.secrecy_rate >= 0.0);
        CHECK(p.secrecy_rate <= cap_rate);
        CHECK(bpsk().half_rate(p.t_max) <= 0.5 + 1e-6);
        if (p.status != SolveStatus::Ok) continue;
        CHECK(p.rank_ratio <= 1e-6);
        const PerfectInstance inst = PerfectInstance::make(s.channels, s.power, bpsk(), p.R0, sweep->use_an);
        const double dest = destination_snr(inst, p.phi, p.Psi.matrix());
        CHECK(dest >= p.t_max - 1e-4);
        CHECK(dest <= inst.bounds.c + 1e-6);
        for (std::size_t j = 0; j < inst.z.size(); ++j) {
          CHECK(eavesdropper_snr(inst, j, p.phi, p.Psi.matrix()) <= inst.rho_eav_cap + 1e-4);
        }
      }
    }
  }
}

TEST_CASE("saturation and linear fall") {
  const PerfectSweep sweep = sweep_R0(bundled().with_eavesdroppers(1), bpsk(), 100, true, 2);
  const std::size_t start = 3 * (sweep.points.size() - 1) / 4;
  for (std::size_t l = start + 1; l < sweep.points.size(); ++l) {
    const auto& p = sweep.points[l];
    const auto& q = sweep.points[l - 1];
    if (bpsk().half_rate(p.t_max) < 0.499 || bpsk().half_rate(q.t_max) < 0.499) continue;
    if (p.secrecy_rate == 0.0 || q.secrecy_rate == 0.0) continue;
    CHECK((p.secrecy_rate - q.secrecy_rate) / (p.R0 - q.R0) == doctest::Approx(-1.0).epsilon(0.05));
  }
}

TEST_CASE("null steering toward a single eavesdropper") {
  // With the cap just above b_1 the beam must sit in the null space of z_1,
  // and t_max approaches the projected matched-filter value.
  const PerfectInstance base = instance(1, 0.1, false);
  const CVector u = base.h.conjugate();
  const CVector w = base.z[0].conjugate();
  const CVector u_perp = u - w * (w.dot(u) / w.squaredNorm());
  const double t_null = base.bounds.a + base.Pr_max * u_perp.squaredNorm() / base.N0;

  for (double leak : {1e-4, 1e-6}) {
    CAPTURE(leak);
    const double R0 = 0.5 * bpsk().mutual_information(base.bounds.b[0] + leak);
    const PerfectInstance inst = instance(1, R0, false);
    const SolveOutcome o = solve_rate(inst, bpsk(), bundled().solver);
    REQUIRE(o.status == SolveStatus::Ok);
    const double slack = inst.rho_eav_cap - inst.bounds.b[0];
    const double relative = std::abs(inst.z[0].cwiseProduct(o.phi).sum()) / (inst.z[0].norm() * o.phi.norm());
    CHECK(relative <= std::sqrt(slack * inst.N0) / (inst.z[0].norm() * o.phi.norm()) + 1e-6);
    CHECK(o.t_max >= t_null - 1e-5);
    CHECK(o.t_max <= t_null + 50.0 * std::sqrt(leak));
  }
}

TEST_CASE("KKT conditions at the optimum") {
  for (int J : {1, 2, 3}) {
    for (bool an : {true, false}) {
      CAPTURE(J);
      CAPTURE(an);
      const PerfectInstance inst = instance(J, 0.0810, an);
      const SolveOutcome o = solve(J, 0.0810, an, 1e-10);
      REQUIRE(o.status == SolveStatus::Ok);
      const KktReport k = verify_kkt(o, inst, 1e-5);
      CHECK(std::abs(k.destination_residual) <= 1e-5);
      CHECK(k.t_exceeds_a);
      CHECK(o.t_max > inst.bounds.a);
      if (k.saturation_expected) CHECK(std::abs(o.power_used - inst.Pr_max) <= 1e-5);
      CHECK(k.passed);
    }
  }
}

TEST_CASE("KKT report flags a perturbed witness") {
  const PerfectInstance inst = instance(2, 0.0810, true);
  SolveOutcome o = solve(2, 0.0810, true, 1e-10);
  o.t_max *= 1.01;
  CHECK_FALSE(verify_kkt(o, inst, 1e-5).passed);
}
