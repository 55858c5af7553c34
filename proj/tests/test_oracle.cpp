#include <doctest.h>

#include <cmath>
#include <random>
#include <string>

#include "secrelay/errors.hpp"
#include "secrelay/mutual_information.hpp"
#include "secrelay/oracle.hpp"
#include "secrelay/perfect_csi.hpp"
#include "secrelay/robust_csi.hpp"
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

OracleConfig config(std::int64_t search = 20'000) {
  OracleConfig cfg;
  cfg.search_samples = search;
  return cfg;
}

CVector gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(n01(rng), n01(rng));
  return v;
}

}  // namespace

TEST_CASE("config validation") {
  OracleConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.error_samples = 999;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
}

TEST_CASE("Monte-Carlo MI") {
  OracleConfig cfg;
  const MonteCarloEstimate zero = mi_monte_carlo(Alphabet::bpsk(), 0.0, cfg);
  CHECK(std::abs(zero.estimate) <= 3 * zero.std_error + 1e-15);
  CHECK(zero.std_error <= 1e-3);
  CHECK(zero.samples == cfg.mc_samples);

  const MonteCarloEstimate high = mi_monte_carlo(Alphabet::bpsk(), 100.0, cfg);
  CHECK(std::abs(high.estimate - 1.0) <= 3 * high.std_error + 1e-12);

  for (double rho : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    CAPTURE(rho);
    const MonteCarloEstimate mc = mi_monte_carlo(Alphabet::bpsk(), rho, cfg);
    CHECK(std::abs(mc.estimate - bpsk().mutual_information(rho)) <= 3 * mc.std_error);
  }
  const MonteCarloEstimate qam = mi_monte_carlo(Alphabet::qam16(), 4.0, cfg);
  CHECK(std::abs(qam.estimate - MiEvaluator(Alphabet::qam16()).mutual_information(4.0)) <= 3 * qam.std_error);
  CHECK_THROWS_AS(mi_monte_carlo(Alphabet::bpsk(), -1.0, cfg), DomainError);
}

TEST_CASE("Monte-Carlo reference at rho = 1 with 1e7 draws") {
  OracleConfig cfg;
  cfg.mc_samples = 10'000'000;
  cfg.threads = 4;
  const MonteCarloEstimate mc = mi_monte_carlo(Alphabet::bpsk(), 1.0, cfg);
  CHECK(mc.estimate == doctest::Approx(0.721485499).epsilon(1e-9));
  CHECK(mc.std_error == doctest::Approx(2.308e-4).epsilon(1e-3));
  CHECK(std::abs(bpsk().mutual_information(1.0) - mc.estimate) <= 3 * mc.std_error);
}

TEST_CASE("Monte-Carlo output is independent of threads and reproducible") {
  OracleConfig one;
  one.mc_samples = 200'000;
  OracleConfig many = one;
  many.threads = 3;
  const double a = mi_monte_carlo(Alphabet::psk(8), 2.0, one).estimate;
  CHECK(a == mi_monte_carlo(Alphabet::psk(8), 2.0, many).estimate);
  CHECK(a == mi_monte_carlo(Alphabet::psk(8), 2.0, one).estimate);
  OracleConfig other = one;
  other.seed = 7;
  CHECK(a != mi_monte_carlo(Alphabet::psk(8), 2.0, other).estimate);
}

TEST_CASE("beamformer search: matched filter without constraints") {
  Scenario s = bundled().with_eavesdroppers(1);
  s.power.Pr_max = 2.0;
  const PerfectInstance inst = PerfectInstance::make(s.channels, s.power, bpsk(), 0.6, false);
  const auto best = beamformer_search(inst, config());
  REQUIRE(best);
  const double expect = inst.bounds.a + s.power.Pr_max * inst.h.squaredNorm() / inst.N0;
  CHECK(best->t == doctest::Approx(expect).epsilon(0.01));
  CHECK(best->t <= expect + 1e-9);
  CHECK(best->Psi.trace() == 0.0);
}

TEST_CASE("beamformer search agrees with the SDP on the bundled scenario") {
  for (int J : {1, 2, 3}) {
    for (bool an : {true, false}) {
      CAPTURE(J);
      CAPTURE(an);
      const PerfectInstance inst = instance(J, 0.0810, an);
      const SolveOutcome sdp = solve_rate(inst, bpsk(), bundled().solver);
      const auto best = beamformer_search(inst, config());
      REQUIRE(best);
      CHECK(sdp.t_max >= best->t - 1e-3);
      CHECK(sdp.t_max - best->t <= 0.01 * sdp.t_max);
      CHECK(replay_perfect(sdp, inst).max_violation() <= 1e-6);
    }
  }
}

TEST_CASE("beamformer search on random instances") {
  std::mt19937_64 rng(99);
  int tested = 0;
  while (tested < 5) {
    ChannelSet ch;
    ch.g = gaussian(rng, 2);
    ch.h0 = gaussian(rng, 1)(0);
    ch.h = gaussian(rng, 2);
    const int J = 1 + tested % 2;
    for (int j = 0; j < J; ++j) {
      ch.z0.push_back(gaussian(rng, 1)(0));
      ch.z.push_back(gaussian(rng, 2));
    }
    const PerfectInstance inst = PerfectInstance::make(ch, bundled().power, bpsk(), 0.1, tested % 2 == 0);
    if (inst.apriori_infeasible() || inst.bounds.c <= inst.bounds.a) continue;
    ++tested;
    const SolveOutcome sdp = solve_rate(inst, bpsk(), bundled().solver);
    const auto best = beamformer_search(inst, config());
    REQUIRE(best);
    CHECK(sdp.t_max >= best->t - 1e-3);
    CHECK(sdp.t_max <= best->t * 1.01);
    CHECK(replay_perfect(sdp, inst).max_violation() <= 1e-6);
  }
}

TEST_CASE("beamformer search edge cases") {
  CHECK_FALSE(beamformer_search(instance(1, 1e-5, true), config()));

  Scenario s = bundled().with_eavesdroppers(1);
  s.channels.g = CVector::Ones(4);
  s.channels.h = CVector::Ones(4);
  s.channels.z = {CVector::Ones(4)};
  CHECK_THROWS(beamformer_search(PerfectInstance::make(s.channels, s.power, bpsk(), 0.1, true), config()));

  const PerfectInstance inst = instance(2, 0.0810, true);
  OracleConfig cfg = config(5'000);
  const auto a = beamformer_search(inst, cfg);
  cfg.threads = 3;
  const auto b = beamformer_search(inst, cfg);
  REQUIRE(a);
  REQUIRE(b);
  CHECK(a->t == b->t);
  CHECK(a->phi == b->phi);
}

TEST_CASE("worst-case quadratic") {
  OracleConfig cfg;
  CVector h(2);
  h << Complex(0.2174, -0.6913), Complex(-0.4047, -0.3159);
  const CMatrix I = CMatrix::Identity(2, 2);
  const double N0 = 1.0;

  const WorstCase nominal = worst_case_quadratic(I, h, N0, 0.0, Extremum::Max, cfg);
  CHECK(nominal.value == doctest::Approx(N0 + h.squaredNorm()).epsilon(1e-14));
  CHECK(nominal.value == nominal.nominal);

  for (double eps : {0.01, 0.1, 0.5}) {
    CAPTURE(eps);
    const WorstCase hi = worst_case_quadratic(I, h, N0, eps, Extremum::Max, cfg);
    CHECK(hi.value == doctest::Approx(N0 + std::pow(h.norm() + eps, 2)).epsilon(1e-12));
    CHECK(hi.sampled <= hi.value + 1e-12);
    CHECK(hi.error.norm() == doctest::Approx(eps).epsilon(1e-9));
    const WorstCase lo = worst_case_quadratic(I, h, N0, eps, Extremum::Min, cfg);
    CHECK(lo.value == doctest::Approx(N0 + std::pow(h.norm() - eps, 2)).epsilon(1e-12));
    CHECK(lo.sampled >= lo.value - 1e-12);
  }

  // Indefinite form: the exact solution beats sampling.
  CMatrix Q(2, 2);
  Q << 1.0, Complex(0.3, 0.4), Complex(0.3, -0.4), -2.0;
  for (auto ext : {Extremum::Min, Extremum::Max}) {
    const WorstCase w = worst_case_quadratic(Q, h, 0.5, 0.3, ext, cfg);
    const double at = 0.5 + quad_form(CVector(h + w.error), Q);
    CHECK(at == doctest::Approx(w.value).epsilon(1e-9));
    CHECK(w.error.norm() <= 0.3 + 1e-12);
    if (ext == Extremum::Min) CHECK(w.value <= w.sampled + 1e-12);
    if (ext == Extremum::Max) CHECK(w.value >= w.sampled - 1e-12);
  }
}

TEST_CASE("worst-case search validates the robust witness") {
  const Scenario s = bundled().with_eavesdroppers(2).with_uniform_radius(0.02);
  const RobustInstance inst = RobustInstance::make(s.channels, s.radii, s.power, bpsk(), 0.0810, true);
  const SolveOutcome o = solve_robust_rate(inst, bpsk(), s.solver);
  REQUIRE(o.status == SolveStatus::Ok);
  OracleConfig cfg;
  const auto check = [&](ErrorSelector sel, int j, const std::string& aux, bool lower) {
    CAPTURE(to_string(sel));
    const WorstCase w = worst_case_error_search(sel, j, o.Phi, o.Psi, inst, cfg);
    if (lower) {
      CHECK(w.value >= o.scalar(aux) - 1e-6);
    } else {
      CHECK(w.value <= o.scalar(aux) + 1e-6);
    }
  };
  check(ErrorSelector::DestinationNumerator, -1, "r1", true);
  check(ErrorSelector::DestinationDenominator, -1, "r2", false);
  check(ErrorSelector::RelaySignal, -1, "r3", false);
  check(ErrorSelector::DestinationNoise, -1, "r4", true);
  for (int j = 0; j < 2; ++j) {
    check(ErrorSelector::EavesdropperNumerator, j, "s1_" + std::to_string(j + 1), false);
    check(ErrorSelector::EavesdropperDenominator, j, "s2_" + std::to_string(j + 1), true);
  }

  // Zero radius returns the nominal value.
  const Scenario s0 = bundled().with_eavesdroppers(2);
  const RobustInstance i0 = RobustInstance::make(s0.channels, s0.radii, s0.power, bpsk(), 0.0810, true);
  const WorstCase w0 = worst_case_error_search(ErrorSelector::DestinationNoise, -1, o.Phi, o.Psi, i0, cfg);
  CHECK(w0.value == w0.nominal);
}

TEST_CASE("replays catch a broken witness") {
  const PerfectInstance inst = instance(2, 0.0810, true);
  SolveOutcome o = solve_rate(inst, bpsk(), bundled().solver);
  o.t_max *= 1.05;
  CHECK(replay_perfect(o, inst).max_violation() > 1e-3);

  const Scenario s = bundled().with_eavesdroppers(1).with_uniform_radius(0.05);
  const RobustInstance ri = RobustInstance::make(s.channels, s.radii, s.power, bpsk(), 0.0810, true);
  SolveOutcome r = solve_robust_rate(ri, bpsk(), s.solver);
  for (auto& [name, value] : r.scalars) {
    if (name == "r1") value *= 1.1;
  }
  CHECK(replay_s_procedure(r, ri, OracleConfig{}).max_violation() > 1e-6);
}
