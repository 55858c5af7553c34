// Acceptance run: one PASS/FAIL line per criterion, details indented below.
// Exit status is nonzero if any criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "secrelay/mutual_information.hpp"
#include "secrelay/oracle.hpp"
#include "secrelay/perfect_csi.hpp"
#include "secrelay/robust_csi.hpp"
#include "secrelay/scenario.hpp"

using namespace secrelay;

namespace {

constexpr int kL = 1000;
constexpr double kFig3R0 = 0.0810;

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, std::string what) {
    pass = pass && ok;
    details.push_back((ok ? "ok   " : "FAIL ") + std::move(what));
  }
};

template <typename... Args>
std::string format(const char* fmt, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

int threads() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

struct Curve {
  int J;
  bool an;
  PerfectSweep sweep;
};

Verdict argmax_criterion(const std::vector<Curve>& curves) {
  Verdict v;
  for (const auto& c : curves) {
    double target = 0.0;
    if (c.J == 1) target = 0.001445;
    else if (!c.an) target = 0.145797;
    else if (c.J == 2) target = 0.080959;
    else if (c.J == 3) target = 0.099059;
    else continue;
    const double tol = std::max(2.0 * c.sweep.delta, 0.005);
    const double got = c.sweep.argmax_R0();
    v.require(std::abs(got - target) <= tol, format("J=%d AN %-3s argmax R0 %.6f, expected %.6f +- %.4f (max Rs %.6f)",
                                                    c.J, c.an ? "on" : "off", got, target, tol, c.sweep.max_rate()));
  }
  return v;
}

Verdict overlap_criterion(const std::vector<Curve>& curves) {
  Verdict v;
  const PerfectSweep* on = nullptr;
  const PerfectSweep* off = nullptr;
  for (const auto& c : curves) {
    if (c.J == 1) (c.an ? on : off) = &c.sweep;
  }
  double worst = 0.0;
  for (std::size_t l = 0; l < on->points.size(); ++l) {
    worst = std::max(worst, std::abs(on->points[l].secrecy_rate - off->points[l].secrecy_rate));
  }
  v.require(worst <= 1e-3, format("J=1 max |Rs_AN - Rs_noAN| = %.3g (limit 1e-3)", worst));
  return v;
}

Verdict saturation_criterion(const std::vector<Curve>& curves, const MiEvaluator& mi) {
  Verdict v;
  for (const auto& c : curves) {
    const auto& pts = c.sweep.points;
    double top = 0.0;
    for (const auto& p : pts) top = std::max(top, mi.half_rate(p.t_max));
    double lo = 1e9, hi = -1e9;
    int pairs = 0;
    for (std::size_t l = 3 * (pts.size() - 1) / 4 + 1; l < pts.size(); ++l) {
      const auto& p = pts[l];
      const auto& q = pts[l - 1];
      if (mi.half_rate(p.t_max) < 0.499 || mi.half_rate(q.t_max) < 0.499) continue;
      if (p.secrecy_rate <= 0.0 || q.secrecy_rate <= 0.0) continue;
      const double slope = (p.secrecy_rate - q.secrecy_rate) / (p.R0 - q.R0);
      lo = std::min(lo, slope);
      hi = std::max(hi, slope);
      ++pairs;
    }
    const bool slope_ok = pairs > 0 && lo >= -1.05 && hi <= -0.95;
    v.require(top <= 0.5 + 1e-6 && slope_ok,
              format("J=%d AN %-3s max I(t)/2 %.9f; upper-quarter slope in [%.4f, %.4f] over %d pairs", c.J,
                     c.an ? "on" : "off", top, lo, hi, pairs));
  }
  return v;
}

struct RobustPoint {
  int J;
  double eps;
  RobustInstance inst;
  SolveOutcome outcome;
};

Verdict rank_criterion(const std::vector<Curve>& curves, const std::vector<RobustPoint>& robust) {
  Verdict v;
  for (const auto& c : curves) {
    double worst = 0.0;
    int solved = 0;
    for (const auto& p : c.sweep.points) {
      if (p.status != SolveStatus::Ok) continue;
      worst = std::max(worst, p.rank_ratio);
      ++solved;
    }
    v.require(worst <= 1e-6, format("perfect J=%d AN %-3s: max lambda2/lambda1 %.3g over %d points", c.J,
                                    c.an ? "on" : "off", worst, solved));
  }
  double worst = 0.0;
  int solved = 0;
  for (const auto& r : robust) {
    if (r.outcome.status != SolveStatus::Ok) continue;
    worst = std::max(worst, r.outcome.rank_ratio);
    ++solved;
  }
  v.require(worst <= 1e-6, format("robust: max lambda2/lambda1 %.3g over %d points", worst, solved));
  return v;
}

Verdict robust_trend_criterion(const std::vector<RobustPoint>& robust, const Scenario& sc, const MiEvaluator& mi) {
  Verdict v;
  const double slack = 2.0 * sc.solver.bisect_tol;
  auto at = [&](int J, std::size_t i) -> const RobustPoint& { return robust[i * 3 + static_cast<std::size_t>(J - 1)]; };
  const std::size_t n_eps = robust.size() / 3;
  for (int J = 1; J <= 3; ++J) {
    bool ok = true;
    for (std::size_t i = 0; i < n_eps; ++i) {
      ok = ok && at(J, i).outcome.status == SolveStatus::Ok;
      if (i > 0) ok = ok && at(J, i).outcome.secrecy_rate <= at(J, i - 1).outcome.secrecy_rate + slack;
    }
    v.require(ok, format("J=%d: Rs_lower non-increasing over eps = 0..0.05 (%.6f -> %.6f)", J,
                         at(J, 0).outcome.secrecy_rate, at(J, n_eps - 1).outcome.secrecy_rate));
    const Scenario s = sc.with_eavesdroppers(J);
    const SolveOutcome perfect =
        solve_rate(PerfectInstance::make(s.channels, s.power, mi, kFig3R0, true), mi, s.solver);
    const double diff = std::abs(perfect.secrecy_rate - at(J, 0).outcome.secrecy_rate);
    v.require(diff <= slack, format("J=%d: eps=0 matches perfect CSI, |diff| %.3g (limit %.1g)", J, diff, slack));
  }
  bool ok = true;
  for (std::size_t i = 0; i < n_eps; ++i) {
    for (int J = 2; J <= 3; ++J) ok = ok && at(J, i).outcome.secrecy_rate <= at(J - 1, i).outcome.secrecy_rate + slack;
  }
  v.require(ok, "Rs_lower non-increasing in J at every eps");
  return v;
}

CVector gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> n01(0.0, std::sqrt(0.5));
  CVector out(n);
  for (Eigen::Index i = 0; i < n; ++i) out(i) = Complex(n01(rng), n01(rng));
  return out;
}

Verdict oracle_criterion(const Scenario& sc, const MiEvaluator& mi) {
  Verdict v;
  std::mt19937_64 rng(20240611);
  OracleConfig cfg;
  cfg.threads = threads();
  int tested = 0, redraws = 0;
  double worst_low = 0.0, worst_ratio = 0.0, worst_replay = -1e9;
  bool ok = true;
  while (tested < 20) {
    const int J = 1 + tested % 2;
    ChannelSet ch;
    ch.g = gaussian(rng, 2);
    ch.h0 = gaussian(rng, 1)(0);
    ch.h = gaussian(rng, 2);
    for (int j = 0; j < J; ++j) {
      ch.z0.push_back(gaussian(rng, 1)(0));
      ch.z.push_back(gaussian(rng, 2));
    }
    const PerfectInstance inst = PerfectInstance::make(ch, sc.power, mi, 0.1, tested % 2 == 0);
    if (inst.apriori_infeasible() || inst.bounds.c <= inst.bounds.a) {
      ++redraws;
      continue;
    }
    ++tested;
    const SolveOutcome sdp = solve_rate(inst, mi, sc.solver);
    const auto best = beamformer_search(inst, cfg);
    if (!best || sdp.status != SolveStatus::Ok) {
      ok = false;
      continue;
    }
    const double replay = replay_perfect(sdp, inst).max_violation();
    worst_low = std::max(worst_low, best->t - sdp.t_max);
    worst_ratio = std::max(worst_ratio, sdp.t_max / best->t);
    worst_replay = std::max(worst_replay, replay);
    ok = ok && sdp.t_max >= best->t - 1e-3 && sdp.t_max <= best->t * 1.01 && replay <= 1e-6;
  }
  v.require(ok, format("20 instances (%d redrawn): max(search - sdp) %.3g, max sdp/search %.6f, max replay violation %.3g",
                       redraws, worst_low, worst_ratio, worst_replay));
  return v;
}

Verdict s_procedure_criterion(const std::vector<RobustPoint>& robust) {
  Verdict v;
  OracleConfig cfg;
  cfg.error_samples = 10'000;
  cfg.threads = threads();
  double worst = -1e9;
  int checked = 0;
  for (const auto& r : robust) {
    if (r.outcome.status != SolveStatus::Ok) continue;
    worst = std::max(worst, replay_s_procedure(r.outcome, r.inst, cfg).max_violation());
    ++checked;
  }
  v.require(checked > 0 && worst <= 1e-6,
            format("%d robust solutions, 1e4 draws per ball: max violation %.3g (limit 1e-6)", checked, worst));
  return v;
}

Verdict mi_criterion(const MiEvaluator& mi) {
  Verdict v;
  v.require(mi.mutual_information(0.0) == 0.0, "I(0) = 0 exactly");
  const double i100 = mi.mutual_information(100.0);
  v.require(std::abs(i100 - 1.0) <= 1e-3, format("I(100) = %.9f", i100));
  OracleConfig cfg;
  cfg.threads = threads();
  for (double rho : {0.5, 1.0, 2.0, 5.0, 10.0}) {
    const MonteCarloEstimate mc = mi_monte_carlo(mi.alphabet(), rho, cfg);
    const double q = mi.mutual_information(rho);
    v.require(std::abs(q - mc.estimate) <= 3.0 * mc.std_error,
              format("rho=%-4g quadrature %.9f, Monte-Carlo %.9f +- %.2g", rho, q, mc.estimate, mc.std_error));
  }
  bool mono = true;
  double prev = -1.0;
  for (int k = 0; k < 100; ++k) {
    const double x = mi.mutual_information(1e-3 * std::pow(1e6, k / 99.0));
    mono = mono && prev <= x + 1e-9 && x >= 0.0 && x <= 1.0;
    prev = x;
  }
  v.require(mono, "monotone and bounded on the 100-point log grid [1e-3, 1e3]");
  double curvature = -1e9;
  std::vector<double> g(201);
  for (std::size_t k = 0; k < g.size(); ++k) g[k] = mi.mutual_information(0.1 * static_cast<double>(k));
  for (std::size_t k = 1; k + 1 < g.size(); ++k) curvature = std::max(curvature, g[k - 1] - 2 * g[k] + g[k + 1]);
  v.require(curvature <= 1e-7, format("concave on [0, 20]: max second difference %.3g", curvature));
  return v;
}

}  // namespace

int main() {
  const Scenario sc = load_scenario(std::string(SECRELAY_TEST_DATA) + "/scenario_sec5.json");
  const MiEvaluator mi(sc.alphabet, sc.solver.quad_order);

  std::vector<Curve> curves;
  for (int J : {1, 2, 3}) {
    for (bool an : {true, false}) {
      curves.push_back({J, an, sweep_R0(sc.with_eavesdroppers(J), mi, kL, an, threads())});
    }
  }

  std::vector<RobustPoint> robust;
  for (int i = 0; i <= 10; ++i) {
    const double eps = 0.005 * i;
    for (int J = 1; J <= 3; ++J) {
      const Scenario s = sc.with_eavesdroppers(J).with_uniform_radius(eps);
      RobustInstance inst = RobustInstance::make(s.channels, s.radii, s.power, mi, kFig3R0, true);
      SolveOutcome o = solve_robust_rate(inst, mi, s.solver);
      robust.push_back({J, eps, std::move(inst), std::move(o)});
    }
  }

  struct Entry {
    const char* title;
    Verdict verdict;
  };
  const Entry entries[] = {
      {"Rs-vs-R0 argmax per curve", argmax_criterion(curves)},
      {"J=1 AN and no-AN curves overlap", overlap_criterion(curves)},
      {"saturation at 0.5 and slope -1 fall", saturation_criterion(curves, mi)},
      {"rank-one Phi at every solved point", rank_criterion(curves, robust)},
      {"robust trends in eps and J, eps=0 reduction", robust_trend_criterion(robust, sc, mi)},
      {"SDP vs beamformer search on random instances", oracle_criterion(sc, mi)},
      {"S-procedure soundness under random errors", s_procedure_criterion(robust)},
      {"mutual information suite", mi_criterion(mi)},
  };

  bool all = true;
  int n = 0;
  for (const auto& e : entries) {
    ++n;
    all = all && e.verdict.pass;
    std::printf("criterion %d: %s  %s\n", n, e.verdict.pass ? "PASS" : "FAIL", e.title);
    for (const auto& d : e.verdict.details) std::printf("    %s\n", d.c_str());
  }
  std::printf("%s\n", all ? "all criteria passed" : "some criteria failed");
  return all ? 0 : 1;
}
