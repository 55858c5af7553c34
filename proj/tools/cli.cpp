#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "report.hpp"
#include "secrelay/errors.hpp"
#include "secrelay/oracle.hpp"
#include "secrelay/parallel.hpp"
#include "secrelay/perfect_csi.hpp"
#include "secrelay/robust_csi.hpp"
#include "secrelay/scenario.hpp"
#include "secrelay/version.hpp"

namespace secrelay::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr double kFig3R0 = 0.0810;
constexpr const char* kDefaultEpsGrid = "0:0.005:0.05";

struct Globals {
  std::string scenario = SECRELAY_DEFAULT_SCENARIO;
  std::string out;
  std::uint64_t seed = 20240611;
  int threads = 0;
  int quad_order = 0;
  double bisect_tol = 0.0;
};

struct Session {
  Scenario scenario;
  MiEvaluator mi;
  Manifest manifest;
  int threads = 1;
  std::uint64_t seed = 0;
  std::string out_path;
  std::ostream& out;
  std::ostream& err;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("--scenario", {"cannot open '" + path + "'"});
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Session open_session(const Globals& g, const std::string& command, std::ostream& out, std::ostream& err) {
  const std::string text = read_file(g.scenario);
  Scenario sc = parse_scenario(text, g.scenario);

  std::vector<std::string> issues;
  if (g.quad_order != 0) {
    if (g.quad_order < MiEvaluator::kMinimumOrder) {
      issues.push_back(fmt::format("--quad-order: must be at least {}", MiEvaluator::kMinimumOrder));
    }
    sc.solver.quad_order = g.quad_order;
  }
  if (g.bisect_tol != 0.0) {
    if (!(g.bisect_tol > 0.0 && g.bisect_tol < 1.0)) issues.push_back("--bisect-tol: must lie in (0, 1)");
    sc.solver.bisect_tol = g.bisect_tol;
  }
  if (g.threads < 0) issues.push_back("--threads: must be nonnegative");
  if (!issues.empty()) throw InputError("flags", issues);

  const int threads =
      g.threads > 0 ? g.threads : std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
  MiEvaluator mi(sc.alphabet, sc.solver.quad_order);

  Manifest m;
  m.version = kVersion;
  m.command = command;
  m.scenario_path = g.scenario;
  m.scenario_hash = fnv1a_hex(text);
  m.settings = fmt::format("bisect_tol={} feas_tol={} quad_order={} grid_L={} grid_K={} max_iterations={} seed={}",
                           sc.solver.bisect_tol, sc.solver.feas_tol, sc.solver.quad_order, sc.solver.grid_L,
                           sc.solver.grid_K, sc.solver.max_iterations, g.seed);
  m.timestamp = utc_timestamp();
  return Session{std::move(sc), std::move(mi), std::move(m), threads, g.seed, g.out, out, err};
}

double parse_number(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size() || !std::isfinite(v)) {
    throw InputError(what, {"'" + s + "' is not a finite number"});
  }
  return v;
}

/// "lo:step:hi" or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec, const std::string& what) {
  std::vector<std::string> parts;
  const bool range = spec.find(':') != std::string::npos;
  std::stringstream ss(spec);
  for (std::string item; std::getline(ss, item, range ? ':' : ',');) parts.push_back(item);
  std::vector<double> grid;
  if (range) {
    if (parts.size() != 3) throw InputError(what, {"range must be lo:step:hi"});
    const double lo = parse_number(parts[0], what);
    const double step = parse_number(parts[1], what);
    const double hi = parse_number(parts[2], what);
    if (!(step > 0.0) || hi < lo) throw InputError(what, {"range needs step > 0 and hi >= lo"});
    const auto count = static_cast<long>(std::floor((hi - lo) / step + 1e-9)) + 1;
    if (count > 1'000'000) throw InputError(what, {"range has too many points"});
    for (long k = 0; k < count; ++k) grid.push_back(lo + static_cast<double>(k) * step);
  } else {
    for (const auto& p : parts) grid.push_back(parse_number(p, what));
  }
  if (grid.empty()) throw InputError(what, {"empty grid"});
  return grid;
}

std::vector<double> sorted_eps(const std::string& spec, std::ostream& err) {
  std::vector<double> eps = parse_grid(spec, "--eps-grid");
  for (double e : eps) {
    if (e < 0.0) throw InputError("--eps-grid", {fmt::format("radius {} is negative", e)});
  }
  if (!std::is_sorted(eps.begin(), eps.end())) {
    err << "warning: --eps-grid was not sorted; sorting ascending\n";
    std::sort(eps.begin(), eps.end());
  }
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
  return eps;
}

std::vector<int> eavesdropper_counts(const Session& s, const std::vector<int>& requested) {
  const std::vector<int>& counts = requested.empty() ? s.scenario.eavesdropper_subsets : requested;
  if (s.scenario.eavesdroppers() == 0 || counts.empty()) {
    throw InputError("scenario", {"eavesdropper list is empty"});
  }
  for (int J : counts) {
    if (J < 1 || J > s.scenario.eavesdroppers()) {
      throw InputError("--J", {fmt::format("{} outside [1, {}]", J, s.scenario.eavesdroppers())});
    }
  }
  return counts;
}

std::vector<bool> an_modes(const std::string& mode) {
  if (mode == "on") return {true};
  if (mode == "off") return {false};
  if (mode == "both") return {true, false};
  throw InputError("--an", {"expected on, off or both"});
}

const char* an_label(bool on) { return on ? "on" : "off"; }

/// Writes to --out (or `fallback_name` inside an output directory) or to stdout.
void emit(Session& s, const std::string& path, const std::function<void(std::ostream&)>& body) {
  if (path.empty()) {
    body(s.out);
    return;
  }
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream os(p, std::ios::binary);
  if (!os) throw InputError("--out", {"cannot write '" + path + "'"});
  body(os);
}

fs::path output_dir(const Session& s) {
  const fs::path dir = s.out_path.empty() ? fs::path(".") : fs::path(s.out_path);
  fs::create_directories(dir);
  return dir;
}

void write_json(const fs::path& path, const json& doc) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InputError("--out", {"cannot write '" + path.string() + "'"});
  os << doc.dump(2) << '\n';
}

Alphabet alphabet_from_flag(const std::string& spec, const Scenario& sc) {
  if (spec.empty()) return sc.alphabet;
  if (spec.front() != '[') return Alphabet::by_name(spec);
  json doc;
  try {
    doc = json::parse(spec);
  } catch (const json::parse_error& e) {
    throw InputError("--alphabet", {e.what()});
  }
  std::vector<Complex> points;
  for (const auto& p : doc) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
      throw InputError("--alphabet", {"expected a list of [re, im] pairs"});
    }
    points.emplace_back(p[0].get<double>(), p[1].get<double>());
  }
  return Alphabet::from_points("custom", std::move(points));
}

SolveOutcome solve_robust_point(const Scenario& sc, const MiEvaluator& mi, int J, double eps, double R0, bool an) {
  const Scenario s = sc.with_eavesdroppers(J).with_uniform_radius(eps);
  const RobustInstance inst = RobustInstance::make(s.channels, s.radii, s.power, mi, R0, an);
  try {
    return solve_robust_rate(inst, mi, s.solver);
  } catch (const NumericError& e) {
    SolveOutcome o;
    o.R0 = R0;
    o.status = SolveStatus::SolverFailure;
    o.diagnostic = e.what();
    return o;
  }
}

SolveOutcome solve_perfect_point(const Scenario& sc, const MiEvaluator& mi, int J, double R0, bool an) {
  const Scenario s = sc.with_eavesdroppers(J);
  return solve_rate(PerfectInstance::make(s.channels, s.power, mi, R0, an), mi, s.solver);
}

// ---------------------------------------------------------------- commands

struct MiTableArgs {
  std::string alphabet;
  double rho_min = 0.0;
  double rho_max = 20.0;
  int points = 201;
  std::string spacing = "linear";
};

int cmd_mi_table(Session& s, const MiTableArgs& a) {
  std::vector<std::string> issues;
  if (a.points < 2) issues.push_back("--points: at least 2");
  if (!(a.rho_min >= 0.0) || !(a.rho_max > a.rho_min)) issues.push_back("--rho-min/--rho-max: need 0 <= min < max");
  if (a.spacing != "linear" && a.spacing != "log") issues.push_back("--spacing: linear or log");
  if (a.spacing == "log" && !(a.rho_min > 0.0)) issues.push_back("--spacing log: --rho-min must be positive");
  if (!issues.empty()) throw InputError("mi-table", issues);

  const MiEvaluator ev(alphabet_from_flag(a.alphabet, s.scenario), s.scenario.solver.quad_order);
  s.manifest.settings += " alphabet=" + ev.alphabet().name();
  std::vector<double> rho(static_cast<std::size_t>(a.points));
  for (int k = 0; k < a.points; ++k) {
    const double f = static_cast<double>(k) / (a.points - 1);
    rho[static_cast<std::size_t>(k)] = a.spacing == "log"
                                           ? a.rho_min * std::pow(a.rho_max / a.rho_min, f)
                                           : a.rho_min + f * (a.rho_max - a.rho_min);
  }
  std::vector<double> bits(rho.size());
  parallel_for(rho.size(), s.threads, [&](std::size_t k) { bits[k] = ev.mutual_information(rho[k]); });

  emit(s, s.out_path, [&](std::ostream& os) {
    s.manifest.write_comment(os);
    CsvWriter csv(os);
    csv.row({"rho", "I_bits"});
    for (std::size_t k = 0; k < rho.size(); ++k) csv.row({csv_number(rho[k]), csv_number(bits[k])});
  });
  return kOk;
}

struct PerfectSweepArgs {
  int L = 0;
  std::string an = "both";
  std::vector<int> J;
};

int cmd_perfect_sweep(Session& s, const PerfectSweepArgs& a) {
  const int L = a.L > 0 ? a.L : s.scenario.solver.grid_L;
  if (L < 10) throw InputError("--L", {"must be at least 10"});
  const auto counts = eavesdropper_counts(s, a.J);
  const auto modes = an_modes(a.an);

  bool failed = false;
  emit(s, s.out_path, [&](std::ostream& os) {
    s.manifest.write_comment(os);
    CsvWriter csv(os);
    csv.row({"J", "an", "R0", "Rs", "t_max", "rank_ratio", "power_used", "status"});
    for (int J : counts) {
      for (bool an : modes) {
        const PerfectSweep sweep = sweep_R0(s.scenario.with_eavesdroppers(J), s.mi, L, an, s.threads);
        for (const auto& p : sweep.points) {
          failed = failed || p.status == SolveStatus::SolverFailure;
          csv.row({std::to_string(J), an_label(an), csv_number(p.R0), csv_number(p.secrecy_rate),
                   csv_number(p.t_max), csv_number(p.rank_ratio), csv_number(p.power_used), to_string(p.status)});
        }
      }
    }
  });
  return failed ? kFailure : kOk;
}

struct RobustSweepArgs {
  double R0 = kFig3R0;
  std::string eps_grid = kDefaultEpsGrid;
  std::string an = "on";
  std::vector<int> J;
};

struct RobustGrid {
  std::vector<double> eps;
  std::vector<int> counts;
  /// outcomes[i * counts.size() + k] for eps[i], counts[k].
  std::vector<SolveOutcome> outcomes;
  const SolveOutcome& at(std::size_t i, std::size_t k) const { return outcomes[i * counts.size() + k]; }
};

RobustGrid robust_grid(const Session& s, std::vector<double> eps, std::vector<int> counts, double R0, bool an) {
  RobustGrid g{std::move(eps), std::move(counts), {}};
  g.outcomes.resize(g.eps.size() * g.counts.size());
  parallel_for(g.outcomes.size(), s.threads, [&](std::size_t idx) {
    const std::size_t i = idx / g.counts.size();
    const std::size_t k = idx % g.counts.size();
    g.outcomes[idx] = solve_robust_point(s.scenario, s.mi, g.counts[k], g.eps[i], R0, an);
  });
  return g;
}

int cmd_robust_sweep(Session& s, const RobustSweepArgs& a) {
  if (!(a.R0 >= 0.0)) throw InputError("--R0", {"must be nonnegative"});
  const auto modes = an_modes(a.an);
  if (modes.size() != 1) throw InputError("--an", {"robust-sweep takes on or off"});
  const RobustGrid g = robust_grid(s, sorted_eps(a.eps_grid, s.err), eavesdropper_counts(s, a.J), a.R0, modes[0]);

  bool failed = false;
  emit(s, s.out_path, [&](std::ostream& os) {
    s.manifest.write_comment(os);
    CsvWriter csv(os);
    csv.row({"eps", "J", "Rs_lower", "r_max", "rank_ratio", "status"});
    for (std::size_t i = 0; i < g.eps.size(); ++i) {
      for (std::size_t k = 0; k < g.counts.size(); ++k) {
        const SolveOutcome& o = g.at(i, k);
        failed = failed || o.status == SolveStatus::SolverFailure;
        csv.row({csv_number(g.eps[i]), std::to_string(g.counts[k]), csv_number(o.secrecy_rate), csv_number(o.t_max),
                 csv_number(o.rank_ratio), to_string(o.status)});
      }
    }
  });
  return failed ? kFailure : kOk;
}

struct Fig2Args {
  int L = 0;
};

int cmd_fig2(Session& s, const Fig2Args& a) {
  const int L = a.L > 0 ? a.L : s.scenario.solver.grid_L;
  if (L < 10) throw InputError("--L", {"must be at least 10"});
  const auto counts = eavesdropper_counts(s, {});
  const fs::path dir = output_dir(s);

  json curves = json::array();
  bool failed = false;
  double R_D = 0.0, delta = 0.0;
  for (int J : counts) {
    for (bool an : {true, false}) {
      const PerfectSweep sweep = sweep_R0(s.scenario.with_eavesdroppers(J), s.mi, L, an, s.threads);
      R_D = sweep.R_D;
      delta = sweep.delta;
      const std::string name = fmt::format("fig2_J{}_an_{}.csv", J, an_label(an));
      std::ofstream os(dir / name, std::ios::binary);
      if (!os) throw InputError("--out", {"cannot write '" + (dir / name).string() + "'"});
      s.manifest.write_comment(os);
      CsvWriter csv(os);
      csv.row({"R0", "Rs"});
      std::map<std::string, int> statuses;
      for (const auto& p : sweep.points) {
        ++statuses[to_string(p.status)];
        csv.row({csv_number(p.R0), csv_number(p.secrecy_rate)});
      }
      const int failures = statuses.count("solver_failure") ? statuses["solver_failure"] : 0;
      failed = failed || failures > 0;
      curves.push_back({{"J", J},
                        {"an", an},
                        {"file", name},
                        {"argmax_R0", sweep.argmax_R0()},
                        {"max_Rs", sweep.max_rate()},
                        {"statuses", statuses},
                        {"solver_failures", failures}});
    }
  }
  json summary = {{"manifest", s.manifest.to_json()}, {"L", L}, {"R_D", R_D}, {"delta", delta}, {"curves", curves}};
  write_json(dir / "fig2_summary.json", summary);
  for (const auto& c : curves) {
    s.out << fmt::format("J={} AN={:<3} argmax R0={:.6f} max Rs={:.6f}\n", c["J"].get<int>(),
                         an_label(c["an"].get<bool>()), c["argmax_R0"].get<double>(), c["max_Rs"].get<double>());
  }
  return failed ? kFailure : kOk;
}

struct Fig3Args {
  double R0 = kFig3R0;
  std::string eps_grid = kDefaultEpsGrid;
};

int cmd_fig3(Session& s, const Fig3Args& a) {
  if (!(a.R0 >= 0.0)) throw InputError("--R0", {"must be nonnegative"});
  const fs::path dir = output_dir(s);
  const RobustGrid g = robust_grid(s, sorted_eps(a.eps_grid, s.err), eavesdropper_counts(s, {}), a.R0, true);
  const double slack = 2.0 * s.scenario.solver.bisect_tol;

  {
    std::ofstream os(dir / "fig3.csv", std::ios::binary);
    if (!os) throw InputError("--out", {"cannot write '" + (dir / "fig3.csv").string() + "'"});
    s.manifest.write_comment(os);
    CsvWriter csv(os);
    csv.row({"eps", "J", "Rs_lower"});
    for (std::size_t i = 0; i < g.eps.size(); ++i) {
      for (std::size_t k = 0; k < g.counts.size(); ++k) {
        csv.row({csv_number(g.eps[i]), std::to_string(g.counts[k]), csv_number(g.at(i, k).secrecy_rate)});
      }
    }
  }

  bool failed = false;
  json per_J = json::array();
  for (std::size_t k = 0; k < g.counts.size(); ++k) {
    bool monotone = true;
    json statuses = json::array();
    for (std::size_t i = 0; i < g.eps.size(); ++i) {
      statuses.push_back(to_string(g.at(i, k).status));
      failed = failed || g.at(i, k).status == SolveStatus::SolverFailure;
      if (i > 0 && g.at(i, k).secrecy_rate > g.at(i - 1, k).secrecy_rate + slack) monotone = false;
    }
    json entry = {{"J", g.counts[k]}, {"non_increasing_in_eps", monotone}, {"statuses", statuses}};
    if (g.eps.front() == 0.0) {
      const SolveOutcome perfect = solve_perfect_point(s.scenario, s.mi, g.counts[k], a.R0, true);
      const double diff = std::abs(perfect.secrecy_rate - g.at(0, k).secrecy_rate);
      entry["perfect_Rs"] = perfect.secrecy_rate;
      entry["eps0_matches_perfect"] = diff <= slack;
    }
    per_J.push_back(entry);
  }
  json per_eps = json::array();
  for (std::size_t i = 0; i < g.eps.size(); ++i) {
    bool monotone = true;
    for (std::size_t k = 1; k < g.counts.size(); ++k) {
      if (g.counts[k] > g.counts[k - 1] && g.at(i, k).secrecy_rate > g.at(i, k - 1).secrecy_rate + slack) {
        monotone = false;
      }
    }
    per_eps.push_back({{"eps", g.eps[i]}, {"non_increasing_in_J", monotone}});
  }
  json summary = {{"manifest", s.manifest.to_json()}, {"R0", a.R0},         {"tolerance", slack},
                  {"file", "fig3.csv"},               {"per_J", per_J},     {"per_eps", per_eps}};
  write_json(dir / "fig3_summary.json", summary);
  for (const auto& e : per_J) {
    s.out << fmt::format("J={} non-increasing in eps: {}\n", e["J"].get<int>(),
                         e["non_increasing_in_eps"].get<bool>() ? "yes" : "no");
  }
  return failed ? kFailure : kOk;
}

// ---------------------------------------------------------------- oracle-check

struct OracleArgs {
  std::string mode = "mi";
  std::int64_t samples = 0;
  std::string rho = "0.5,1,2,5,10";
  double R0 = kFig3R0;
  double eps = 0.02;
  std::string an = "on";
};

OracleConfig oracle_config(const Session& s, std::int64_t samples) {
  OracleConfig cfg;
  cfg.seed = s.seed;
  cfg.threads = s.threads;
  if (samples > 0) {
    cfg.mc_samples = samples;
    cfg.search_samples = samples;
    cfg.error_samples = samples;
  }
  try {
    cfg.validate();
  } catch (const DomainError& e) {
    throw InputError("--samples", {e.what()});
  }
  return cfg;
}

json oracle_mi(const Session& s, const OracleArgs& a, bool& pass) {
  OracleConfig cfg = oracle_config(s, a.samples);
  json rows = json::array();
  for (double rho : parse_grid(a.rho, "--rho")) {
    if (rho < 0.0) throw InputError("--rho", {"SNR must be nonnegative"});
    const double quad = s.mi.mutual_information(rho);
    const MonteCarloEstimate mc = mi_monte_carlo(s.scenario.alphabet, rho, cfg);
    const double diff = quad - mc.estimate;
    const bool ok = std::abs(diff) <= 3.0 * mc.std_error + 1e-12;
    pass = pass && ok;
    rows.push_back({{"rho", rho},
                    {"quadrature", quad},
                    {"monte_carlo", mc.estimate},
                    {"std_error", mc.std_error},
                    {"samples", mc.samples},
                    {"within_3_sigma", ok}});
  }
  return rows;
}

json oracle_search(const Session& s, const OracleArgs& a, bool& pass) {
  OracleConfig cfg = oracle_config(s, a.samples);
  if (s.scenario.relay_antennas() > 3) throw InputError("oracle-check", {"search mode needs N <= 3"});
  const bool an = an_modes(a.an).at(0);
  json rows = json::array();
  for (int J : eavesdropper_counts(s, {})) {
    const Scenario sc = s.scenario.with_eavesdroppers(J);
    const PerfectInstance inst = PerfectInstance::make(sc.channels, sc.power, s.mi, a.R0, an);
    const SolveOutcome sdp = solve_rate(inst, s.mi, sc.solver);
    const auto found = beamformer_search(inst, cfg);
    json row = {{"J", J}, {"status", to_string(sdp.status)}, {"t_sdp", sdp.t_max}};
    if (found) {
      const bool dominance = sdp.t_max >= found->t - 1e-3;
      const bool tight = sdp.t_max - found->t <= 0.01 * sdp.t_max;
      const double replay = replay_perfect(sdp, inst).max_violation();
      row["t_search"] = found->t;
      row["evaluations"] = found->evaluations;
      row["sdp_dominates"] = dominance;
      row["within_1_percent"] = tight;
      row["replay_violation"] = replay;
      pass = pass && dominance && tight && replay <= 1e-6;
    } else {
      const bool agree = sdp.status != SolveStatus::Ok;
      row["t_search"] = nullptr;
      row["both_empty"] = agree;
      pass = pass && agree;
    }
    rows.push_back(row);
  }
  return rows;
}

/// Bound on the worst case recorded by the witness, as (aux name, is lower bound).
std::pair<std::string, bool> auxiliary_for(ErrorSelector sel, int j) {
  const std::string k = std::to_string(j + 1);
  switch (sel) {
    case ErrorSelector::DestinationNumerator:
      return {"r1", true};
    case ErrorSelector::DestinationDenominator:
      return {"r2", false};
    case ErrorSelector::RelaySignal:
      return {"r3", false};
    case ErrorSelector::DestinationNoise:
      return {"r4", true};
    case ErrorSelector::EavesdropperNumerator:
      return {"s1_" + k, false};
    case ErrorSelector::EavesdropperDenominator:
      return {"s2_" + k, true};
  }
  return {"", true};
}

bool has_scalar(const SolveOutcome& o, const std::string& name) {
  return std::any_of(o.scalars.begin(), o.scalars.end(), [&](const auto& kv) { return kv.first == name; });
}

json oracle_worstcase(const Session& s, const OracleArgs& a, bool& pass) {
  OracleConfig cfg = oracle_config(s, a.samples);
  if (!(a.eps >= 0.0)) throw InputError("--eps", {"must be nonnegative"});
  const bool an = an_modes(a.an).at(0);
  json rows = json::array();
  for (int J : eavesdropper_counts(s, {})) {
    const Scenario sc = s.scenario.with_eavesdroppers(J).with_uniform_radius(a.eps);
    const RobustInstance inst = RobustInstance::make(sc.channels, sc.radii, sc.power, s.mi, a.R0, an);
    const SolveOutcome o = solve_robust_rate(inst, s.mi, sc.solver);
    json row = {{"J", J}, {"eps", a.eps}, {"status", to_string(o.status)}, {"r_max", o.t_max}};
    if (o.status == SolveStatus::Ok) {
      const ReplayReport replay = replay_s_procedure(o, inst, cfg);
      json exact = json::array();
      double worst = replay.max_violation();
      const ErrorSelector all[] = {ErrorSelector::DestinationNumerator, ErrorSelector::DestinationDenominator,
                                   ErrorSelector::RelaySignal,          ErrorSelector::DestinationNoise,
                                   ErrorSelector::EavesdropperNumerator, ErrorSelector::EavesdropperDenominator};
      for (ErrorSelector sel : all) {
        const bool eav = sel == ErrorSelector::EavesdropperNumerator || sel == ErrorSelector::EavesdropperDenominator;
        for (int j = 0; j < (eav ? J : 1); ++j) {
          const auto [aux, lower] = auxiliary_for(sel, eav ? j : -1);
          if (!has_scalar(o, aux)) continue;
          const WorstCase wc = worst_case_error_search(sel, eav ? j : -1, o.Phi, o.Psi, inst, cfg);
          const double bound = o.scalar(aux);
          const double violation = lower ? bound - wc.value : wc.value - bound;
          worst = std::max(worst, violation);
          exact.push_back({{"selector", to_string(sel)},
                           {"eavesdropper", eav ? j + 1 : 0},
                           {"worst", wc.value},
                           {"nominal", wc.nominal},
                           {"auxiliary", aux},
                           {"bound", bound},
                           {"violation", violation}});
        }
      }
      json sampled = json::array();
      for (const auto& c : replay.checks) sampled.push_back({{"check", c.name}, {"violation", c.violation}});
      row["sampled"] = sampled;
      row["exact"] = exact;
      row["max_violation"] = worst;
      row["sound"] = worst <= 1e-6;
      pass = pass && worst <= 1e-6;
    }
    rows.push_back(row);
  }
  return rows;
}

int cmd_oracle_check(Session& s, const OracleArgs& a) {
  bool pass = true;
  json results;
  if (a.mode == "mi") {
    results = oracle_mi(s, a, pass);
  } else if (a.mode == "search") {
    results = oracle_search(s, a, pass);
  } else if (a.mode == "worstcase") {
    results = oracle_worstcase(s, a, pass);
  } else {
    throw InputError("--mode", {"expected mi, search or worstcase"});
  }
  const json doc = {{"manifest", s.manifest.to_json()}, {"mode", a.mode}, {"passed", pass}, {"results", results}};
  emit(s, s.out_path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  return pass ? kOk : kFailure;
}

// ---------------------------------------------------------------- validate

struct Check {
  std::string name;
  bool passed = true;
  std::string detail;
};

void mi_checks(const MiEvaluator& mi, std::vector<Check>& checks) {
  const double cap = mi.alphabet().capacity_bits();
  checks.push_back({"mi: I(0) = 0", mi.mutual_information(0.0) == 0.0, ""});

  bool bounded = true, monotone = true;
  double prev = -1.0;
  for (int k = 0; k < 100; ++k) {
    const double rho = 1e-3 * std::pow(1e6, k / 99.0);
    const double v = mi.mutual_information(rho);
    bounded = bounded && v >= 0.0 && v <= cap;
    if (k > 0 && prev > v + 1e-9) monotone = false;
    prev = v;
  }
  checks.push_back({"mi: 0 <= I <= log2 M", bounded, ""});
  checks.push_back({"mi: non-decreasing on log grid [1e-3, 1e3]", monotone, ""});

  double worst_curvature = -std::numeric_limits<double>::infinity();
  std::vector<double> v(201);
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = mi.mutual_information(0.1 * static_cast<double>(k));
  for (std::size_t k = 1; k + 1 < v.size(); ++k) worst_curvature = std::max(worst_curvature, v[k - 1] - 2 * v[k] + v[k + 1]);
  checks.push_back({"mi: concave on [0, 20]", worst_curvature <= 1e-7, fmt::format("max 2nd difference {:.3g}", worst_curvature)});

  double worst_round_trip = 0.0;
  for (int k = 0; k <= 25; ++k) {
    const double y = 0.99 * cap * k / 25.0;
    worst_round_trip = std::max(worst_round_trip, std::abs(mi.mutual_information(mi.inverse(y)) - y));
  }
  checks.push_back({"mi: inverse round trip", worst_round_trip <= 1e-8, fmt::format("max error {:.3g}", worst_round_trip)});
}

void perfect_checks(const Session& s, int J, std::vector<Check>& checks) {
  const double rate_cap = 0.5 * s.mi.alphabet().capacity_bits();
  // KKT power residuals scale with the bisection width; see verify_kkt.
  const double kkt_tol = std::max(1e-6, 1e3 * s.scenario.solver.bisect_tol);
  for (bool an : {true, false}) {
    const Scenario sc = s.scenario.with_eavesdroppers(J);
    const PerfectSweep sweep = sweep_R0(sc, s.mi, 20, an, s.threads);
    double worst_rank = 0.0, worst_kkt = 0.0, worst_violation = 0.0;
    bool rates_ok = true, kkt_ok = true, spot_ok = true, no_failure = true;
    for (const auto& p : sweep.points) {
      rates_ok = rates_ok && p.secrecy_rate >= 0.0 && p.secrecy_rate <= rate_cap;
      no_failure = no_failure && p.status != SolveStatus::SolverFailure;
      if (p.status != SolveStatus::Ok) continue;
      spot_ok = spot_ok && p.monotone_spot_check;
      worst_rank = std::max(worst_rank, p.rank_ratio);
      worst_violation = std::max(worst_violation, p.witness_violation);
      PowerConfig pw = sc.power;
      pw.Ps = p.Ps;
      const PerfectInstance inst = PerfectInstance::make(sc.channels, pw, s.mi, p.R0, an);
      const KktReport kkt = verify_kkt(p, inst, kkt_tol);
      kkt_ok = kkt_ok && kkt.passed;
      worst_kkt = std::max({worst_kkt, std::abs(kkt.destination_residual),
                            kkt.saturation_expected ? std::abs(kkt.power_residual) : 0.0});
    }
    const std::string tag = fmt::format("perfect J={} AN {}", J, an_label(an));
    checks.push_back({tag + ": no solver failures", no_failure, ""});
    checks.push_back({tag + ": 0 <= Rs <= log2 M / 2", rates_ok, ""});
    checks.push_back({tag + ": rank-one Phi", worst_rank <= 1e-6, fmt::format("max lambda2/lambda1 {:.3g}", worst_rank)});
    checks.push_back({tag + ": KKT residuals", kkt_ok, fmt::format("max residual {:.3g} (tol {:.3g})", worst_kkt, kkt_tol)});
    checks.push_back({tag + ": witness feasible", worst_violation <= 1e-6, fmt::format("max violation {:.3g}", worst_violation)});
    checks.push_back({tag + ": bisection spot checks", spot_ok, ""});
  }
}

void oracle_checks(const Session& s, int J, std::vector<Check>& checks) {
  if (s.scenario.relay_antennas() > 3) return;
  OracleConfig cfg;
  cfg.seed = s.seed;
  cfg.threads = s.threads;
  cfg.search_samples = 20'000;
  const Scenario sc = s.scenario.with_eavesdroppers(J);
  const PerfectInstance inst = PerfectInstance::make(sc.channels, sc.power, s.mi, kFig3R0, true);
  const SolveOutcome sdp = solve_rate(inst, s.mi, sc.solver);
  const auto found = beamformer_search(inst, cfg);
  const std::string tag = fmt::format("oracle J={} R0={}", J, kFig3R0);
  if (!found) {
    checks.push_back({tag + ": SDP and search agree on infeasibility", sdp.status != SolveStatus::Ok, ""});
    return;
  }
  checks.push_back({tag + ": SDP dominates search", sdp.t_max >= found->t - 1e-3,
                    fmt::format("t_sdp {:.9g}, t_search {:.9g}", sdp.t_max, found->t)});
}

void robust_checks(const Session& s, int J, std::vector<Check>& checks, std::vector<std::string>& notes) {
  const Scenario sc = s.scenario.with_eavesdroppers(J);
  const RobustInstance inst = RobustInstance::make(sc.channels, sc.radii, sc.power, s.mi, kFig3R0, true);
  const SolveOutcome o = solve_robust_rate(inst, s.mi, sc.solver);
  const std::string tag = fmt::format("robust J={} R0={}", J, kFig3R0);
  if (o.status == SolveStatus::RelayLinkUnusable) {
    notes.push_back(fmt::format("J={}: relay_link_unusable (CSI radius exceeds the source-relay estimate)", J));
    return;
  }
  checks.push_back({tag + ": no solver failure", o.status != SolveStatus::SolverFailure, to_string(o.status)});
  if (o.status != SolveStatus::Ok) {
    notes.push_back(fmt::format("J={}: robust status {}", J, to_string(o.status)));
    return;
  }
  checks.push_back({tag + ": rank-one Phi", o.rank_ratio <= 1e-6, fmt::format("lambda2/lambda1 {:.3g}", o.rank_ratio)});
  if (sc.radii.is_zero()) {
    const SolveOutcome p = solve_perfect_point(s.scenario, s.mi, J, kFig3R0, true);
    const double diff = std::abs(p.secrecy_rate - o.secrecy_rate);
    checks.push_back({tag + ": zero radius reduces to perfect CSI", diff <= 2.0 * sc.solver.bisect_tol,
                      fmt::format("|difference| {:.3g}", diff)});
    return;
  }
  OracleConfig cfg;
  cfg.seed = s.seed;
  cfg.threads = s.threads;
  const double v = replay_s_procedure(o, inst, cfg).max_violation();
  checks.push_back({tag + ": S-procedure replay", v <= 1e-6, fmt::format("max violation {:.3g}", v)});
}

int cmd_validate(Session& s) {
  std::vector<Check> checks;
  std::vector<std::string> notes;
  mi_checks(s.mi, checks);
  if (s.scenario.eavesdroppers() == 0) notes.push_back("no eavesdroppers: oracle and robust checks skipped");
  std::vector<int> counts = s.scenario.eavesdropper_subsets;
  if (counts.empty()) counts.push_back(0);
  for (int J : counts) {
    perfect_checks(s, J, checks);
    if (J > 0) {
      oracle_checks(s, J, checks);
      robust_checks(s, J, checks, notes);
    }
  }

  bool pass = true;
  json list = json::array();
  for (const auto& c : checks) {
    pass = pass && c.passed;
    s.out << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : "  [" + c.detail + "]") << '\n';
    list.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  }
  for (const auto& n : notes) s.out << "NOTE " << n << '\n';
  if (!s.out_path.empty()) {
    const json doc = {{"manifest", s.manifest.to_json()}, {"passed", pass}, {"checks", list}, {"notes", notes}};
    emit(s, s.out_path, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
  }
  return pass ? kOk : kFailure;
}

std::string join_command(const std::vector<std::string>& args) {
  std::string cmd = "secrelay";
  for (const auto& a : args) cmd += " " + a;
  return cmd;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Secrecy-rate beamforming for a decode-and-forward relay", "secrelay"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  // A repeated flag (before and after the subcommand) keeps the last value.
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  Globals g;
  app.add_option("--scenario", g.scenario, "Scenario JSON file")->capture_default_str();
  app.add_option("--out", g.out, "Output file (directory for fig2/fig3)");
  app.add_option("--seed", g.seed, "Oracle RNG seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads (0: hardware concurrency)")->capture_default_str();
  app.add_option("--quad-order", g.quad_order, "Gauss-Hermite nodes per axis (overrides scenario)");
  app.add_option("--bisect-tol", g.bisect_tol, "Relative bisection tolerance (overrides scenario)");

  MiTableArgs mi_args;
  auto* mi = app.add_subcommand("mi-table", "Tabulate I(rho) as CSV rho,I_bits")->fallthrough();
  mi->add_option("--alphabet", mi_args.alphabet, "Name (BPSK, QPSK, 8PSK, 16QAM) or JSON list of [re,im]");
  mi->add_option("--rho-min", mi_args.rho_min)->capture_default_str();
  mi->add_option("--rho-max", mi_args.rho_max)->capture_default_str();
  mi->add_option("--points", mi_args.points)->capture_default_str();
  mi->add_option("--spacing", mi_args.spacing, "linear or log")->capture_default_str();

  PerfectSweepArgs ps_args;
  auto* ps = app.add_subcommand("perfect-sweep", "Perfect-CSI secrecy rate over the R0 grid")->fallthrough();
  ps->add_option("--L", ps_args.L, "R0 grid intervals (default: scenario grid_L)");
  ps->add_option("--an", ps_args.an, "on, off or both")->capture_default_str();
  ps->add_option("--J", ps_args.J, "Eavesdropper counts (default: scenario J_subsets)");

  RobustSweepArgs rs_args;
  auto* rs = app.add_subcommand("robust-sweep", "Worst-case secrecy rate over CSI radii")->fallthrough();
  rs->add_option("--R0", rs_args.R0)->capture_default_str();
  rs->add_option("--eps-grid", rs_args.eps_grid, "lo:step:hi or comma list")->capture_default_str();
  rs->add_option("--an", rs_args.an, "on or off")->capture_default_str();
  rs->add_option("--J", rs_args.J, "Eavesdropper counts (default: scenario J_subsets)");

  Fig2Args f2_args;
  auto* f2 = app.add_subcommand("fig2", "Rs vs R0 curves for every J with and without AN")->fallthrough();
  f2->add_option("--L", f2_args.L, "R0 grid intervals (default: scenario grid_L)");

  Fig3Args f3_args;
  auto* f3 = app.add_subcommand("fig3", "Worst-case Rs vs CSI radius at fixed R0")->fallthrough();
  f3->add_option("--R0", f3_args.R0)->capture_default_str();
  f3->add_option("--eps-grid", f3_args.eps_grid, "lo:step:hi or comma list")->capture_default_str();

  OracleArgs oc_args;
  auto* oc = app.add_subcommand("oracle-check", "Brute-force cross-checks")->fallthrough();
  oc->add_option("--mode", oc_args.mode, "mi, search or worstcase")->capture_default_str();
  oc->add_option("--samples", oc_args.samples, "Sample count for the selected oracle");
  oc->add_option("--rho", oc_args.rho, "SNR list for mode mi")->capture_default_str();
  oc->add_option("--R0", oc_args.R0, "Common-message rate for search/worstcase")->capture_default_str();
  oc->add_option("--eps", oc_args.eps, "CSI radius for worstcase")->capture_default_str();
  oc->add_option("--an", oc_args.an, "on or off")->capture_default_str();

  auto* va = app.add_subcommand("validate", "Invariant suite; nonzero exit on any failure")->fallthrough();

  std::vector<std::string> argv_store{"secrelay"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kInputError;
  }

  try {
    Session s = open_session(g, join_command(args), out, err);
    if (mi->parsed()) return cmd_mi_table(s, mi_args);
    if (ps->parsed()) return cmd_perfect_sweep(s, ps_args);
    if (rs->parsed()) return cmd_robust_sweep(s, rs_args);
    if (f2->parsed()) return cmd_fig2(s, f2_args);
    if (f3->parsed()) return cmd_fig3(s, f3_args);
    if (oc->parsed()) return cmd_oracle_check(s, oc_args);
    if (va->parsed()) return cmd_validate(s);
  } catch (const InputError& e) {
    if (e.issues().size() <= 1) {
      err << "error: " << e.what() << '\n';
    } else {
      err << "error: " << e.issues().size() << " input problems\n";
      for (const auto& issue : e.issues()) err << "  " << issue << '\n';
    }
    return kInputError;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    err << "failure: " << e.what() << '\n';
    return kFailure;
  }
  return kInputError;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace secrelay::cli
