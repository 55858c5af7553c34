#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "secrelay/alphabet.hpp"
#include "secrelay/channel.hpp"

namespace secrelay {

struct SolverSettings {
  /// Bisection stopping width, relative to the initial interval [0, c].
  double bisect_tol = 1e-6;
  /// Minimum constraint slack that counts as strictly feasible.
  double feas_tol = 1e-7;
  /// R0 grid size (R0 = l * R_D / L, l = 0..L).
  int grid_L = 200;
  /// Source power grid size; 1 means "use the scenario's Ps".
  int grid_K = 1;
  int quad_order = 48;
  /// Newton-step cap of one feasibility solve.
  int max_iterations = 200;
};

struct Scenario {
  std::string source = "<inline>";
  Alphabet alphabet = Alphabet::bpsk();
  ChannelSet channels;
  PowerConfig power;
  UncertaintyRadii radii;
  SolverSettings solver;
  /// Eavesdropper prefixes (J values) swept by the multi-curve commands.
  std::vector<int> eavesdropper_subsets;

  int relay_antennas() const noexcept { return channels.relay_antennas(); }
  int eavesdroppers() const noexcept { return channels.eavesdroppers(); }

  /// Copy restricted to the first `count` eavesdroppers.
  Scenario with_eavesdroppers(int count) const;
  /// Copy with every CSI radius set to `eps`.
  Scenario with_uniform_radius(double eps) const;
};

/// Parses and validates a scenario document. Syntax errors report line and
/// column; semantic errors list every failing field. Both throw InputError.
Scenario parse_scenario(std::string_view json_text, std::string source = "<inline>");
Scenario load_scenario(const std::filesystem::path& path);

/// Serializes back to the document format (linear powers carried as dB).
std::string scenario_to_json(const Scenario& scenario);

}  // namespace secrelay
