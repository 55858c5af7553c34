#include "secrelay/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "secrelay/errors.hpp"

namespace secrelay {
namespace {

using nlohmann::json;

class FieldReader {
 public:
  explicit FieldReader(const json& doc) : doc_(doc) {}

  std::vector<std::string>& issues() { return issues_; }

  bool has(const char* key) const { return doc_.contains(key); }

  std::optional<Complex> complex_value(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      issues_.push_back(where + ": expected [re, im] pair");
      return std::nullopt;
    }
    return Complex(v[0].get<double>(), v[1].get<double>());
  }

  std::optional<CVector> complex_vector(const json& v, const std::string& where) {
    if (!v.is_array()) {
      issues_.push_back(where + ": expected a list of [re, im] pairs");
      return std::nullopt;
    }
    CVector out(static_cast<Eigen::Index>(v.size()));
    bool ok = true;
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto c = complex_value(v[i], where + "[" + std::to_string(i) + "]");
      if (c) {
        out(static_cast<Eigen::Index>(i)) = *c;
      } else {
        ok = false;
      }
    }
    if (!ok) return std::nullopt;
    return out;
  }

  std::optional<double> number(const char* key, bool required) {
    if (!doc_.contains(key)) {
      if (required) issues_.push_back(std::string(key) + ": missing");
      return std::nullopt;
    }
    if (!doc_[key].is_number()) {
      issues_.push_back(std::string(key) + ": expected a number");
      return std::nullopt;
    }
    return doc_[key].get<double>();
  }

  /// A power given either as "<key>_dB" or as {"<key>": {"value": v, "unit": "dB"|"linear"}}.
  std::optional<double> power(const std::string& key, bool required) {
    const std::string db_key = key + "_dB";
    if (doc_.contains(db_key)) {
      if (!doc_[db_key].is_number()) {
        issues_.push_back(db_key + ": expected a number");
        return std::nullopt;
      }
      return db_to_linear(doc_[db_key].get<double>());
    }
    if (doc_.contains(key)) {
      const json& v = doc_[key];
      if (v.is_object() && v.contains("value") && v["value"].is_number() && v.contains("unit") &&
          v["unit"].is_string()) {
        const std::string unit = v["unit"].get<std::string>();
        const double value = v["value"].get<double>();
        if (unit == "dB") return db_to_linear(value);
        if (unit == "linear") return value;
        issues_.push_back(key + ".unit: expected \"dB\" or \"linear\", got \"" + unit + "\"");
        return std::nullopt;
      }
      issues_.push_back(key + ": expected {\"value\": number, \"unit\": \"dB\"|\"linear\"}");
      return std::nullopt;
    }
    if (required) issues_.push_back(db_key + ": missing");
    return std::nullopt;
  }

 private:
  const json& doc_;
  std::vector<std::string> issues_;
};

std::pair<int, int> line_and_column(std::string_view text, std::size_t byte) {
  int line = 1;
  int col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

Alphabet read_alphabet(const json& v, FieldReader& reader) {
  if (v.is_string()) return Alphabet::by_name(v.get<std::string>());
  std::string name = "custom";
  const json* points = &v;
  if (v.is_object()) {
    if (v.contains("name") && v["name"].is_string()) name = v["name"].get<std::string>();
    if (!v.contains("points")) {
      if (v.contains("name")) return Alphabet::by_name(name);
      throw InputError("scenario", {"alphabet: object needs \"name\" or \"points\""});
    }
    points = &v["points"];
  }
  auto pts = reader.complex_vector(*points, "alphabet");
  if (!pts) throw InputError("scenario", reader.issues());
  return Alphabet::from_points(name, std::vector<Complex>(pts->data(), pts->data() + pts->size()));
}

}  // namespace

Scenario Scenario::with_eavesdroppers(int count) const {
  Scenario out = *this;
  out.channels = channels.first_eavesdroppers(count);
  out.radii = radii.first_eavesdroppers(count);
  return out;
}

Scenario Scenario::with_uniform_radius(double eps) const {
  Scenario out = *this;
  out.radii = UncertaintyRadii::uniform(eps, eavesdroppers());
  return out;
}

Scenario parse_scenario(std::string_view text, std::string source) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    std::ostringstream os;
    os << "line " << line << ", column " << col << ": " << e.what();
    throw InputError("scenario " + source, {os.str()});
  }
  if (!doc.is_object()) throw InputError("scenario " + source, {"top level must be a JSON object"});

  FieldReader rd(doc);
  Scenario sc;
  sc.source = std::move(source);

  if (doc.contains("alphabet")) {
    try {
      sc.alphabet = read_alphabet(doc["alphabet"], rd);
    } catch (const InputError& e) {
      for (const auto& issue : e.issues()) rd.issues().push_back("alphabet: " + issue);
    }
  }

  const auto n = rd.number("N", true);
  const auto j = rd.number("J", true);
  if (n && (*n < 1 || std::floor(*n) != *n)) rd.issues().push_back("N: must be a positive integer");
  if (j && (*j < 1 || std::floor(*j) != *j)) {
    rd.issues().push_back("J: at least one eavesdropper is required");
  }

  auto require = [&](const char* key) -> const json* {
    if (!doc.contains(key)) {
      rd.issues().push_back(std::string(key) + ": missing");
      return nullptr;
    }
    return &doc[key];
  };

  if (const json* v = require("g")) {
    if (auto g = rd.complex_vector(*v, "g")) sc.channels.g = *g;
  }
  if (const json* v = require("h")) {
    if (auto h = rd.complex_vector(*v, "h")) sc.channels.h = *h;
  }
  if (const json* v = require("h0")) {
    if (auto h0 = rd.complex_value(*v, "h0")) sc.channels.h0 = *h0;
  }
  if (const json* v = require("z0")) {
    if (auto z0 = rd.complex_vector(*v, "z0")) {
      sc.channels.z0.assign(z0->data(), z0->data() + z0->size());
    }
  }
  if (const json* v = require("z")) {
    if (!v->is_array()) {
      rd.issues().push_back("z: expected a list of complex vectors");
    } else {
      for (std::size_t k = 0; k < v->size(); ++k) {
        if (auto zk = rd.complex_vector((*v)[k], "z[" + std::to_string(k) + "]")) {
          sc.channels.z.push_back(*zk);
        } else {
          sc.channels.z.emplace_back();
        }
      }
    }
  }

  if (n) {
    const auto nn = static_cast<Eigen::Index>(*n);
    if (sc.channels.g.size() != 0 && sc.channels.g.size() != nn) {
      rd.issues().push_back("g: length " + std::to_string(sc.channels.g.size()) + " != N=" + std::to_string(nn));
    }
    if (sc.channels.h.size() != 0 && sc.channels.h.size() != nn) {
      rd.issues().push_back("h: length " + std::to_string(sc.channels.h.size()) + " != N=" + std::to_string(nn));
    }
    for (std::size_t k = 0; k < sc.channels.z.size(); ++k) {
      if (sc.channels.z[k].size() != nn) {
        rd.issues().push_back("z[" + std::to_string(k) + "]: length " + std::to_string(sc.channels.z[k].size()) +
                              " != N=" + std::to_string(nn));
      }
    }
  }
  if (j) {
    const auto jj = static_cast<std::size_t>(*j);
    if (doc.contains("z0") && sc.channels.z0.size() != jj) {
      rd.issues().push_back("z0: " + std::to_string(sc.channels.z0.size()) + " entries != J=" + std::to_string(jj));
    }
    if (doc.contains("z") && sc.channels.z.size() != jj) {
      rd.issues().push_back("z: " + std::to_string(sc.channels.z.size()) + " entries != J=" + std::to_string(jj));
    }
  }

  const auto ps_max = rd.power("Ps_max", true);
  const auto ps = rd.power("Ps", false);
  const auto pr_max = rd.power("Pr_max", true);
  const auto n0 = rd.number("N0", true);
  if (ps_max) sc.power.Ps_max = *ps_max;
  sc.power.Ps = ps ? *ps : sc.power.Ps_max;
  if (pr_max) sc.power.Pr_max = *pr_max;
  if (n0) sc.power.N0 = *n0;

  const int eav = j ? static_cast<int>(*j) : 0;
  if (doc.contains("eps_all")) {
    if (doc["eps_all"].is_number()) {
      sc.radii = UncertaintyRadii::uniform(doc["eps_all"].get<double>(), eav);
    } else {
      rd.issues().push_back("eps_all: expected a number");
    }
  } else if (doc.contains("radii")) {
    const json& r = doc["radii"];
    if (!r.is_object()) {
      rd.issues().push_back("radii: expected an object");
    } else {
      sc.radii = UncertaintyRadii::uniform(0.0, eav);
      auto scalar = [&](const char* key, double& out) {
        if (!r.contains(key)) return;
        if (r[key].is_number()) {
          out = r[key].get<double>();
        } else {
          rd.issues().push_back(std::string("radii.") + key + ": expected a number");
        }
      };
      auto list = [&](const char* key, std::vector<double>& out) {
        if (!r.contains(key)) return;
        if (r[key].is_number()) {
          out.assign(eav, r[key].get<double>());
        } else if (r[key].is_array() && std::all_of(r[key].begin(), r[key].end(),
                                                     [](const json& x) { return x.is_number(); })) {
          out = r[key].get<std::vector<double>>();
        } else {
          rd.issues().push_back(std::string("radii.") + key + ": expected a number or list of numbers");
        }
      };
      scalar("eps_g", sc.radii.eps_g);
      scalar("eps_h0", sc.radii.eps_h0);
      scalar("eps_h", sc.radii.eps_h);
      list("eps_z0", sc.radii.eps_z0);
      list("eps_z", sc.radii.eps_z);
    }
  } else {
    sc.radii = UncertaintyRadii::uniform(0.0, eav);
  }

  if (doc.contains("solver")) {
    const json& s = doc["solver"];
    if (!s.is_object()) {
      rd.issues().push_back("solver: expected an object");
    } else {
      auto num = [&](const char* key, auto& out) {
        if (!s.contains(key)) return;
        if (!s[key].is_number()) {
          rd.issues().push_back(std::string("solver.") + key + ": expected a number");
          return;
        }
        out = s[key].get<std::decay_t<decltype(out)>>();
      };
      num("bisect_tol", sc.solver.bisect_tol);
      num("feas_tol", sc.solver.feas_tol);
      num("grid_L", sc.solver.grid_L);
      num("grid_K", sc.solver.grid_K);
      num("quad_order", sc.solver.quad_order);
      num("max_iterations", sc.solver.max_iterations);
      if (!(sc.solver.bisect_tol > 0.0)) rd.issues().push_back("solver.bisect_tol: must be > 0");
      if (!(sc.solver.feas_tol > 0.0 && sc.solver.feas_tol <= 1e-3)) {
        rd.issues().push_back("solver.feas_tol: must lie in (0, 1e-3]");
      }
      if (sc.solver.grid_L < 1) rd.issues().push_back("solver.grid_L: must be >= 1");
      if (sc.solver.grid_K < 1) rd.issues().push_back("solver.grid_K: must be >= 1");
      if (sc.solver.quad_order < 16) rd.issues().push_back("solver.quad_order: must be >= 16");
    }
  }

  if (doc.contains("J_subsets")) {
    const json& v = doc["J_subsets"];
    if (v.is_array() && std::all_of(v.begin(), v.end(), [](const json& x) { return x.is_number_integer(); })) {
      sc.eavesdropper_subsets = v.get<std::vector<int>>();
      for (int count : sc.eavesdropper_subsets) {
        if (count < 1 || count > eav) {
          rd.issues().push_back("J_subsets: entry " + std::to_string(count) + " outside [1, J]");
        }
      }
    } else {
      rd.issues().push_back("J_subsets: expected a list of integers");
    }
  }
  if (sc.eavesdropper_subsets.empty() && eav > 0) sc.eavesdropper_subsets.push_back(eav);

  // Structural validation of the assembled pieces, collecting everything.
  auto absorb = [&](auto&& fn) {
    try {
      fn();
    } catch (const InputError& e) {
      for (const auto& issue : e.issues()) rd.issues().push_back(issue);
    }
  };
  // Channel checks assume the shapes parsed cleanly; power and radii do not.
  if (rd.issues().empty()) absorb([&] { sc.channels.validate(); });
  absorb([&] { sc.power.validate(); });
  absorb([&] { sc.radii.validate(eav); });
  if (!rd.issues().empty()) throw InputError("scenario " + sc.source, rd.issues());
  return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("scenario " + path.string(), {"cannot open file"});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

std::string scenario_to_json(const Scenario& sc) {
  auto cplx = [](const Complex& c) { return json::array({c.real(), c.imag()}); };
  auto vec = [&](const CVector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(cplx(v(i)));
    return out;
  };
  json doc;
  doc["N"] = sc.relay_antennas();
  doc["J"] = sc.eavesdroppers();
  json pts = json::array();
  for (const auto& a : sc.alphabet.symbols()) pts.push_back(cplx(a));
  doc["alphabet"] = {{"name", sc.alphabet.name()}, {"points", pts}};
  doc["g"] = vec(sc.channels.g);
  doc["h0"] = cplx(sc.channels.h0);
  doc["h"] = vec(sc.channels.h);
  doc["z0"] = json::array();
  for (const auto& z0 : sc.channels.z0) doc["z0"].push_back(cplx(z0));
  doc["z"] = json::array();
  for (const auto& z : sc.channels.z) doc["z"].push_back(vec(z));
  doc["Ps"] = {{"value", sc.power.Ps}, {"unit", "linear"}};
  doc["Ps_max"] = {{"value", sc.power.Ps_max}, {"unit", "linear"}};
  doc["Pr_max"] = {{"value", sc.power.Pr_max}, {"unit", "linear"}};
  doc["N0"] = sc.power.N0;
  doc["radii"] = {{"eps_g", sc.radii.eps_g},   {"eps_h0", sc.radii.eps_h0}, {"eps_h", sc.radii.eps_h},
                  {"eps_z0", sc.radii.eps_z0}, {"eps_z", sc.radii.eps_z}};
  doc["solver"] = {{"bisect_tol", sc.solver.bisect_tol}, {"feas_tol", sc.solver.feas_tol},
                   {"grid_L", sc.solver.grid_L},         {"grid_K", sc.solver.grid_K},
                   {"quad_order", sc.solver.quad_order}, {"max_iterations", sc.solver.max_iterations}};
  doc["J_subsets"] = sc.eavesdropper_subsets;
  return doc.dump(2);
}

}  // namespace secrelay
