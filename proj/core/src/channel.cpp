#include "secrelay/channel.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "secrelay/errors.hpp"

namespace secrelay {
namespace {

bool finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

bool finite(const CVector& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!finite(v(i))) return false;
  }
  return true;
}

}  // namespace

ChannelSet ChannelSet::first_eavesdroppers(int count) const {
  if (count < 0 || count > eavesdroppers()) {
    throw DomainError("first_eavesdroppers: count " + std::to_string(count) + " out of range [0, " +
                      std::to_string(eavesdroppers()) + "]");
  }
  ChannelSet out = *this;
  out.z0.resize(count);
  out.z.resize(count);
  return out;
}

void ChannelSet::validate() const {
  std::vector<std::string> issues;
  const Eigen::Index n = g.size();
  if (n < 1) issues.push_back("g: relay must have at least one antenna");
  if (h.size() != n) {
    issues.push_back("h: length " + std::to_string(h.size()) + " != N=" + std::to_string(n));
  }
  if (z.size() != z0.size()) {
    issues.push_back("z: " + std::to_string(z.size()) + " eavesdropper vectors but " +
                     std::to_string(z0.size()) + " direct gains z0");
  }
  for (std::size_t j = 0; j < z.size(); ++j) {
    if (z[j].size() != n) {
      issues.push_back("z[" + std::to_string(j) + "]: length " + std::to_string(z[j].size()) +
                       " != N=" + std::to_string(n));
    }
    if (!finite(z[j])) issues.push_back("z[" + std::to_string(j) + "]: non-finite entry");
  }
  if (!finite(g)) issues.push_back("g: non-finite entry");
  if (!finite(h)) issues.push_back("h: non-finite entry");
  if (!finite(h0)) issues.push_back("h0: non-finite");
  for (std::size_t j = 0; j < z0.size(); ++j) {
    if (!finite(z0[j])) issues.push_back("z0[" + std::to_string(j) + "]: non-finite");
  }
  if (!issues.empty()) throw InputError("channel set", std::move(issues));
}

void PowerConfig::validate() const {
  std::vector<std::string> issues;
  auto num = [](double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  };
  if (!(Ps >= 0.0)) issues.push_back("Ps must be >= 0, got " + num(Ps));
  if (!(Ps <= Ps_max * (1.0 + 1e-12))) issues.push_back("Ps=" + num(Ps) + " exceeds Ps_max=" + num(Ps_max));
  if (!(Pr_max > 0.0) || !std::isfinite(Pr_max)) issues.push_back("Pr_max must be > 0, got " + num(Pr_max));
  if (!(N0 > 0.0) || !std::isfinite(N0)) issues.push_back("N0 must be > 0, got " + num(N0));
  if (!issues.empty()) throw InputError("power config", std::move(issues));
}

UncertaintyRadii UncertaintyRadii::uniform(double eps, int eavesdroppers) {
  UncertaintyRadii r;
  r.eps_g = r.eps_h0 = r.eps_h = eps;
  r.eps_z0.assign(eavesdroppers, eps);
  r.eps_z.assign(eavesdroppers, eps);
  return r;
}

bool UncertaintyRadii::is_zero() const noexcept {
  if (eps_g != 0.0 || eps_h0 != 0.0 || eps_h != 0.0) return false;
  for (double e : eps_z0) {
    if (e != 0.0) return false;
  }
  for (double e : eps_z) {
    if (e != 0.0) return false;
  }
  return true;
}

UncertaintyRadii UncertaintyRadii::first_eavesdroppers(int count) const {
  UncertaintyRadii out = *this;
  out.eps_z0.resize(count);
  out.eps_z.resize(count);
  return out;
}

void UncertaintyRadii::validate(int eavesdroppers) const {
  std::vector<std::string> issues;
  auto check = [&](const std::string& name, double v) {
    if (!(v >= 0.0) || !std::isfinite(v)) issues.push_back(name + " must be a finite value >= 0");
  };
  check("eps_g", eps_g);
  check("eps_h0", eps_h0);
  check("eps_h", eps_h);
  if (static_cast<int>(eps_z0.size()) != eavesdroppers) {
    issues.push_back("eps_z0: expected " + std::to_string(eavesdroppers) + " radii");
  }
  if (static_cast<int>(eps_z.size()) != eavesdroppers) {
    issues.push_back("eps_z: expected " + std::to_string(eavesdroppers) + " radii");
  }
  for (std::size_t j = 0; j < eps_z0.size(); ++j) check("eps_z0[" + std::to_string(j) + "]", eps_z0[j]);
  for (std::size_t j = 0; j < eps_z.size(); ++j) check("eps_z[" + std::to_string(j) + "]", eps_z[j]);
  if (!issues.empty()) throw InputError("uncertainty radii", std::move(issues));
}

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

double linear_to_db(double linear) {
  if (!(linear > 0.0)) throw DomainError("linear_to_db: value must be positive");
  return 10.0 * std::log10(linear);
}

ScalarBounds scalar_bounds_perfect(const ChannelSet& ch, const PowerConfig& pw) {
  ScalarBounds sb;
  sb.a = pw.Ps * std::norm(ch.h0) / pw.N0;
  sb.c = pw.Ps * ch.g.squaredNorm() / pw.N0;
  sb.a_max = sb.a;
  sb.b.reserve(ch.z0.size());
  for (const auto& z0j : ch.z0) sb.b.push_back(pw.Ps * std::norm(z0j) / pw.N0);
  return sb;
}

ScalarBounds scalar_bounds_robust(const ChannelSet& est, const UncertaintyRadii& radii, const PowerConfig& pw) {
  // (|x| -/+ eps)^2, falling back to the squared magnitude itself at eps = 0 so
  // zero radii reproduce the perfect-CSI bounds bit for bit.
  auto shrink = [](double mag2, double eps) {
    if (eps == 0.0) return mag2;
    const double mag = std::sqrt(mag2);
    return mag > eps ? (mag - eps) * (mag - eps) : 0.0;
  };
  auto grow = [](double mag2, double eps) {
    if (eps == 0.0) return mag2;
    const double mag = std::sqrt(mag2) + eps;
    return mag * mag;
  };

  ScalarBounds sb;
  sb.a = pw.Ps * shrink(std::norm(est.h0), radii.eps_h0) / pw.N0;
  sb.c = pw.Ps * shrink(est.g.squaredNorm(), radii.eps_g) / pw.N0;
  sb.a_max = pw.Ps * grow(std::norm(est.h0), radii.eps_h0) / pw.N0;
  sb.b.reserve(est.z0.size());
  for (std::size_t j = 0; j < est.z0.size(); ++j) {
    const double eps = j < radii.eps_z0.size() ? radii.eps_z0[j] : 0.0;
    sb.b.push_back(pw.Ps * grow(std::norm(est.z0[j]), eps) / pw.N0);
  }
  return sb;
}

double quad_form(const CVector& row, const Eigen::MatrixXcd& x) {
  return (row.transpose() * x * row.conjugate()).value().real();
}

}  // namespace secrelay
