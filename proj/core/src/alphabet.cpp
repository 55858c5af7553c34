#include "secrelay/alphabet.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <sstream>

#include "secrelay/errors.hpp"

namespace secrelay {
namespace {

constexpr double kSnapTolerance = 1e-9;
constexpr double kDistinctTolerance = 1e-9;

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

}  // namespace

Alphabet Alphabet::bpsk() { return Alphabet("BPSK", {Complex(1.0, 0.0), Complex(-1.0, 0.0)}); }

Alphabet Alphabet::psk(int m) {
  if (m < 2) throw DomainError("psk: order must be >= 2");
  if (m == 2) return bpsk();
  std::vector<Complex> pts;
  pts.reserve(m);
  for (int k = 0; k < m; ++k) {
    const double angle = std::numbers::pi * (2.0 * k + 1.0) / m;
    pts.emplace_back(std::cos(angle), std::sin(angle));
  }
  return Alphabet(m == 4 ? "QPSK" : std::to_string(m) + "PSK", std::move(pts));
}

Alphabet Alphabet::qam16() {
  std::vector<Complex> pts;
  const double scale = 1.0 / std::sqrt(10.0);
  for (int i : {-3, -1, 1, 3}) {
    for (int q : {-3, -1, 1, 3}) pts.emplace_back(i * scale, q * scale);
  }
  return Alphabet("16QAM", std::move(pts));
}

Alphabet Alphabet::by_name(std::string_view name) {
  const std::string key = upper(name);
  if (key == "BPSK") return bpsk();
  if (key == "QPSK" || key == "4PSK") return psk(4);
  if (key == "8PSK") return psk(8);
  if (key == "16QAM" || key == "QAM16") return qam16();
  throw InputError("alphabet", {"unknown alphabet name '" + std::string(name) + "'"});
}

Alphabet Alphabet::from_points(std::string name, std::vector<Complex> points) {
  std::vector<std::string> issues;
  if (points.size() < 2) {
    issues.push_back("needs at least 2 symbols, got " + std::to_string(points.size()));
    throw InputError("alphabet '" + name + "'", issues);
  }
  for (const auto& p : points) {
    if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
      throw InputError("alphabet '" + name + "'", {"non-finite symbol"});
    }
  }
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      if (std::abs(points[i] - points[j]) <= kDistinctTolerance) {
        std::ostringstream os;
        os << "symbols " << i << " and " << j << " coincide";
        issues.push_back(os.str());
      }
    }
  }

  const double m = static_cast<double>(points.size());
  Complex mean(0.0, 0.0);
  for (const auto& p : points) mean += p;
  mean /= m;
  double power = 0.0;
  for (const auto& p : points) power += std::norm(p);
  power /= m;

  if (std::abs(mean) > kSnapTolerance) {
    std::ostringstream os;
    os << "mean " << std::abs(mean) << " is not zero";
    issues.push_back(os.str());
  }
  if (std::abs(power - 1.0) > kSnapTolerance) {
    std::ostringstream os;
    os << "average power " << power << " is not one";
    issues.push_back(os.str());
  }
  if (!issues.empty()) throw InputError("alphabet '" + name + "'", issues);

  // Snap: remove the residual mean, then rescale to unit power.
  for (auto& p : points) p -= mean;
  double centered_power = 0.0;
  for (const auto& p : points) centered_power += std::norm(p);
  centered_power /= m;
  const double scale = 1.0 / std::sqrt(centered_power);
  for (auto& p : points) p *= scale;

  return Alphabet(std::move(name), std::move(points));
}

double Alphabet::capacity_bits() const { return std::log2(static_cast<double>(symbols_.size())); }

}  // namespace secrelay
