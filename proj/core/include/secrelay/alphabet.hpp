#pragma once

#include <complex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace secrelay {

using Complex = std::complex<double>;

/// Finite complex input constellation with zero mean and unit average power.
///
/// Instances are only constructible through the factories below, which
/// validate (and, within 1e-9, re-normalize) the points.
class Alphabet {
 public:
  /// {+1, -1}
  static Alphabet bpsk();
  /// Unit-circle M-PSK with the first point at angle pi/M (QPSK: (+-1 +-i)/sqrt 2).
  static Alphabet psk(int m);
  /// Square 16-QAM scaled to unit power.
  static Alphabet qam16();

  /// Looks up "BPSK", "QPSK", "8PSK", "16QAM" (case-insensitive).
  static Alphabet by_name(std::string_view name);

  /// Validates user-supplied points. Points whose mean is within 1e-9 of zero
  /// and whose power is within 1e-9 of one are snapped onto the invariant;
  /// anything further off is rejected with InputError.
  static Alphabet from_points(std::string name, std::vector<Complex> points);

  const std::string& name() const noexcept { return name_; }
  const std::vector<Complex>& symbols() const noexcept { return symbols_; }
  int size() const noexcept { return static_cast<int>(symbols_.size()); }
  /// log2(M), the entropy ceiling of the mutual information.
  double capacity_bits() const;

 private:
  Alphabet(std::string name, std::vector<Complex> symbols)
      : name_(std::move(name)), symbols_(std::move(symbols)) {}

  std::string name_;
  std::vector<Complex> symbols_;
};

}  // namespace secrelay
