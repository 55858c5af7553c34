#pragma once

#include <Eigen/Core>
#include <complex>
#include <vector>

namespace secrelay {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

/// Complex gains of the two-hop network. Row channels (h, z_j) are stored as
/// plain coefficient vectors; quadratic forms interpret them as 1xN rows.
struct ChannelSet {
  CVector g;               ///< source -> relay, N
  Complex h0;              ///< source -> destination
  CVector h;               ///< relay -> destination, N
  std::vector<Complex> z0; ///< source -> eavesdropper j
  std::vector<CVector> z;  ///< relay -> eavesdropper j, N each

  int relay_antennas() const noexcept { return static_cast<int>(g.size()); }
  int eavesdroppers() const noexcept { return static_cast<int>(z0.size()); }

  /// The same network restricted to eavesdroppers 0..count-1.
  ChannelSet first_eavesdroppers(int count) const;

  /// Throws InputError listing every dimension or finiteness violation.
  void validate() const;
};

struct PowerConfig {
  double Ps = 1.0;      ///< source transmit power (linear)
  double Ps_max = 1.0;  ///< source budget P_S
  double Pr_max = 1.0;  ///< relay budget P_R
  double N0 = 1.0;      ///< noise power

  void validate() const;
};

/// Norm bounds on the CSI errors of each link.
struct UncertaintyRadii {
  double eps_g = 0.0;
  double eps_h0 = 0.0;
  double eps_h = 0.0;
  std::vector<double> eps_z0;
  std::vector<double> eps_z;

  /// Every radius equal to `eps`.
  static UncertaintyRadii uniform(double eps, int eavesdroppers);

  bool is_zero() const noexcept;
  UncertaintyRadii first_eavesdroppers(int count) const;
  void validate(int eavesdroppers) const;
};

/// Scalar SNR terms contributed by the direct links and the first hop.
struct ScalarBounds {
  double a = 0.0;        ///< source -> destination SNR (worst case when robust)
  double c = 0.0;        ///< source -> relay SNR (worst case when robust)
  double a_max = 0.0;    ///< best-case source -> destination SNR
  std::vector<double> b; ///< source -> eavesdropper SNRs (best case when robust)
};

double db_to_linear(double db);
double linear_to_db(double linear);

/// a = Ps|h0|^2/N0, b_j = Ps|z0j|^2/N0, c = Ps||g||^2/N0, a_max = a.
ScalarBounds scalar_bounds_perfect(const ChannelSet& ch, const PowerConfig& pw);

/// Worst/best-case bounds over the uncertainty balls around the estimates:
/// a and c deflate the estimate magnitude by the radius (clamped to 0 when the
/// radius exceeds it), b_j and a_max inflate it.
ScalarBounds scalar_bounds_robust(const ChannelSet& estimates, const UncertaintyRadii& radii,
                                  const PowerConfig& pw);

/// h X h^* for a row channel h.
double quad_form(const CVector& row, const Eigen::MatrixXcd& x);

}  // namespace secrelay
