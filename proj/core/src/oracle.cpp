#include "secrelay/oracle.hpp"

#include <gsl/gsl_multimin.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <boost/math/tools/toms748_solve.hpp>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>
#include <random>

#include "secrelay/errors.hpp"
#include "secrelay/parallel.hpp"

namespace secrelay {
namespace {

constexpr std::int64_t kBatch = 1 << 15;

std::mt19937_64 batch_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t batch) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(batch),
                    static_cast<std::uint32_t>(batch >> 32)};
  return std::mt19937_64(seq);
}

CVector complex_gaussian(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = Complex(normal(rng), normal(rng));
  return v;
}

/// Uniform point of the complex ball of radius eps (2n real dimensions).
CVector uniform_in_ball(std::mt19937_64& rng, Eigen::Index n, double eps) {
  CVector v = complex_gaussian(rng, n);
  const double norm = v.norm();
  if (norm == 0.0) return CVector::Zero(n);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double radius = eps * std::pow(unit(rng), 1.0 / (2.0 * static_cast<double>(n)));
  return v * (radius / norm);
}

CVector uniform_on_sphere(std::mt19937_64& rng, Eigen::Index n, double eps) {
  CVector v = complex_gaussian(rng, n);
  const double norm = v.norm();
  return norm == 0.0 ? CVector::Zero(n) : CVector(v * (eps / norm));
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
CMatrix random_unitary(std::mt19937_64& rng, Eigen::Index n) {
  CMatrix g(n, n);
  for (Eigen::Index j = 0; j < n; ++j) g.col(j) = complex_gaussian(rng, n);
  Eigen::HouseholderQR<CMatrix> qr(g);
  CMatrix q = qr.householderQ();
  const CMatrix r = qr.matrixQR();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double mag = std::abs(r(i, i));
    if (mag > 0.0) q.col(i) *= r(i, i) / mag;
  }
  return q;
}

double quad(const CVector& row, const CMatrix& Q) { return (row.transpose() * Q * row.conjugate())(0).real(); }

// ---------------------------------------------------------------------------
// Beamformer search.

struct Directions {
  CVector phi_hat;  // unit norm
  CMatrix psi_hat;  // unit trace, PSD (zero when AN is off)
};

struct PowerSplit {
  double t = 0.0;
  double ps = 0.0;
  double pn = 0.0;
};

/// For fixed unit directions, the best split (ps, pn) of the relay power.
/// The largest admissible ps is a minimum of lines in pn, and the objective
/// ps * alpha / (N0 + pn beta) is monotone on each linear piece, so checking
/// the endpoints and all pairwise line crossings is exact.
PowerSplit best_split(const PerfectInstance& inst, const Directions& d) {
  const double a = inst.bounds.a;
  const double N0 = inst.N0;
  const double P = inst.Pr_max;
  const double alpha = quad(inst.h, d.phi_hat * d.phi_hat.adjoint());
  const double beta = inst.use_an ? quad(inst.h, d.psi_hat) : 0.0;

  struct Line {
    double u, v;  // ps <= u + v pn
  };
  std::vector<Line> lines;
  lines.push_back({P, -1.0});
  if (alpha > 0.0) {
    const double k = (inst.bounds.c - a) / alpha;
    lines.push_back({k * N0, k * beta});
  }
  if (std::isfinite(inst.rho_eav_cap)) {
    for (std::size_t j = 0; j < inst.z.size(); ++j) {
      const double gamma = quad(inst.z[j], d.phi_hat * d.phi_hat.adjoint());
      if (gamma <= 0.0) continue;
      const double delta = inst.use_an ? quad(inst.z[j], d.psi_hat) : 0.0;
      const double k = (inst.rho_eav_cap - inst.bounds.b[j]) / gamma;
      lines.push_back({k * N0, k * delta});
    }
  }

  std::vector<double> candidates{0.0};
  if (inst.use_an) {
    candidates.push_back(P);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      for (std::size_t j = i + 1; j < lines.size(); ++j) {
        const double dv = lines[i].v - lines[j].v;
        if (dv == 0.0) continue;
        const double x = (lines[j].u - lines[i].u) / dv;
        if (x > 0.0 && x < P) candidates.push_back(x);
      }
    }
  }

  PowerSplit best{a, 0.0, 0.0};
  for (double pn : candidates) {
    double ps = std::numeric_limits<double>::infinity();
    for (const auto& l : lines) ps = std::min(ps, l.u + l.v * pn);
    if (!(ps > 0.0)) continue;
    const double t = a + ps * alpha / (N0 + pn * beta);
    if (t > best.t) best = {t, ps, pn};
  }
  return best;
}

Directions random_directions(std::mt19937_64& rng, Eigen::Index n, bool use_an) {
  Directions d;
  d.phi_hat = complex_gaussian(rng, n);
  d.phi_hat /= d.phi_hat.norm();
  d.psi_hat = CMatrix::Zero(n, n);
  if (use_an) {
    const CMatrix u = random_unitary(rng, n);
    std::exponential_distribution<double> expo(1.0);
    RVector w(n);
    for (Eigen::Index i = 0; i < n; ++i) w(i) = expo(rng);
    w /= w.sum();
    d.psi_hat = u * w.cast<Complex>().asDiagonal() * u.adjoint();
  }
  return d;
}

/// Real parameter vector (phi raw, then B raw with Psi = B B^* / Tr) for the
/// Nelder-Mead polish.
std::vector<double> to_params(const Directions& d, bool use_an) {
  const Eigen::Index n = d.phi_hat.size();
  std::vector<double> x;
  for (Eigen::Index i = 0; i < n; ++i) {
    x.push_back(d.phi_hat(i).real());
    x.push_back(d.phi_hat(i).imag());
  }
  if (use_an) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(d.psi_hat);
    const CMatrix b = eig.eigenvectors() * eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().cast<Complex>().asDiagonal();
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        x.push_back(b(i, j).real());
        x.push_back(b(i, j).imag());
      }
    }
  }
  return x;
}

std::optional<Directions> from_params(const double* x, Eigen::Index n, bool use_an) {
  Directions d;
  d.phi_hat.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) d.phi_hat(i) = Complex(x[2 * i], x[2 * i + 1]);
  const double norm = d.phi_hat.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) return std::nullopt;
  d.phi_hat /= norm;
  d.psi_hat = CMatrix::Zero(n, n);
  if (use_an) {
    CMatrix b(n, n);
    const double* p = x + 2 * n;
    for (Eigen::Index j = 0; j < n; ++j) {
      for (Eigen::Index i = 0; i < n; ++i) {
        b(i, j) = Complex(p[0], p[1]);
        p += 2;
      }
    }
    const CMatrix psi = b * b.adjoint();
    const double tr = psi.trace().real();
    if (!(tr > 0.0) || !std::isfinite(tr)) return std::nullopt;
    d.psi_hat = psi / tr;
  }
  return d;
}

struct PolishContext {
  const PerfectInstance* inst;
  Eigen::Index n;
  std::int64_t evaluations = 0;
};

double polish_objective(const gsl_vector* v, void* params) {
  auto* ctx = static_cast<PolishContext*>(params);
  ++ctx->evaluations;
  const auto d = from_params(v->data, ctx->n, ctx->inst->use_an);
  if (!d) return 0.0;
  return -best_split(*ctx->inst, *d).t;
}

/// Nelder-Mead (GSL nmsimplex2) from `start`, restarted until no further gain.
std::vector<double> polish(PolishContext& ctx, std::vector<double> start) {
  const std::size_t dim = start.size();
  gsl_multimin_function f{&polish_objective, dim, &ctx};
  std::unique_ptr<gsl_multimin_fminimizer, decltype(&gsl_multimin_fminimizer_free)> minimizer(
      gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim), &gsl_multimin_fminimizer_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> x(gsl_vector_alloc(dim), &gsl_vector_free);
  std::unique_ptr<gsl_vector, decltype(&gsl_vector_free)> step(gsl_vector_alloc(dim), &gsl_vector_free);

  std::copy(start.begin(), start.end(), x->data);
  double best = polish_objective(x.get(), &ctx);
  for (int restart = 0; restart < 6; ++restart) {
    gsl_vector_set_all(step.get(), restart == 0 ? 0.1 : 0.02);
    gsl_multimin_fminimizer_set(minimizer.get(), &f, x.get(), step.get());
    for (int it = 0; it < 4000; ++it) {
      if (gsl_multimin_fminimizer_iterate(minimizer.get()) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(minimizer.get()), 1e-8) == GSL_SUCCESS) break;
    }
    const double value = gsl_multimin_fminimizer_minimum(minimizer.get());
    gsl_vector_memcpy(x.get(), gsl_multimin_fminimizer_x(minimizer.get()));
    const bool improved = value < best - 1e-12 * std::max(1.0, std::abs(best));
    best = std::min(best, value);
    if (!improved && restart > 0) break;
  }
  return std::vector<double>(x->data, x->data + dim);
}

// ---------------------------------------------------------------------------
// Trust-region subproblem: min y^H Q y + 2 Re(y^H b) over ||y|| <= eps.

CVector trust_region_min(const CMatrix& Q, const CVector& b, double eps) {
  const Eigen::Index n = Q.rows();
  if (eps == 0.0) return CVector::Zero(n);
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(0.5 * (Q + Q.adjoint()));
  const RVector& lam = eig.eigenvalues();
  const CMatrix& U = eig.eigenvectors();
  const CVector c = U.adjoint() * b;
  const double lmin = lam(0);
  const double scale = std::max({1.0, lam.cwiseAbs().maxCoeff(), b.norm()});

  auto solve_shifted = [&](double mu) {
    CVector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = -c(i) / (lam(i) + mu);
    return CVector(U * y);
  };

  if (lmin > 1e-14 * scale) {
    const CVector y = solve_shifted(0.0);
    if (y.norm() <= eps) return y;
  }

  const double tol_lam = 1e-12 * scale;
  double degenerate = 0.0;
  double rest = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (lam(i) - lmin <= tol_lam) {
      degenerate += std::norm(c(i));
    } else {
      rest += std::norm(c(i)) / ((lam(i) - lmin) * (lam(i) - lmin));
    }
  }
  if (lmin <= 0.0 && degenerate <= 1e-24 * scale * scale && rest <= eps * eps) {
    // Hard case: the boundary is reached along the bottom eigenvector.
    CVector y = CVector::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (lam(i) - lmin > tol_lam) y(i) = -c(i) / (lam(i) - lmin);
    }
    y(0) += std::sqrt(std::max(0.0, eps * eps - rest));
    return U * y;
  }

  const double lo = std::max(0.0, -lmin);
  auto secular = [&](double mu) {
    double phi = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double den = lam(i) + mu;
      if (den <= 0.0) return -1.0 / eps;
      phi += std::norm(c(i)) / (den * den);
    }
    return phi == 0.0 ? std::numeric_limits<double>::infinity() : 1.0 / std::sqrt(phi) - 1.0 / eps;
  };
  double hi = std::max(lo, b.norm() / eps - lmin) + 1e-12 * scale + 1e-300;
  while (secular(hi) < 0.0) hi = 2.0 * hi + 1.0;
  const double f_lo = secular(lo);
  if (f_lo >= 0.0) return solve_shifted(lo);
  std::uintmax_t iterations = 200;
  const auto root = boost::math::tools::toms748_solve(secular, lo, hi, f_lo, secular(hi),
                                                      boost::math::tools::eps_tolerance<double>(52), iterations);
  CVector y = solve_shifted(0.5 * (root.first + root.second));
  const double norm = y.norm();
  if (norm > eps) y *= eps / norm;
  return y;
}

}  // namespace

void OracleConfig::validate() const {
  if (mc_samples < 1000 || search_samples < 1000 || error_samples < 1000) {
    throw DomainError("OracleConfig: sample counts must be at least 1000");
  }
}

MonteCarloEstimate mi_monte_carlo(const Alphabet& alphabet, double rho, const OracleConfig& cfg) {
  cfg.validate();
  if (!(rho >= 0.0)) throw DomainError("mi_monte_carlo: rho must be nonnegative");
  const auto& symbols = alphabet.symbols();
  const int M = static_cast<int>(symbols.size());
  const double sqrt_rho = std::sqrt(rho);
  const double log2M = std::log2(static_cast<double>(M));
  const std::int64_t batches = (cfg.mc_samples + kBatch - 1) / kBatch;

  struct Partial {
    double sum = 0.0;
    double sum_sq = 0.0;
    std::int64_t count = 0;
  };
  std::vector<Partial> partials(static_cast<std::size_t>(batches));

  parallel_for(partials.size(), cfg.threads, [&](std::size_t batch) {
    auto rng = batch_rng(cfg.seed, 1, batch);
    std::uniform_int_distribution<int> pick(0, M - 1);
    std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    const std::int64_t begin = static_cast<std::int64_t>(batch) * kBatch;
    const std::int64_t end = std::min(cfg.mc_samples, begin + kBatch);
    Partial& p = partials[batch];
    std::vector<double> exponents(static_cast<std::size_t>(M));
    for (std::int64_t s = begin; s < end; ++s) {
      const int l = pick(rng);
      const Complex n(normal(rng), normal(rng));
      double top = -std::numeric_limits<double>::infinity();
      for (int m = 0; m < M; ++m) {
        const Complex d = n + sqrt_rho * (symbols[static_cast<std::size_t>(l)] - symbols[static_cast<std::size_t>(m)]);
        exponents[static_cast<std::size_t>(m)] = -std::norm(d) + std::norm(n);
        top = std::max(top, exponents[static_cast<std::size_t>(m)]);
      }
      double acc = 0.0;
      for (double e : exponents) acc += std::exp(e - top);
      const double value = log2M - (top + std::log(acc)) / std::log(2.0);
      p.sum += value;
      p.sum_sq += value * value;
      ++p.count;
    }
  });

  Partial total;
  for (const auto& p : partials) {
    total.sum += p.sum;
    total.sum_sq += p.sum_sq;
    total.count += p.count;
  }
  MonteCarloEstimate out;
  out.samples = total.count;
  out.estimate = total.sum / static_cast<double>(total.count);
  const double var = std::max(0.0, total.sum_sq / static_cast<double>(total.count) - out.estimate * out.estimate);
  out.std_error = std::sqrt(var / static_cast<double>(total.count));
  return out;
}

std::optional<BeamformerCandidate> beamformer_search(const PerfectInstance& inst, const OracleConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = inst.h.size();
  if (n > 3) throw DomainError("beamformer_search: supports at most 3 relay antennas");
  if (inst.apriori_infeasible() || !(inst.bounds.c > inst.bounds.a)) return std::nullopt;

  struct Scored {
    double t = -1.0;
    Directions d;
  };
  constexpr std::size_t kKeep = 4;
  const std::int64_t batches = (cfg.search_samples + kBatch - 1) / kBatch;
  std::vector<std::vector<Scored>> tops(static_cast<std::size_t>(batches));

  parallel_for(tops.size(), cfg.threads, [&](std::size_t batch) {
    auto rng = batch_rng(cfg.seed, 2, batch);
    const std::int64_t begin = static_cast<std::int64_t>(batch) * kBatch;
    const std::int64_t end = std::min(cfg.search_samples, begin + kBatch);
    auto& top = tops[batch];
    for (std::int64_t s = begin; s < end; ++s) {
      Directions d = random_directions(rng, n, inst.use_an);
      const double t = best_split(inst, d).t;
      if (top.size() < kKeep || t > top.back().t) {
        if (top.size() == kKeep) top.pop_back();
        auto pos = std::upper_bound(top.begin(), top.end(), t, [](double v, const Scored& x) { return v > x.t; });
        top.insert(pos, Scored{t, std::move(d)});
      }
    }
  });

  std::vector<Scored> seeds;
  for (auto& top : tops) {
    for (auto& s : top) seeds.push_back(std::move(s));
  }
  std::stable_sort(seeds.begin(), seeds.end(), [](const Scored& x, const Scored& y) { return x.t > y.t; });
  if (seeds.size() > kKeep) seeds.resize(kKeep);

  BeamformerCandidate best;
  best.t = -1.0;
  PolishContext ctx{&inst, n};
  for (const auto& s : seeds) {
    const auto x = polish(ctx, to_params(s.d, inst.use_an));
    const auto d = from_params(x.data(), n, inst.use_an);
    const Directions& dir = d ? *d : s.d;
    const PowerSplit split = best_split(inst, dir);
    if (split.t > best.t) {
      best.t = split.t;
      best.phi = dir.phi_hat * std::sqrt(split.ps);
      best.Psi = HermitianMatrix(dir.psi_hat * split.pn, 1e-9);
    }
  }
  best.evaluations = cfg.search_samples + ctx.evaluations;
  return best;
}

WorstCase worst_case_quadratic(const CMatrix& Q, const CVector& row, double constant, double eps,
                               Extremum extremum, const OracleConfig& cfg) {
  cfg.validate();
  if (!(eps >= 0.0)) throw DomainError("worst_case_quadratic: eps must be nonnegative");
  const Eigen::Index n = row.size();
  const double sign = extremum == Extremum::Min ? 1.0 : -1.0;
  auto value = [&](const CVector& e) { return constant + quad(CVector(row + e), Q); };

  WorstCase out;
  out.nominal = value(CVector::Zero(n));
  // e = y^H turns the form into y^H Q y + 2 Re(y^H Q conj(row)) + const.
  const CMatrix signed_q = sign * Q;
  const CVector y = trust_region_min(signed_q, CVector(signed_q * row.conjugate()), eps);
  out.error = y.conjugate();
  out.value = value(out.error);

  auto rng = batch_rng(cfg.seed, 3, 0);
  out.sampled = out.nominal;
  CVector best_sample = CVector::Zero(n);
  for (std::int64_t s = 0; s < cfg.error_samples; ++s) {
    const CVector e = (s % 2 == 0) ? uniform_on_sphere(rng, n, eps) : uniform_in_ball(rng, n, eps);
    const double v = value(e);
    if (sign * v < sign * out.sampled) {
      out.sampled = v;
      best_sample = e;
    }
  }
  if (sign * out.sampled < sign * out.value) {
    out.value = out.sampled;
    out.error = best_sample;
  }
  return out;
}

const char* to_string(ErrorSelector selector) noexcept {
  switch (selector) {
    case ErrorSelector::DestinationNumerator:
      return "destination numerator";
    case ErrorSelector::DestinationDenominator:
      return "destination denominator";
    case ErrorSelector::EavesdropperNumerator:
      return "eavesdropper numerator";
    case ErrorSelector::EavesdropperDenominator:
      return "eavesdropper denominator";
    case ErrorSelector::RelaySignal:
      return "relay signal at destination";
    case ErrorSelector::DestinationNoise:
      return "destination noise";
  }
  return "unknown";
}

WorstCase worst_case_error_search(ErrorSelector selector, int eavesdropper, const HermitianMatrix& Phi,
                                  const HermitianMatrix& Psi, const RobustInstance& inst, const OracleConfig& cfg) {
  const double a = inst.bounds.a;
  const double N0 = inst.N0;
  const CMatrix& phi = Phi.matrix();
  const CMatrix& psi = Psi.matrix();
  const CVector& h = inst.estimates.h;
  const double eps_h = inst.radii.eps_h;
  auto eav = [&]() -> std::size_t {
    if (eavesdropper < 0 || eavesdropper >= inst.estimates.eavesdroppers()) {
      throw DomainError("worst_case_error_search: eavesdropper index out of range");
    }
    return static_cast<std::size_t>(eavesdropper);
  };
  switch (selector) {
    case ErrorSelector::DestinationNumerator:
      return worst_case_quadratic(a * psi + phi, h, a * N0, eps_h, Extremum::Min, cfg);
    case ErrorSelector::DestinationDenominator:
      return worst_case_quadratic(psi, h, N0, eps_h, Extremum::Max, cfg);
    case ErrorSelector::RelaySignal:
      return worst_case_quadratic(phi, h, 0.0, eps_h, Extremum::Max, cfg);
    case ErrorSelector::DestinationNoise:
      return worst_case_quadratic(psi, h, N0, eps_h, Extremum::Min, cfg);
    case ErrorSelector::EavesdropperNumerator: {
      const std::size_t j = eav();
      const double b = inst.bounds.b[j];
      return worst_case_quadratic(b * psi + phi, inst.estimates.z[j], b * N0, inst.radii.eps_z[j], Extremum::Max,
                                  cfg);
    }
    case ErrorSelector::EavesdropperDenominator: {
      const std::size_t j = eav();
      return worst_case_quadratic(psi, inst.estimates.z[j], N0, inst.radii.eps_z[j], Extremum::Min, cfg);
    }
  }
  throw DomainError("worst_case_error_search: unknown selector");
}

double ReplayReport::max_violation() const {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& c : checks) worst = std::max(worst, c.violation);
  return checks.empty() ? 0.0 : worst;
}

ReplayReport replay_perfect(const SolveOutcome& outcome, const PerfectInstance& inst) {
  ReplayReport r;
  const CVector& phi = outcome.phi;
  const CMatrix& psi = outcome.Psi.matrix();
  auto signal = [&](const CVector& row) { return std::norm(row.dot(phi.conjugate())); };
  auto snr = [&](double base, const CVector& row) { return base + signal(row) / (inst.N0 + quad(row, psi)); };

  const double dest = snr(inst.bounds.a, inst.h);
  r.checks.push_back({"destination SNR >= t_max", outcome.t_max - dest});
  r.checks.push_back({"decodability", dest - inst.bounds.c});
  if (std::isfinite(inst.rho_eav_cap)) {
    for (std::size_t j = 0; j < inst.z.size(); ++j) {
      r.checks.push_back({"eavesdropper " + std::to_string(j + 1) + " SNR <= cap",
                          snr(inst.bounds.b[j], inst.z[j]) - inst.rho_eav_cap});
    }
  }
  r.checks.push_back({"relay power", phi.squaredNorm() + outcome.Psi.trace() - inst.Pr_max});
  return r;
}

ReplayReport replay_s_procedure(const SolveOutcome& outcome, const RobustInstance& inst, const OracleConfig& cfg) {
  cfg.validate();
  ReplayReport report;
  if (outcome.status != SolveStatus::Ok) return report;
  const CMatrix& phi = outcome.Phi.matrix();
  const CMatrix& psi = outcome.Psi.matrix();
  const Eigen::Index n = inst.estimates.h.size();
  const double a = inst.bounds.a;
  const double N0 = inst.N0;

  auto worst_over_ball = [&](const std::string& name, const CVector& row, double eps, std::uint64_t stream,
                             auto&& violation) {
    auto rng = batch_rng(cfg.seed, stream, 0);
    double worst = violation(row);
    for (std::int64_t s = 0; s < cfg.error_samples; ++s) {
      worst = std::max(worst, violation(CVector(row + uniform_in_ball(rng, n, eps))));
    }
    report.checks.push_back({name, worst});
  };

  const CVector& h = inst.estimates.h;
  const double eps_h = inst.radii.eps_h;
  const double r1 = outcome.scalar("r1"), r2 = outcome.scalar("r2");
  const double r3 = outcome.scalar("r3"), r4 = outcome.scalar("r4");
  worst_over_ball("destination numerator >= r1", h, eps_h, 10,
                  [&](const CVector& x) { return r1 - (a * N0 + quad(x, a * psi + phi)); });
  worst_over_ball("destination denominator <= r2", h, eps_h, 11,
                  [&](const CVector& x) { return N0 + quad(x, psi) - r2; });
  worst_over_ball("relay signal <= r3", h, eps_h, 12, [&](const CVector& x) { return quad(x, phi) - r3; });
  worst_over_ball("destination noise >= r4", h, eps_h, 13, [&](const CVector& x) { return r4 - (N0 + quad(x, psi)); });

  if (std::isfinite(inst.rho_eav_cap)) {
    for (int j = 0; j < inst.estimates.eavesdroppers(); ++j) {
      const auto idx = static_cast<std::size_t>(j);
      const std::string k = std::to_string(j + 1);
      const double b = inst.bounds.b[idx];
      const double s1 = outcome.scalar("s1_" + k), s2 = outcome.scalar("s2_" + k);
      const CVector& z = inst.estimates.z[idx];
      const double eps_z = inst.radii.eps_z[idx];
      worst_over_ball("eavesdropper " + k + " numerator <= s1", z, eps_z, 20 + 2 * idx,
                      [&](const CVector& x) { return b * N0 + quad(x, b * psi + phi) - s1; });
      worst_over_ball("eavesdropper " + k + " denominator >= s2", z, eps_z, 21 + 2 * idx,
                      [&](const CVector& x) { return s2 - (N0 + quad(x, psi)); });
    }
  }
  return report;
}

}  // namespace secrelay
