#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <thread>
#include <vector>

#include "secrelay/alphabet.hpp"
#include "secrelay/errors.hpp"
#include "secrelay/mutual_information.hpp"

using namespace secrelay;

namespace {

// BPSK I(rho) from adaptive 30-digit quadrature of the 1-D reduction.
struct Reference {
  double rho;
  double bits;
};
constexpr Reference kBpsk[] = {
    {0.5, 0.485944154132935}, {1.0, 0.721451590790388}, {2.0, 0.912822285774482}, {2.5, 0.950352824867201},
    {5.0, 0.99675632799003},  {10.0, 0.999983328240403}, {100.0, 1.0},
};

// Monte-Carlo estimate at rho = 1: 1e7 draws, seed 20240611.
constexpr double kV1 = 0.721485499;
constexpr double kV1Sigma = 2.308e-4;

void check_alphabet_invariants(const Alphabet& a) {
  Complex mean{0.0, 0.0};
  double power = 0.0;
  for (const auto& s : a.symbols()) {
    mean += s;
    power += std::norm(s);
  }
  const double M = a.size();
  CHECK(a.size() >= 2);
  CHECK(std::abs(mean / M) <= 1e-12);
  CHECK(std::abs(power / M - 1.0) <= 1e-12);
  for (int i = 0; i < a.size(); ++i) {
    for (int j = i + 1; j < a.size(); ++j) CHECK(std::abs(a.symbols()[i] - a.symbols()[j]) > 1e-6);
  }
}

}  // namespace

TEST_CASE("built-in alphabets are zero-mean, unit-power and distinct") {
  for (const char* name : {"BPSK", "QPSK", "8PSK", "16QAM", "bpsk"}) {
    CAPTURE(name);
    check_alphabet_invariants(Alphabet::by_name(name));
  }
  CHECK(Alphabet::bpsk().symbols() == std::vector<Complex>{{1.0, 0.0}, {-1.0, 0.0}});
  CHECK(Alphabet::psk(4).size() == 4);
  CHECK(Alphabet::qam16().capacity_bits() == doctest::Approx(4.0));
  CHECK_THROWS_AS(Alphabet::by_name("64APSK"), InputError);
  CHECK_THROWS_AS(Alphabet::psk(1), DomainError);
}

TEST_CASE("user alphabets are snapped within 1e-9 and rejected beyond") {
  const double s = 1.0 + 4e-10;
  const Alphabet snapped = Alphabet::from_points("near", {{s, 0.0}, {-s, 0.0}});
  check_alphabet_invariants(snapped);
  CHECK_THROWS_AS(Alphabet::from_points("far", {{1.01, 0.0}, {-1.01, 0.0}}), InputError);
  CHECK_THROWS_AS(Alphabet::from_points("biased", {{1.0, 0.1}, {-1.0, 0.1}}), InputError);
  CHECK_THROWS_AS(Alphabet::from_points("single", {{1.0, 0.0}}), InputError);
  CHECK_THROWS_AS(Alphabet::from_points("repeated", {{1.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {-1.0, 0.0}}), InputError);
}

TEST_CASE("Gauss-Hermite rule integrates low moments exactly") {
  const HermiteRule rule = gauss_hermite(48);
  double m0 = 0.0, m2 = 0.0, m4 = 0.0;
  for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
    const double x2 = rule.nodes[k] * rule.nodes[k];
    m0 += rule.weights[k];
    m2 += rule.weights[k] * x2;
    m4 += rule.weights[k] * x2 * x2;
  }
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  CHECK(m0 == doctest::Approx(sqrt_pi).epsilon(1e-13));
  CHECK(m2 == doctest::Approx(sqrt_pi / 2).epsilon(1e-13));
  CHECK(m4 == doctest::Approx(3 * sqrt_pi / 4).epsilon(1e-13));
}

TEST_CASE("I(rho) spot values") {
  const MiEvaluator mi(Alphabet::bpsk());
  CHECK(mi.mutual_information(0.0) == 0.0);
  CHECK(std::abs(mi.mutual_information(100.0) - 1.0) <= 1e-3);
  CHECK(mi.half_rate(0.0) == 0.0);
  CHECK(std::abs(mi.half_rate(100.0) - 0.5) <= 5e-4);
  CHECK(std::abs(mi.mutual_information(1.0) - kV1) <= 3 * kV1Sigma);
  CHECK(mi.half_rate(1.0) == doctest::Approx(mi.mutual_information(1.0) / 2));
  CHECK_THROWS_AS(mi.mutual_information(-1e-3), DomainError);
  CHECK_THROWS_AS(MiEvaluator(Alphabet::bpsk(), 8), DomainError);
}

TEST_CASE("order-48 quadrature against the high-precision reference") {
  const MiEvaluator mi(Alphabet::bpsk());
  for (const auto& r : kBpsk) {
    CAPTURE(r.rho);
    CHECK(std::abs(mi.mutual_information(r.rho) - r.bits) <= 5e-6);
  }
  // A finer rule converges onto the reference.
  const MiEvaluator fine(Alphabet::bpsk(), 128);
  for (const auto& r : kBpsk) {
    CAPTURE(r.rho);
    CHECK(std::abs(fine.mutual_information(r.rho) - r.bits) <= 1e-7);
  }
}

TEST_CASE("QPSK is two independent BPSK streams at half the SNR") {
  const MiEvaluator bpsk(Alphabet::bpsk(), 96);
  const MiEvaluator qpsk(Alphabet::psk(4), 96);
  for (double rho : {0.25, 1.0, 3.0, 8.0}) {
    CAPTURE(rho);
    CHECK(std::abs(qpsk.mutual_information(rho) - 2.0 * bpsk.mutual_information(rho / 2.0)) <= 1e-6);
  }
  CHECK(qpsk.mutual_information(1.0) == doctest::Approx(0.971888).epsilon(2e-6));
}

TEST_CASE("inverse") {
  const MiEvaluator mi(Alphabet::bpsk());
  CHECK(mi.inverse(0.0) == 0.0);
  CHECK(std::abs(mi.inverse(mi.mutual_information(2.5)) - 2.5) <= 1e-6);
  CHECK(std::abs(mi.inverse(2 * 0.0810) - 0.126091992621599) <= 1e-5);
  CHECK(mi.inverse(1.0) == std::numeric_limits<double>::infinity());
  CHECK(mi.inverse(1.5) == std::numeric_limits<double>::infinity());
  CHECK_THROWS_AS(mi.inverse(-0.1), DomainError);
}

TEST_CASE("invariants across alphabets") {
  for (const char* name : {"BPSK", "QPSK", "16QAM"}) {
    CAPTURE(name);
    const MiEvaluator mi(Alphabet::by_name(name));
    const double cap = mi.alphabet().capacity_bits();

    double prev = -1.0;
    for (int k = 0; k < 100; ++k) {
      const double rho = 1e-3 * std::pow(1e6, k / 99.0);
      const double v = mi.mutual_information(rho);
      CHECK(v >= 0.0);
      CHECK(v <= cap);
      CHECK(prev <= v + 1e-9);
      prev = v;
    }

    std::vector<double> grid(101);
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] = mi.mutual_information(0.2 * static_cast<double>(k));
    for (std::size_t k = 1; k + 1 < grid.size(); ++k) CHECK(grid[k - 1] - 2 * grid[k] + grid[k + 1] <= 1e-7);

    for (int k = 0; k <= 20; ++k) {
      const double y = 0.99 * cap * k / 20.0;
      CHECK(std::abs(mi.mutual_information(mi.inverse(y)) - y) <= 1e-8);
    }
  }
}

TEST_CASE("monotone table interpolates without overshoot") {
  const MiEvaluator mi(Alphabet::bpsk());
  std::vector<double> grid;
  for (int k = 0; k <= 200; ++k) grid.push_back(0.1 * k);
  const MonotoneTable table = mi.tabulate(grid);
  CHECK(table.min_rho() == 0.0);
  CHECK(table.max_rho() == 20.0);
  double prev = -1.0;
  for (int k = 0; k <= 400; ++k) {
    const double rho = 0.05 * k;
    const double v = table(rho);
    CHECK(v >= prev);
    CHECK(std::abs(v - mi.mutual_information(rho)) <= 2e-3);
    prev = v;
  }
  CHECK(table(2.5) == doctest::Approx(mi.mutual_information(2.5)).epsilon(1e-12));
  CHECK_THROWS_AS(table(20.5), DomainError);
  const std::vector<double> unsorted{0.0, 2.0, 1.0, 3.0};
  CHECK_THROWS_AS(mi.tabulate(unsorted), DomainError);
}

TEST_CASE("shared evaluator under concurrent readers and writers") {
  const MiEvaluator shared(Alphabet::qam16());
  MiEvaluator uncached(Alphabet::qam16());
  uncached.set_cache_enabled(false);
  std::vector<double> rho;
  for (int k = 1; k <= 64; ++k) rho.push_back(0.37 * k);
  // Workers overlap on half the points so the cache sees racing inserts.
  std::vector<std::vector<double>> got(4, std::vector<double>(rho.size(), -1.0));
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < 4; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t k = w % 2; k < rho.size(); k += 2) got[w][k] = shared.mutual_information(rho[k]);
    });
  }
  for (auto& t : pool) t.join();
  for (std::size_t w = 0; w < 4; ++w) {
    for (std::size_t k = w % 2; k < rho.size(); k += 2) CHECK(got[w][k] == uncached.mutual_information(rho[k]));
  }
  CHECK(shared.cache_size() == rho.size());
}
