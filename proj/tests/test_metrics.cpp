#include <cmath>
#include <random>

#include "doctest.h"
#include "gibbsbp/metrics.hpp"
#include "test_support.hpp"

using namespace gibbsbp;
using namespace gibbsbp::testing;

namespace {

const ComplexMatrix kZero{{1, 0}, {0, 0}};
const ComplexMatrix kOne{{0, 0}, {0, 1}};
const ComplexMatrix kPlus{{0.5, 0.5}, {0.5, 0.5}};
const ComplexMatrix kMixed{{0.5, 0}, {0, 0.5}};

}  // namespace

TEST_CASE("closed-form trace distances") {
  CHECK(trace_distance(kMixed, kMixed) == doctest::Approx(0.0));
  CHECK(trace_distance(kZero, kOne) == doctest::Approx(1.0));
  CHECK(trace_distance(kZero, kMixed) == doctest::Approx(0.5));
  CHECK(trace_distance(kZero, kPlus) == doctest::Approx(1.0 / std::sqrt(2.0)));
}

TEST_CASE("closed-form fidelities") {
  CHECK(fidelity(kZero, kZero) == doctest::Approx(1.0));
  CHECK(fidelity(kZero, kOne) == doctest::Approx(0.0));
  CHECK(fidelity(kZero, kPlus) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(fidelity(kZero, kMixed) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(fidelity(kMixed, kMixed) == doctest::Approx(1.0));
}

TEST_CASE("metric properties over random density matrices") {
  for (std::size_t dim : {2u, 4u, 8u}) {
    std::mt19937_64 rng(1000 + dim);
    for (int trial = 0; trial < 100; ++trial) {
      const ComplexMatrix rho = random_density(dim, rng);
      const ComplexMatrix sigma = random_density(dim, rng);
      const ComplexMatrix tau = random_density(dim, rng);
      const double d = trace_distance(rho, sigma);
      const double f = fidelity(rho, sigma);
      CHECK(d >= 0.0);
      CHECK(d <= 1.0 + 1e-12);
      CHECK(f >= 0.0);
      CHECK(f <= 1.0 + 1e-9);
      CHECK(std::abs(d - trace_distance(sigma, rho)) < 1e-12);
      CHECK(std::abs(f - fidelity(sigma, rho)) < 1e-9);
      CHECK(trace_distance(rho, tau) <= d + trace_distance(sigma, tau) + 1e-10);
      // Fuchs-van de Graaf.
      CHECK(1.0 - f <= d + 1e-8);
      CHECK(d <= std::sqrt(std::max(0.0, 1.0 - f * f)) + 1e-8);
      CHECK(trace_distance(rho, rho) < 1e-12);
      CHECK(std::abs(fidelity(rho, rho) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("pure-state fidelity is the overlap modulus") {
  std::mt19937_64 rng(77);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<cplx> a(4), b(4);
    double na = 0, nb = 0;
    for (auto& x : a) { x = {g(rng), g(rng)}; na += std::norm(x); }
    for (auto& x : b) { x = {g(rng), g(rng)}; nb += std::norm(x); }
    for (auto& x : a) x /= std::sqrt(na);
    for (auto& x : b) x /= std::sqrt(nb);
    cplx overlap = 0;
    for (std::size_t k = 0; k < 4; ++k) overlap += std::conj(a[k]) * b[k];
    const double f = fidelity(pure_state(a), pure_state(b));
    CHECK(f == doctest::Approx(std::abs(overlap)).epsilon(1e-6));
    const double d = trace_distance(pure_state(a), pure_state(b));
    CHECK(d == doctest::Approx(std::sqrt(1.0 - std::norm(overlap))).epsilon(1e-9));
  }
}

TEST_CASE("trace distance vanishes exactly when the states coincide") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const ComplexMatrix rho = random_density(4, rng);
    ComplexMatrix copy = rho;
    CHECK(trace_distance(rho, copy) == 0.0);
    const ComplexMatrix sigma = random_density(4, rng);
    if (frobenius_norm(rho - sigma) > 1e-9) CHECK(trace_distance(rho, sigma) > 0.0);
  }
}

TEST_CASE("slightly negative eigenvalues within slack are accepted") {
  const ComplexMatrix almost{{1.0 + 5e-9, 0}, {0, -5e-9}};
  CHECK(trace_distance(almost, kZero) < 1e-8);
  CHECK(fidelity(almost, kZero) == doctest::Approx(1.0));
}

TEST_CASE("metric input errors") {
  const ComplexMatrix big = ComplexMatrix::identity(4) * cplx(0.25);
  CHECK_THROWS_AS(trace_distance(kZero, big), DimensionMismatch);
  CHECK_THROWS_AS(fidelity(kZero, big), DimensionMismatch);

  const ComplexMatrix unnormalized{{1, 0}, {0, 1}};
  CHECK_THROWS_AS(trace_distance(unnormalized, kZero), NotDensityMatrix);

  const ComplexMatrix negative{{1.5, 0}, {0, -0.5}};
  CHECK_THROWS_AS(fidelity(negative, kZero), NotDensityMatrix);

  const ComplexMatrix non_hermitian{{0.5, 0.3}, {0, 0.5}};
  CHECK_THROWS_AS(trace_distance(non_hermitian, kZero), NotDensityMatrix);

  CHECK_THROWS_AS(require_density_matrix(negative, "test"), NotDensityMatrix);
  CHECK_NOTHROW(require_density_matrix(kMixed, "test"));
}
