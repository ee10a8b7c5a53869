#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hartree/montecarlo.hpp"
#include "hartree/params_special.hpp"
#include "hartree/quadrature.hpp"

using namespace hartree;

namespace {

struct AdmissibleDraw {
  int N;
  double alpha;
};

// Uniform N in 5..10, alpha strictly inside the admissible interval.
AdmissibleDraw draw_params(std::uint64_t seed, std::uint64_t i) {
  CounterRng rng(seed, i);
  int N = 5 + static_cast<int>(rng.uniform() * 6.0);
  double hi = alpha_upper_bound(N);
  double alpha = hi * (0.02 + 0.96 * rng.uniform());
  return {N, alpha};
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("gamma: integer, half-integer and reference values") {
  CHECK(gamma_fn(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(gamma_fn(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
  CHECK(gamma_fn(5.0) == doctest::Approx(24.0).epsilon(1e-13));
  for (int i = 0; i < 200; ++i) {
    double x = 0.01 + 0.2 * i;
    CHECK(rel(gamma_fn(x), std::tgamma(x)) < 1e-12);
    CHECK(std::abs(lgamma_fn(x) - std::lgamma(x)) < 1e-12 * std::max(1.0, std::abs(std::lgamma(x))));
  }
  CHECK_THROWS_AS(gamma_fn(0.0), std::domain_error);
  CHECK_THROWS_AS(gamma_fn(-1.5), std::domain_error);
}

TEST_CASE("gamma ratio shift and beta") {
  for (int k = 0; k < 40; ++k) {
    double expect = std::exp(std::lgamma(2.5 + k) - std::lgamma(4.25 + k));
    CHECK(rel(gamma_ratio_shift(2.5, 4.25, k), expect) < 1e-12);
  }
  CHECK(beta_fn(2.0, 3.0) == doctest::Approx(1.0 / 12.0).epsilon(1e-13));
}

TEST_CASE("sphere surface area and ball volume") {
  CHECK(sphere_surface_area(2) == doctest::Approx(2.0 * M_PI).epsilon(1e-14));
  CHECK(sphere_surface_area(3) == doctest::Approx(4.0 * M_PI).epsilon(1e-14));
  CHECK(sphere_surface_area(6) == doctest::Approx(std::pow(M_PI, 3)).epsilon(1e-13));
  for (int n = 1; n <= 12; ++n) CHECK(rel(ball_volume(n), sphere_surface_area(n) / n) < 1e-14);
}

TEST_CASE("HLS sharp constant") {
  CHECK(hls_sharp_constant(4, 2.0) == doctest::Approx(M_PI * 0.5 * std::sqrt(6.0)).epsilon(1e-12));
  // Second path: std::tgamma.
  double N = 6, mu = 4;
  double expect = std::pow(M_PI, mu / 2) * std::tgamma(N / 2 - mu / 2) / std::tgamma(N - mu / 2) *
                  std::pow(std::tgamma(N / 2) / std::tgamma(N), -1.0 + mu / N);
  CHECK(rel(hls_sharp_constant(6, 4.0), expect) < 1e-12);
  for (double m = 0.5; m < 5.9; m += 0.37)
    CHECK(std::abs(hls_sharp_constant(6, m) - hls_sharp_constant(6, m + 1e-8)) < 1e-6 * hls_sharp_constant(6, m));
  CHECK_THROWS_AS(hls_sharp_constant(6, 6.0), std::domain_error);
}

TEST_CASE("harmonic dimension") {
  for (int N = 2; N <= 10; ++N) {
    CHECK(harmonic_dim(N, 0) == 1);
    CHECK(harmonic_dim(N, 1) == N + 1);
  }
  CHECK(harmonic_dim(5, 2) == 20);
  // Brute force: homogeneous degree-k polynomials in N+1 variables minus degree k-2.
  auto poly_dim = [](int vars, int k) -> long long {
    if (k < 0) return 0;
    long double c = 1;
    for (int i = 1; i <= vars - 1; ++i) c = c * (k + i) / i;
    return static_cast<long long>(std::llround(c));
  };
  for (int N = 2; N <= 10; ++N) {
    for (int k = 1; k <= 20; ++k) {
      CHECK(harmonic_dim(N, k) == poly_dim(N + 1, k) - poly_dim(N + 1, k - 2));
      if (k >= 2) CHECK(harmonic_dim(N, k) > harmonic_dim(N, k - 1));
    }
  }
}

TEST_CASE("Funk-Hecke eigenvalue: stated special values") {
  for (int N = 5; N <= 10; ++N) {
    double l0 = funk_hecke_eigenvalue(N, N - 2.0, 0);
    CHECK(rel(l0, 8.0 * std::pow(M_PI, N / 2.0) / (N * std::tgamma(N / 2.0))) < 1e-12);
    CHECK(rel(funk_hecke_eigenvalue(N, N - 2.0, 1) / l0, (N - 2.0) / (N + 2.0)) < 1e-12);
    double alpha = 0.5 * alpha_upper_bound(N);
    double la = funk_hecke_eigenvalue(N, N - alpha, 0);
    CHECK(rel(la, std::pow(2.0, alpha) * std::pow(M_PI, N / 2.0) * std::tgamma(alpha / 2) /
                      std::tgamma((N + alpha) / 2)) < 1e-12);
    CHECK(rel(funk_hecke_eigenvalue(N, N - alpha, 1) / la, (N - alpha) / (N + alpha)) < 1e-12);
  }
  CHECK(rel(funk_hecke_eigenvalue(6, 4.0, 0), 2.0 * std::pow(M_PI, 3) / 3.0) < 1e-13);
  CHECK_THROWS_AS(funk_hecke_eigenvalue(6, 6.0, 0), std::domain_error);
}

TEST_CASE("Funk-Hecke eigenvalue: decreasing in k and ratio identity (property)") {
  for (std::uint64_t i = 0; i < 60; ++i) {
    auto d = draw_params(101, i);
    for (double t : {d.N - 2.0, d.N - d.alpha}) {
      double l0 = funk_hecke_eigenvalue(d.N, t, 0);
      CHECK(std::abs(funk_hecke_eigenvalue(d.N, t, 1) / l0 - t / (2.0 * d.N - t)) < 1e-12);
      for (int k = 0; k < 30; ++k)
        CHECK(funk_hecke_eigenvalue(d.N, t, k + 1) < funk_hecke_eigenvalue(d.N, t, k));
    }
  }
}

TEST_CASE("admissibility") {
  CHECK(check_admissible(6, 1.0).admissible);
  CHECK_FALSE(check_admissible(6, 3.0).admissible);
  CHECK_FALSE(check_admissible(4, 1.0).admissible);
  CHECK(check_admissible(4, 1.0).violations.front().find("N >= 5") != std::string::npos);
  CHECK(alpha_upper_bound(6) == doctest::Approx(2.5));
  CHECK_FALSE(check_admissible(5, 0.0).admissible);
  CHECK_THROWS_AS(SystemParams(6, 3.0), std::domain_error);
}

TEST_CASE("bubble amplitude") {
  // Frozen from a 30-digit evaluation of the defining gamma expression.
  CHECK(rel(SystemParams(6, 2.0).C(), 2.15504546550199874) < 1e-13);
  CHECK(rel(SystemParams(5, 1.0).C(), 0.98363917825388832) < 1e-13);
  CHECK(rel(SystemParams(7, 1.5).C(), 2.83725011056527041) < 1e-13);
  for (std::uint64_t i = 0; i < 100; ++i) {
    auto d = draw_params(7, i);
    SystemParams p(d.N, d.alpha);
    double N = d.N, a = d.alpha;
    double inv = N * (N - 2) * std::tgamma((N + a) / 2) / (std::pow(M_PI, N / 2) * std::tgamma(a / 2));
    CHECK(p.C() > 0.0);
    CHECK(rel(std::pow(p.C(), (2 * a + 4) / (N - 2)), inv) < 1e-11);
    CHECK(rel(p.constants().C_pow, inv) < 1e-12);
    // Single-bubble consistency: I_kernel * C^((2 alpha + 4)/(N - 2)) = N (N - 2).
    CHECK(rel(p.constants().I_kernel * p.constants().C_pow, N * (N - 2)) < 1e-12);
    CHECK(std::abs(p.two_star() - (N + a) / (N - 2)) < 1e-15);
  }
}

TEST_CASE("Riesz self-convolution constant") {
  CHECK(rel(riesz_selfconv_constant(6, 2.0), 1.29192819501249251) < 1e-13);
  CHECK(rel(riesz_selfconv_constant(5, 4.0), 15.5031383401499101) < 1e-13);
  CHECK_THROWS_AS(riesz_selfconv_constant(6, 0.0), std::domain_error);
  // Quadrature oracle on the profile (1 + s^2)^(-(2N - mu)/2), ten mu values per N.
  for (int N = 5; N <= 10; ++N) {
    for (int j = 1; j <= 10; ++j) {
      double mu = N * (0.05 + 0.9 * j / 10.0);
      if (mu + 0.0 >= N) continue;
      auto f = [&](double s) { return std::pow(1.0 + s * s, -(2.0 * N - mu) / 2.0); };
      double r = 0.7;
      double oracle = radial_convolution(mu, f, r, N) * std::pow(1.0 + r * r, mu / 2.0);
      CHECK(rel(oracle, riesz_selfconv_constant(N, mu)) < 1e-6);
    }
  }
}

TEST_CASE("derived single-bubble integrals") {
  SystemParams p(5, 1.0);
  CHECK(p.constants().A1 == doctest::Approx(14.0625).epsilon(1e-12));
  CHECK(p.constants().A2 == doctest::Approx(23.4375).epsilon(1e-12));
}
