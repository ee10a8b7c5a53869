#include <doctest.h>

#include <cmath>

#include "hartree/bubble.hpp"
#include "hartree/quadrature.hpp"
#include "hartree/stereographic.hpp"

using namespace hartree;

namespace {
Vec random_point(int N, std::uint64_t seed, std::uint64_t i, double radius) {
  CounterRng rng(seed, i);
  Vec x(N);
  for (auto& v : x) v = radius * (2.0 * rng.uniform() - 1.0);
  return x;
}
double norm(const Vec& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}
}  // namespace

TEST_CASE("forward and inverse maps") {
  SpherePoint n = stereo_forward(Vec(5, 0.0));
  CHECK(n.xi[5] == doctest::Approx(1.0));
  Vec e1(5, 0.0);
  e1[0] = 1.0;
  SpherePoint eq = stereo_forward(e1);
  CHECK(eq.xi[0] == doctest::Approx(1.0));
  CHECK(std::abs(eq.xi[5]) < 1e-15);
  CHECK(norm(stereo_inverse(n)) == 0.0);
  Vec back = stereo_inverse(eq);
  CHECK(back[0] == doctest::Approx(1.0));
  for (int N = 5; N <= 10; ++N) {
    for (int i = 0; i < 100; ++i) {
      Vec x = random_point(N, 11, i, 20.0);
      SpherePoint s = stereo_forward(x);
      CHECK(std::abs(norm(s.xi) - 1.0) < 1e-12);
      Vec y = stereo_inverse(s);
      for (int k = 0; k < N; ++k) CHECK(std::abs(y[k] - x[k]) < 1e-12 * std::max(1.0, norm(x)));
    }
  }
  SpherePoint south{Vec{0, 0, 0, 0, 0, -1}};
  CHECK_THROWS_AS(stereo_inverse(south), SingularPointError);
}

TEST_CASE("Jacobian") {
  for (int N = 5; N <= 8; ++N) {
    CHECK(stereo_jacobian(Vec(N, 0.0)) == doctest::Approx(std::pow(2.0, N)));
    double area = radial_integral([N](double r) { return std::pow(2.0 / (1 + r * r), N); }, N);
    CHECK(std::abs(area / sphere_surface_area(N + 1) - 1.0) < 1e-8);
    Vec far(N, 0.0);
    far[0] = 1e4;
    CHECK(stereo_jacobian(far) / std::pow(2.0 / 1e8, N) == doctest::Approx(1.0).epsilon(1e-7));
  }
}

TEST_CASE("distance identity") {
  for (int N = 5; N <= 10; ++N) {
    for (int i = 0; i < 1000; ++i) {
      Vec x = random_point(N, 12, 2 * i, 5.0), y = random_point(N, 12, 2 * i + 1, 5.0);
      DistancePair d = distance_identity_check(x, y);
      CHECK(std::abs(d.lhs - d.rhs) <= 1e-12 * std::max(1.0, d.rhs));
    }
  }
  Vec x = random_point(5, 13, 0, 2.0);
  DistancePair same = distance_identity_check(x, x);
  CHECK(same.lhs == 0.0);
  CHECK(same.rhs == 0.0);
  Vec y = x;
  double n2 = norm(x) * norm(x);
  for (auto& v : y) v = -v / n2;
  DistancePair anti = distance_identity_check(x, y);
  CHECK(std::abs(anti.lhs - anti.rhs) < 1e-12);
}

TEST_CASE("kernel basis pushforwards") {
  for (auto [N, a] : {std::pair{5, 1.0}, std::pair{6, 2.0}, std::pair{9, 3.5}}) {
    SystemParams p(N, a);
    for (std::uint64_t i = 0; i < 50; ++i) {
      CounterRng rng(14, i);
      SpherePoint xi = random_sphere_point(N, rng);
      double c = std::pow(2.0, -N / 2.0) * p.C();
      for (int j = 1; j <= N + 1; ++j) {
        double got = pushforward([&](const Vec& x) { return kernel_basis_eval(p, {j}, x); }, xi);
        double expect = (j <= N ? (2.0 - N) : (N - 2.0)) * c * xi.xi[j - 1];
        CHECK(std::abs(got - expect) < 1e-10);
        CHECK(std::abs(pushforward_phi_expected(p, j, xi) - expect) < 1e-12);
      }
    }
  }
}

TEST_CASE("pushforward and pullback round trip") {
  auto h = [](const Vec& x) { return std::exp(-norm(x)) * (1.0 + x[0]); };
  for (int i = 0; i < 50; ++i) {
    Vec x = random_point(6, 15, i, 4.0);
    double back = pullback([&](const SpherePoint& s) { return pushforward(h, s); }, x);
    CHECK(std::abs(back - h(x)) < 1e-12 * std::max(1.0, std::abs(h(x))));
  }
}

TEST_CASE("critical norm is preserved by the pushforward") {
  // int_{R^N} |h|^(2N/(N-2)) against int_{S^N} |S_* h|^(2N/(N-2)), both by Monte Carlo.
  int N = 5;
  double q = 2.0 * N / (N - 2.0);
  SystemParams p(N, 1.0);
  Bubble u = Bubble::unit(p);
  auto h = [&](const Vec& x) { return u.value(x.data()) * (1.0 + 0.5 * x[0] / std::sqrt(1 + norm(x) * norm(x))); };
  // Euclidean side: sample x from the pullback of the uniform sphere measure.
  double area = sphere_surface_area(N + 1);
  auto eu = mc_accumulate(200000, [&](std::size_t i) {
    CounterRng rng(16, i);
    SpherePoint s = random_sphere_point(N, rng);
    if (s.xi[N] < -1.0 + 1e-6) return 0.0;
    Vec x = stereo_inverse(s);
    return std::pow(std::abs(h(x)), q) / stereo_jacobian(x) * area;
  });
  auto sp = mc_accumulate(200000, [&](std::size_t i) {
    CounterRng rng(17, i);
    SpherePoint s = random_sphere_point(N, rng);
    if (s.xi[N] < -1.0 + 1e-6) return 0.0;
    return std::pow(std::abs(pushforward(h, s)), q) * area;
  });
  double sigma = std::sqrt(eu.variance() / eu.n + sp.variance() / sp.n);
  CHECK(std::abs(eu.mean - sp.mean) <= 3.0 * sigma + 1e-12 * eu.mean);
}
