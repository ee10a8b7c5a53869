#include <doctest.h>

#include <cmath>

#include "hartree/bubble.hpp"
#include "hartree/quadrature.hpp"

using namespace hartree;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

Vec random_point(int N, std::uint64_t seed, std::uint64_t i, double radius) {
  CounterRng rng(seed, i);
  Vec x(N);
  for (auto& v : x) v = radius * (2.0 * rng.uniform() - 1.0);
  return x;
}

double fd_laplacian(const Bubble& b, Vec x, double h) {
  double c = b.value(x.data()), s = 0.0;
  for (int i = 0; i < b.N(); ++i) {
    double xi = x[i];
    x[i] = xi + h;
    double p = b.value(x.data());
    x[i] = xi - h;
    double m = b.value(x.data());
    x[i] = xi;
    s += (p - 2 * c + m) / (h * h);
  }
  return s;
}

}  // namespace

TEST_CASE("bubble values") {
  SystemParams p(6, 1.0);
  Bubble b(p, {0.1, -0.2, 0.3, 0, 0, 1}, 2.5);
  CHECK(rel(b.value(b.center.data()), p.C() * std::pow(2.5, 2.0)) < 1e-14);
  Bubble u = Bubble::unit(p);
  Vec e1(6, 0.0);
  e1[0] = 1.0;
  CHECK(rel(u.value(e1.data()), p.C() * std::pow(2.0, -2.0)) < 1e-14);
  for (int i = 0; i < 50; ++i) {
    Vec x = random_point(6, 1, i, 3.0);
    Vec y(6);
    for (int k = 0; k < 6; ++k) y[k] = 2.5 * (x[k] - b.center[k]);
    CHECK(rel(b.value(x.data()), std::pow(2.5, 2.0) * u.value(y.data())) < 1e-13);
  }
  CHECK_THROWS(Bubble(p, Vec(6, 0.0), 0.0));
}

TEST_CASE("kernel basis at the unit bubble") {
  for (auto [N, a] : {std::pair{5, 1.0}, std::pair{6, 2.0}, std::pair{8, 3.0}}) {
    SystemParams p(N, a);
    Vec zero(N, 0.0);
    for (int j = 1; j <= N; ++j) CHECK(kernel_basis_eval(p, {j}, zero) == 0.0);
    CHECK(rel(kernel_basis_eval(p, {N + 1}, zero), 0.5 * (N - 2) * p.C()) < 1e-14);
    Vec on(N, 0.0);
    on[1] = 1.0;
    CHECK(std::abs(kernel_basis_eval(p, {N + 1}, on)) < 1e-15);
    // Finite differences of the bubble in (z, lambda).
    Bubble b(p, Vec(N, 0.2), 1.7);
    for (int i = 0; i < 20; ++i) {
      Vec x = random_point(N, 2, i, 1.5);
      double h = 1e-5;
      Bubble lp(p, b.center, 1.7 + h), lm(p, b.center, 1.7 - h);
      double fd = (lp.value(x.data()) - lm.value(x.data())) / (2 * h);
      double an = kernel_basis_eval(b, {N + 1}, x);
      CHECK(std::abs(fd - an) <= 1e-6 * std::max(std::abs(an), b.value(x.data())));
      Vec zp = b.center, zm = b.center;
      zp[0] -= h;
      zm[0] += h;  // d/dx_1 U = -d/dz_1 U
      double fdz = (Bubble(p, zp, 1.7).value(x.data()) - Bubble(p, zm, 1.7).value(x.data())) / (2 * h);
      double anz = kernel_basis_eval(b, {1}, x);
      CHECK(std::abs(fdz - anz) <= 1e-6 * std::max(std::abs(anz), b.value(x.data())));
    }
  }
}

TEST_CASE("closed-form Laplacian") {
  SystemParams p(5, 1.0);
  Bubble u = Bubble::unit(p);
  CHECK(rel(u.neg_laplacian(u.center.data()), 5 * 3 * p.C()) < 1e-13);
  Bubble b(p, {0.5, 0, 0, 0, 0}, 3.0);
  for (int i = 0; i < 20; ++i) {
    Vec x = random_point(5, 3, i, 1.0);
    double fd = -fd_laplacian(b, x, 1e-3 / 3.0);
    CHECK(rel(b.neg_laplacian(x.data()), fd) < 1e-5);
    // Local identity -Delta U = N (N - 2) C^(-4/(N-2)) U^((N+2)/(N-2)).
    double loc = 15.0 * std::pow(p.C(), -4.0 / 3.0) * std::pow(b.value(x.data()), 7.0 / 3.0);
    CHECK(rel(b.neg_laplacian(x.data()), loc) < 1e-10);
    // Radial symmetry.
    Vec y = b.center;
    y[1] += std::sqrt(b.dist2(x.data()));
    CHECK(rel(b.neg_laplacian(y.data()), b.neg_laplacian(x.data())) < 1e-12);
  }
}

TEST_CASE("Riesz convolution of the bubble power") {
  SystemParams p(6, 2.0);
  double mu = p.mu();
  Bubble u = Bubble::unit(p);
  double ts = p.two_star();
  double oracle = radial_convolution(mu, [&](double s) { return std::pow(u.radial_value(s), ts); }, 0.0, 6);
  CHECK(rel(riesz_convolution_bubble(mu, u, u.center), oracle) < 1e-6);
  Bubble b(p, {0, 1, 0, 0, 0, 0}, 2.0);
  double c0 = -1;
  for (int i = 0; i < 30; ++i) {
    Vec x = random_point(6, 4, i, 2.0);
    double ratio = riesz_convolution_bubble(mu, b, x) / std::pow(2.0 / (1.0 + 4.0 * b.dist2(x.data())), mu / 2);
    if (c0 < 0) c0 = ratio;
    CHECK(rel(ratio, c0) < 1e-12);
  }
}

TEST_CASE("single-bubble PDE residual") {
  ConstantPotential one(1.0), two(2.0);
  for (auto [N, a] : {std::pair{5, 1.0}, std::pair{6, 1.5}, std::pair{7, 2.0}, std::pair{10, 4.0}}) {
    SystemParams p(N, a);
    BubblePair pair(Bubble(p, Vec(N, 0.3), 1.4));
    for (int i = 0; i < 100; ++i) {
      Vec x = random_point(N, 5, i, 3.0);
      PdeResidual r = pde_residual(pair, x, one, one);
      CHECK(std::abs(r.res_u) <= 1e-9 * r.scale_u);
      CHECK(std::abs(r.res_v) <= 1e-9 * r.scale_v);
    }
  }
  SystemParams p(5, 1.0);
  BubblePair pair(Bubble::unit(p));
  PdeResidual r = pde_residual(pair, Vec(5, 0.0), two, one);
  CHECK(r.res_u < 0.0);
  CHECK(std::abs(r.res_v) < 1e-9 * r.scale_v);
}

TEST_CASE("linearized operator on the dilation mode") {
  SystemParams p(5, 1.0);
  BubblePair pair(Bubble::unit(p));
  int N = 5;
  double c = 0.5 * (N - 2);
  SeparableField psi{[&](double r) { return c * pair.v.radial_value(r) * (1 - r * r) / (1 + r * r); }, 0, 0};
  for (int i = 0; i < 20; ++i) {
    double r = 0.05 + 0.25 * i;
    Vec x(N, 0.0);
    x[0] = r;
    // -Delta d/dl U = d/dl (-Delta U), by central difference in lambda.
    double h = 1e-5;
    double lhs = (Bubble(p, Vec(N, 0.0), 1 + h).neg_laplacian(x.data()) -
                  Bubble(p, Vec(N, 0.0), 1 - h).neg_laplacian(x.data())) / (2 * h);
    double t1 = linearized_apply(LinearizedOp::T1, pair, psi, x);
    double scale = std::abs(pair.u.neg_laplacian(x.data()));
    CHECK(std::abs(lhs - t1) <= 1e-6 * scale);
  }
  // Linearity.
  SeparableField psi3{[&](double r) { return 3.0 * psi.profile(r); }, 0, 0};
  Vec x{0.7, 0.1, 0, 0, 0};
  CHECK(rel(linearized_apply(LinearizedOp::T1, pair, psi3, x), 3.0 * linearized_apply(LinearizedOp::T1, pair, psi, x)) < 1e-10);
}

TEST_CASE("linearized operator decay envelope") {
  SystemParams p(6, 1.0);
  BubblePair pair(Bubble::unit(p));
  for (double nu : {0.0, 2.0, 4.0}) {
    SeparableField psi{[nu](double r) { return std::pow(1 + r * r, -nu / 2); }, 0, 0};
    double worst = 0.0;
    for (double r : {0.0, 1.0, 4.0, 16.0, 64.0}) {
      Vec x(6, 0.0);
      x[0] = r;
      double tau = std::sqrt(1 + r * r);
      worst = std::max(worst, std::abs(linearized_apply(LinearizedOp::T1, pair, psi, x)) * std::pow(tau, nu + 4));
    }
    CHECK(std::isfinite(worst));
    CHECK(worst < 1e4);
  }
}
