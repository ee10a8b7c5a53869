#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hartree/bubble.hpp"
#include "hartree/multibubble.hpp"
#include "hartree/potential.hpp"

using namespace hartree;

namespace {

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

PolygonConfig make_cfg(int N, double alpha, int m, double lambda, Vec xpp = {}) {
  if (xpp.empty()) xpp.assign(N - 2, 0.0);
  return PolygonConfig(SystemParams(N, alpha), m, 1.0, xpp, lambda);
}

CutoffSpec make_cutoff(int N, double delta) {
  CutoffSpec c;
  c.r0 = 1.0;
  c.x0pp.assign(N - 2, 0.0);
  c.delta = delta;
  return c;
}

}  // namespace

TEST_CASE("polygon centers") {
  for (int m : {1, 2, 3, 7, 16}) {
    auto cfg = make_cfg(6, 1.0, m, 10.0, {0.1, -0.2, 0.3, 0.0});
    auto z = polygon_centers(cfg);
    REQUIRE(z.size() == static_cast<std::size_t>(m));
    double sx = 0, sy = 0;
    for (const auto& c : z) {
      CHECK(std::hypot(c[0], c[1]) == doctest::Approx(1.0).epsilon(1e-14));
      CHECK(c[2] == 0.1);
      CHECK(c[4] == 0.3);
      sx += c[0];
      sy += c[1];
    }
    if (m >= 2) {
      CHECK(std::abs(sx) < 1e-12);
      CHECK(std::abs(sy) < 1e-12);
      double chord = std::hypot(z[1][0] - z[0][0], z[1][1] - z[0][1]);
      CHECK(chord == doctest::Approx(2.0 * std::sin(M_PI / m)).epsilon(1e-13));
    }
  }
}

TEST_CASE("interaction sum") {
  CHECK(interaction_sum(1, 1.0, 3.0) == 0.0);
  for (double p : {1.0, 3.0, 4.5}) CHECK(rel(interaction_sum(2, 0.7, p), std::pow(1.4, -p)) < 1e-14);
  // Square: two sides sqrt(2) r, one diagonal 2 r.
  CHECK(rel(interaction_sum(4, 2.0, 1.0), (std::sqrt(2.0) + 0.5) / 2.0) < 1e-14);
  // Brute force over all pairwise distances from center 1.
  for (int m = 2; m <= 40; m += 5) {
    auto cfg = make_cfg(5, 1.0, m, 1.0);
    auto z = polygon_centers(cfg);
    double s = 0;
    for (int j = 1; j < m; ++j) s += std::pow(std::hypot(z[j][0] - z[0][0], z[j][1] - z[0][1]), -3.0);
    CHECK(rel(interaction_sum(cfg, 3.0), s) < 1e-12);
    CHECK(rel(interaction_sum(m, 3.0, 3.0), interaction_sum(m, 1.0, 3.0) / 27.0) < 1e-13);
  }
  // Growth like m^p for p > 1: doubling m multiplies by 2^p within 5%.
  for (double p : {3.0, 4.0}) {
    double ratio = interaction_sum(800, 1.0, p) / interaction_sum(400, 1.0, p);
    CHECK(std::abs(ratio / std::pow(2.0, p) - 1.0) < 0.05);
  }
}

TEST_CASE("cutoff") {
  CHECK(cutoff_profile(0.0) == 1.0);
  CHECK(cutoff_profile(1.0) == 0.0);
  for (double s = 0.0; s < 1.0; s += 0.01) CHECK(cutoff_profile(s + 0.01) <= cutoff_profile(s));
  int N = 5;
  auto c = make_cutoff(N, 0.1);
  auto at = [&](double d) {
    Vec x(N, 0.0);
    x[0] = (1.0 + d) * std::cos(0.4);
    x[1] = (1.0 + d) * std::sin(0.4);
    return cutoff_eval(c, x);
  };
  CHECK(at(0.05) == 1.0);
  CHECK(at(-0.099) == 1.0);
  double mid = at(0.15);
  CHECK(mid > 0.0);
  CHECK(mid < 1.0);
  CHECK(at(0.3) == 0.0);
  // Jet against central differences.
  Vec x{0.7, 0.8, 0.02, -0.05, 0.03};
  auto jet = cutoff_jet(c, x.data(), N);
  double h = 1e-5, lap = 0.0;
  for (int i = 0; i < N; ++i) {
    Vec xp = x, xm = x;
    xp[i] += h;
    xm[i] -= h;
    double fp = cutoff_eval(c, xp), fm = cutoff_eval(c, xm);
    CHECK(std::abs((fp - fm) / (2 * h) - jet.grad[i]) < 1e-5);
    lap += (fp - 2 * jet.value + fm) / (h * h);
  }
  CHECK(std::abs(lap - jet.laplacian) < 1e-2 * std::max(1.0, std::abs(jet.laplacian)));
}

TEST_CASE("ansatz near a peak") {
  int N = 6;
  double lambda = 40.0;
  for (int m : {2, 5, 12}) {
    auto cfg = make_cfg(N, 1.0, m, lambda);
    auto cut = make_cutoff(N, 0.1);
    auto z = polygon_centers(cfg);
    // Inside the plateau the cutoff is 1.
    CHECK(ansatz_eval(cfg, cut, AnsatzField::Z, z[0]) == ansatz_eval(cfg, cut, AnsatzField::Z_star, z[0]));
    Bubble u1(cfg.params, z[0], lambda);
    double ratio = ansatz_eval(cfg, cut, AnsatzField::Z, z[0]) / u1.value(z[0].data());
    double predicted = 1.0 + interaction_sum(cfg, N - 2.0) * std::pow(lambda, -(N - 2.0));
    CHECK(std::abs(ratio - predicted) < 1e-2 * (predicted - 1.0));
    // Rotation by 2 pi / m maps the configuration to itself.
    Vec x{0.98, 0.05, 0.01, 0.0, -0.02, 0.0};
    double th = 2.0 * M_PI / m;
    Vec y = x;
    y[0] = std::cos(th) * x[0] - std::sin(th) * x[1];
    y[1] = std::sin(th) * x[0] + std::cos(th) * x[1];
    CHECK(rel(ansatz_eval(cfg, cut, AnsatzField::Z, y), ansatz_eval(cfg, cut, AnsatzField::Z, x)) < 1e-12);
  }
  // Far from the ring the cutoff kills the ansatz.
  auto cfg = make_cfg(N, 1.0, 4, lambda);
  CHECK(ansatz_eval(cfg, make_cutoff(N, 0.1), AnsatzField::Z, Vec{3.0, 0, 0, 0, 0, 0}) == 0.0);
}

TEST_CASE("derivative basis against finite differences") {
  int N = 6;
  double lambda = 8.0;
  Vec xpp{0.01, 0.02, -0.01, 0.03};
  auto cut = make_cutoff(N, 0.2);
  Vec x{0.9, 0.1, 0.05, 0.0, -0.03, 0.06};
  int m = 3;
  auto cfg = make_cfg(N, 1.0, m, lambda, xpp);
  auto xi_u = [&](int j, double l, double r, const Vec& pp) {
    PolygonConfig c(cfg.params, m, r, pp, l);
    Bubble b(cfg.params, polygon_centers(c)[j - 1], l);
    return cutoff_eval(cut, x) * b.value(x.data());
  };
  for (int j = 1; j <= m; ++j) {
    double h = 1e-5;
    for (int l = 1; l <= N; ++l) {
      double fd;
      if (l == 1) {
        fd = (xi_u(j, lambda + h, 1.0, xpp) - xi_u(j, lambda - h, 1.0, xpp)) / (2 * h);
      } else if (l == 2) {
        fd = (xi_u(j, lambda, 1.0 + h, xpp) - xi_u(j, lambda, 1.0 - h, xpp)) / (2 * h);
      } else {
        Vec p = xpp, q = xpp;
        p[l - 3] += h;
        q[l - 3] -= h;
        fd = (xi_u(j, lambda, 1.0, p) - xi_u(j, lambda, 1.0, q)) / (2 * h);
      }
      double an = derivative_basis_eval(cfg, cut, j, l, x);
      CHECK(std::abs(an - fd) < 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
  CHECK_THROWS_AS(derivative_basis_eval(cfg, cut, 0, 1, x), std::domain_error);
  CHECK_THROWS_AS(derivative_basis_eval(cfg, cut, 1, N + 1, x), std::domain_error);
  CHECK_THROWS_AS(derivative_basis_eval(cfg, cut, m + 1, 1, x), std::domain_error);
}

TEST_CASE("weighted norms") {
  int N = 5;
  auto cfg = make_cfg(N, 1.0, 4, 30.0);
  auto cut = make_cutoff(N, 0.1);
  WeightedNormSpec spec;
  spec.sample_set = structured_sample_set(cfg, cut, 200, 3);
  REQUIRE(!spec.sample_set.empty());
  for (NormKind kind : {NormKind::star, NormKind::starstar}) {
    double e = kind == NormKind::star ? 0.5 * (N - 2.0) : 0.5 * (N + 2.0);
    // The weight itself, with the inverse prefactor, has norm exactly 1.
    auto weight_field = [&](const Vec& x) {
      return std::pow(cfg.lambda, e) * norm_weight(cfg, kind, spec.tau(), x.data());
    };
    CHECK(weighted_norm(kind, weight_field, cfg, spec).value == doctest::Approx(1.0).epsilon(1e-12));
    auto g = [&](const Vec& x) { return std::sin(3 * x[0]) + x[1] * x[1]; };
    double n1 = weighted_norm(kind, g, cfg, spec).value;
    double n3 = weighted_norm(kind, [&](const Vec& x) { return -3.0 * g(x); }, cfg, spec).value;
    CHECK(rel(n3, 3.0 * n1) < 1e-13);
    // Enlarging the sample set cannot decrease the sup.
    WeightedNormSpec bigger = spec;
    auto extra = structured_sample_set(cfg, cut, 400, 4);
    bigger.sample_set.insert(bigger.sample_set.end(), extra.begin(), extra.end());
    CHECK(weighted_norm(kind, g, cfg, bigger).value >= n1);
  }
  WeightedNormSpec empty;
  CHECK_THROWS_AS(weighted_norm(NormKind::star, [](const Vec&) { return 1.0; }, cfg, empty),
                  std::domain_error);
}

TEST_CASE("estimate probes") {
  EstimateInputs b2;
  auto r2 = estimate_probe(EstimateKind::B2, b2, 4000, 9);
  CHECK(std::isfinite(r2.max_ratio));
  CHECK(r2.max_ratio > 0.0);
  b2.delta = 3.0;
  CHECK_THROWS_AS(estimate_probe(EstimateKind::B2, b2, 10, 9), std::domain_error);

  EstimateInputs b3;
  b3.N = 6;
  b3.delta = 1.5;
  double m24 = estimate_probe(EstimateKind::B3, b3, 24, 0).max_ratio;
  double m48 = estimate_probe(EstimateKind::B3, b3, 48, 0).max_ratio;
  CHECK(std::isfinite(m24));
  CHECK(std::abs(m48 / m24 - 1.0) < 0.05);

  EstimateInputs b4;
  b4.N = 6;
  b4.mu = 4.0;
  for (double eta : {1.0, 2.5}) {
    b4.eta = eta;
    auto r4 = estimate_probe(EstimateKind::B4, b4, 32, 0);
    CHECK(r4.predicted_exponent == std::min(4.0, eta));
    CHECK(std::abs(r4.decay_exponent - r4.predicted_exponent) < 0.1);
  }
  CHECK_THROWS_AS(estimate_probe(EstimateKind::B3, b3, 0, 0), std::domain_error);
  b3.delta = 4.0;
  CHECK_THROWS_AS(estimate_probe(EstimateKind::B3, b3, 8, 0), std::domain_error);
}

TEST_CASE("balanced lambda window") {
  SystemParams p(6, 1.0);
  PolygonConfig cfg(p, 16, 1.0, Vec(4, 0.0), 1.0);
  cfg.window_regime = true;
  CHECK_THROWS_AS(cfg.validate(), std::domain_error);
  cfg.lambda = std::pow(16.0, lambda_window_exponent(6));
  CHECK_NOTHROW(cfg.validate());
  CHECK(lambda_window_exponent(6) == doctest::Approx(2.0));
}
