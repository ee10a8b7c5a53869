#include "hartree/multibubble.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hartree/quadrature.hpp"

namespace hartree {

PolygonConfig::PolygonConfig(const SystemParams& p, int m_, double r, Vec xpp, double l)
    : m(m_), r_bar(r), x_bar_pp(std::move(xpp)), lambda(l), params(p) {
  if (x_bar_pp.empty()) x_bar_pp.assign(p.N() - 2, 0.0);
  validate();
}

double lambda_window_exponent(int N) {
  if (N < 5) throw std::domain_error("lambda_window_exponent: N must be >= 5");
  return (N - 2.0) / (N - 4.0);
}

void PolygonConfig::validate() const {
  if (m < 1) throw std::domain_error("PolygonConfig: m must be >= 1");
  if (!(r_bar > 0.0)) throw std::domain_error("PolygonConfig: r_bar must be positive");
  if (!(lambda > 0.0)) throw std::domain_error("PolygonConfig: lambda must be positive");
  if (static_cast<int>(x_bar_pp.size()) != params.N() - 2) {
    throw std::domain_error("PolygonConfig: x_bar_pp must have N - 2 entries");
  }
  if (window_regime) {
    double e = std::pow(static_cast<double>(m), lambda_window_exponent(params.N()));
    if (lambda < L0 * e || lambda > L1 * e) {
      throw std::domain_error("PolygonConfig: lambda outside the balanced lambda window");
    }
  }
}

std::vector<Vec> polygon_centers(const PolygonConfig& cfg) {
  int N = cfg.params.N();
  std::vector<Vec> z(cfg.m, Vec(N, 0.0));
  for (int j = 0; j < cfg.m; ++j) {
    double th = 2.0 * j * M_PI / cfg.m;
    z[j][0] = cfg.r_bar * std::cos(th);
    z[j][1] = cfg.r_bar * std::sin(th);
    for (int k = 2; k < N; ++k) z[j][k] = cfg.x_bar_pp[k - 2];
  }
  return z;
}

double interaction_sum(int m, double r_bar, double p) {
  double s = 0.0;
  for (int j = 2; j <= m; ++j) s += std::pow(2.0 * r_bar * std::sin((j - 1) * M_PI / m), -p);
  return s;
}

double interaction_sum(const PolygonConfig& cfg, double p) {
  return interaction_sum(cfg.m, cfg.r_bar, p);
}

namespace {

// psi(s) = 1 / (1 + e^q), q = 1/(1-s) - 1/s.
struct StepJet {
  double v, d1, d2;
};

StepJet step_jet(double s) {
  if (s <= 0.0) return {1.0, 0.0, 0.0};
  if (s >= 1.0) return {0.0, 0.0, 0.0};
  double q = 1.0 / (1.0 - s) - 1.0 / s;
  double q1 = 1.0 / (s * s) + 1.0 / ((1.0 - s) * (1.0 - s));
  double q2 = -2.0 / (s * s * s) + 2.0 / std::pow(1.0 - s, 3);
  double v = 1.0 / (1.0 + std::exp(q));
  double c = std::cosh(0.5 * q);
  double vv = std::isfinite(c) ? 0.25 / (c * c) : 0.0;  // v (1 - v)
  double d1 = -vv * q1;
  double d2 = -d1 * (1.0 - 2.0 * v) * q1 - vv * q2;
  return {v, d1, d2};
}

}  // namespace

double cutoff_profile(double s) { return step_jet(s).v; }

double cutoff_distance(const CutoffSpec& spec, const double* x, int N) {
  double r = std::hypot(x[0], x[1]);
  double d2 = (r - spec.r0) * (r - spec.r0);
  for (int k = 2; k < N; ++k) d2 += (x[k] - spec.x0pp[k - 2]) * (x[k] - spec.x0pp[k - 2]);
  return std::sqrt(d2);
}

double cutoff_eval(const CutoffSpec& spec, const double* x, int N) {
  return cutoff_profile((cutoff_distance(spec, x, N) - spec.delta) / spec.delta);
}

double cutoff_eval(const CutoffSpec& spec, const Vec& x) {
  return cutoff_eval(spec, x.data(), static_cast<int>(x.size()));
}

CutoffJet cutoff_jet(const CutoffSpec& spec, const double* x, int N) {
  CutoffJet out;
  out.grad.assign(N, 0.0);
  double r = std::hypot(x[0], x[1]);
  double d = cutoff_distance(spec, x, N);
  double dl = spec.delta;
  StepJet s = step_jet((d - dl) / dl);
  out.value = s.v;
  if (s.d1 == 0.0 && s.d2 == 0.0) return out;
  double h1 = s.d1 / dl, h2 = s.d2 / (dl * dl);
  // Gradient in (r, x''), then through r = |x'|.
  double gr = h1 * (r - spec.r0) / d;
  out.grad[0] = gr * x[0] / r;
  out.grad[1] = gr * x[1] / r;
  for (int k = 2; k < N; ++k) out.grad[k] = h1 * (x[k] - spec.x0pp[k - 2]) / d;
  // Radial Laplacian in the N-1 reduced variables plus the F_r / r term from x' in R^2.
  out.laplacian = h2 + (N - 2.0) * h1 / d + gr / r;
  return out;
}

double ansatz_eval(const PolygonConfig& cfg, const CutoffSpec& cutoff, AnsatzField which,
                   const Vec& x) {
  int N = cfg.params.N();
  if (static_cast<int>(x.size()) != N) throw std::domain_error("ansatz_eval: dimension");
  double s = 0.0;
  for (const auto& z : polygon_centers(cfg)) s += Bubble(cfg.params, z, cfg.lambda).value(x.data());
  if (which == AnsatzField::Z || which == AnsatzField::Y) s *= cutoff_eval(cutoff, x);
  return s;
}

StarJet ansatz_star_jet(const PolygonConfig& cfg, const double* x) {
  int N = cfg.params.N();
  StarJet out;
  out.grad.assign(N, 0.0);
  double g[kMaxDim];
  for (const auto& z : polygon_centers(cfg)) {
    Bubble b(cfg.params, z, cfg.lambda);
    out.value += b.value(x);
    b.gradient(x, g);
    for (int i = 0; i < N; ++i) out.grad[i] += g[i];
  }
  return out;
}

double derivative_basis_eval(const PolygonConfig& cfg, const CutoffSpec& cutoff, int j, int l,
                             const Vec& x) {
  int N = cfg.params.N();
  if (j < 1 || j > cfg.m) throw std::domain_error("derivative_basis_eval: j out of range");
  if (l < 1 || l > N) throw std::domain_error("derivative_basis_eval: l out of range");
  if (static_cast<int>(x.size()) != N) throw std::domain_error("derivative_basis_eval: dimension");
  double xi = cutoff_eval(cutoff, x);
  if (xi == 0.0) return 0.0;
  double th = 2.0 * (j - 1) * M_PI / cfg.m;
  Bubble b(cfg.params, polygon_centers(cfg)[j - 1], cfg.lambda);
  if (l == 1) return xi * b.dlambda(x.data());
  double g[kMaxDim];
  b.gradient(x.data(), g);
  // d/dz U = -grad_x U.
  if (l == 2) return -xi * (g[0] * std::cos(th) + g[1] * std::sin(th));
  return -xi * g[l - 1];
}

double norm_weight(const PolygonConfig& cfg, NormKind kind, double tau, const double* x) {
  int N = cfg.params.N();
  double e = (kind == NormKind::star ? 0.5 * (N - 2.0) : 0.5 * (N + 2.0)) + tau;
  double w = 0.0;
  for (const auto& z : polygon_centers(cfg)) {
    double d2 = 0.0;
    for (int i = 0; i < N; ++i) d2 += (x[i] - z[i]) * (x[i] - z[i]);
    w += std::pow(1.0 + cfg.lambda * std::sqrt(d2), -e);
  }
  return w;
}

namespace {

double norm_prefactor(const PolygonConfig& cfg, NormKind kind) {
  int N = cfg.params.N();
  double e = kind == NormKind::star ? 0.5 * (N - 2.0) : 0.5 * (N + 2.0);
  return std::pow(cfg.lambda, -e);
}

}  // namespace

NormResult weighted_norm_values(NormKind kind, const std::vector<double>& values,
                                const PolygonConfig& cfg, const WeightedNormSpec& spec) {
  if (spec.sample_set.empty()) throw std::domain_error("weighted_norm: empty sample set");
  if (values.size() != spec.sample_set.size()) throw std::domain_error("weighted_norm: size mismatch");
  if (!(spec.eta_bar > 0.0)) throw std::domain_error("weighted_norm: eta_bar must be positive");
  double pre = norm_prefactor(cfg, kind);
  NormResult out;
  out.samples = values.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    double w = norm_weight(cfg, kind, spec.tau(), spec.sample_set[i].data());
    double v = pre * std::abs(values[i]) / w;
    if (v > out.value) {
      out.value = v;
      out.argmax = i;
    }
  }
  return out;
}

NormResult weighted_norm(NormKind kind, const std::function<double(const Vec&)>& field,
                         const PolygonConfig& cfg, const WeightedNormSpec& spec) {
  if (spec.sample_set.empty()) throw std::domain_error("weighted_norm: empty sample set");
  std::vector<double> v(spec.sample_set.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = field(spec.sample_set[i]);
  return weighted_norm_values(kind, v, cfg, spec);
}

namespace {

Vec from_reduced(int N, double r, double theta, const Vec& xpp) {
  Vec x(N, 0.0);
  x[0] = r * std::cos(theta);
  x[1] = r * std::sin(theta);
  for (int k = 2; k < N; ++k) x[k] = xpp[k - 2];
  return x;
}

}  // namespace

std::vector<Vec> structured_sample_set(const PolygonConfig& cfg, const CutoffSpec& cutoff,
                                       int random_fill, std::uint64_t seed) {
  int N = cfg.params.N();
  double l = cfg.lambda;
  std::vector<Vec> pts;
  auto z = polygon_centers(cfg);
  pts.push_back(z[0]);
  if (cfg.m >= 2) {
    Vec mid(N);
    for (int i = 0; i < N; ++i) mid[i] = 0.5 * (z[0][i] + z[1][i]);
    pts.push_back(mid);
  }
  // Radial rays from the first peak at bubble-scale distances.
  const int kDirs = 3;
  for (double k : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0}) {
    for (int d = 0; d < kDirs; ++d) {
      Vec x = z[0];
      x[d == 2 ? 2 : d] += (d == 1 ? 1.0 : (d == 0 ? -1.0 : 1.0)) * k / l;
      pts.push_back(x);
    }
  }
  // Cutoff band at two angles.
  for (double th : {0.0, M_PI / std::max(cfg.m, 1)}) {
    for (double f : {1.1, 1.3, 1.5, 1.7, 1.9}) {
      double rr = cutoff.r0 + f * cutoff.delta;
      pts.push_back(from_reduced(N, rr, th, cutoff.x0pp));
      Vec xpp = cutoff.x0pp;
      xpp[0] += f * cutoff.delta;
      pts.push_back(from_reduced(N, cutoff.r0, th, xpp));
    }
  }
  // Random fill in the first sector within reduced distance 2 delta of the cutoff center.
  for (int i = 0; i < random_fill; ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    double u[kMaxDim];
    rng.unit_vector(N - 1, u);
    double rad = 2.0 * cutoff.delta * std::pow(rng.uniform(), 1.0 / (N - 1));
    double th = rng.uniform() * M_PI / std::max(cfg.m, 1);
    Vec xpp = cutoff.x0pp;
    for (int k = 0; k < N - 2; ++k) xpp[k] += rad * u[k + 1];
    pts.push_back(from_reduced(N, std::max(1e-9, cutoff.r0 + rad * u[0]), th, xpp));
  }
  return pts;
}

LmPoint lm_point(const PolygonConfig& cfg, const CutoffSpec& cutoff, const Potential& K1,
                 const Potential& K2, const Vec& x, const MonteCarloSpec& mc,
                 std::uint64_t stream) {
  const SystemParams& p = cfg.params;
  int N = p.N();
  double mu = p.mu(), ts = p.two_star();
  auto z = polygon_centers(cfg);
  std::vector<Bubble> bubbles;
  for (const auto& c : z) bubbles.emplace_back(p, c, cfg.lambda);
  std::vector<double> scales(cfg.m, cfg.lambda);
  ConvolutionSampler sampler(N, mu, z, scales);

  CutoffJet xi = cutoff_jet(cutoff, x.data(), N);
  StarJet star = ansatz_star_jet(cfg, x.data());
  double commutator = star.value * xi.laplacian;
  for (int i = 0; i < N; ++i) commutator += 2.0 * xi.grad[i] * star.grad[i];

  // Closed-form part: sum_j conv(U_j^2*) at x and the cutoffed bubble sum.
  double closed = 0.0, bubble_sum = 0.0;
  for (const auto& b : bubbles) {
    double c = riesz_convolution_bubble(mu, b, x.data());
    closed += c;
    bubble_sum += c * std::pow(b.value(x.data()), ts - 1.0);
  }
  double Y = xi.value * star.value;

  auto one = [&](const Potential& K, std::uint64_t s, double& l, double& se) {
    // conv(K Y^2*) = closed + conv(K Y^2* - sum_j U_j^2*).
    auto g = [&](const double* y) {
      double sum_pow = 0.0, star_y = 0.0;
      for (const auto& b : bubbles) {
        double u = b.value(y);
        star_y += u;
        sum_pow += std::pow(u, ts);
      }
      double yv = cutoff_eval(cutoff, y, N) * star_y;
      return K.value(y, N) * std::pow(yv, ts) - sum_pow;
    };
    auto acc = mc_accumulate(mc.sample_count, [&](std::size_t i) {
      CounterRng rng(mc.seed ^ mix64(s), i);
      return sampler.draw(x.data(), 1.0 / cfg.lambda, g, rng);
    });
    double k = K.value(x.data(), N);
    double yp = Y > 0.0 ? std::pow(Y, ts - 1.0) : 0.0;
    l = k * (closed + acc.mean) * yp - xi.value * bubble_sum + commutator;
    se = k * acc.std_error() * yp;
  };
  LmPoint out;
  out.x = x;
  one(K1, mix64(stream) ^ 1, out.l1, out.se1);
  one(K2, mix64(stream) ^ 2, out.l2, out.se2);
  return out;
}

LmProbeResult residual_lm_probe(const PolygonConfig& cfg, const CutoffSpec& cutoff,
                                const Potential& K1, const Potential& K2,
                                const WeightedNormSpec& norm_spec, const MonteCarloSpec& mc,
                                double rel_tol) {
  if (norm_spec.sample_set.empty()) throw std::domain_error("residual_lm_probe: empty sample set");
  int N = cfg.params.N();
  for (const auto& x : norm_spec.sample_set) {
    if (cutoff_distance(cutoff, x.data(), N) <= 10.0 * cutoff.delta &&
        (K1.value(x.data(), N) <= 0.0 || K2.value(x.data(), N) <= 0.0)) {
      throw std::domain_error("residual_lm_probe: potential not positive near the cutoff center");
    }
  }
  LmProbeResult out;
  double pre = norm_prefactor(cfg, NormKind::starstar);
  double max_se = 0.0;
  for (std::size_t i = 0; i < norm_spec.sample_set.size(); ++i) {
    LmPoint pt = lm_point(cfg, cutoff, K1, K2, norm_spec.sample_set[i], mc, i);
    double w = norm_weight(cfg, NormKind::starstar, norm_spec.tau(), pt.x.data());
    pt.weighted = pre * (std::abs(pt.l1) + std::abs(pt.l2)) / w;
    double se = pre * (pt.se1 + pt.se2) / w;
    max_se = std::max(max_se, se);
    if (pt.weighted > out.norm_estimate) {
      out.norm_estimate = pt.weighted;
      out.std_error = se;
    }
    out.per_point.push_back(std::move(pt));
  }
  // Flagged when some point's error could move the sup by more than rel_tol.
  out.flagged = max_se > rel_tol * out.norm_estimate;
  if (out.flagged) out.note = "Monte Carlo error above the requested tolerance at some points";
  return out;
}

namespace {

EstimateResult probe_b2(const EstimateInputs& in, std::size_t n, std::uint64_t seed) {
  if (!(in.a >= 1.0 && in.b >= 1.0)) throw std::domain_error("estimate_probe B2: exponents must be >= 1");
  if (!(in.delta > 0.0 && in.delta <= std::min(in.a, in.b))) {
    throw std::domain_error("estimate_probe B2: delta must lie in (0, min(a, b)]");
  }
  if (!(in.separation > 0.0)) throw std::domain_error("estimate_probe B2: separation must be positive");
  int N = in.N;
  double L = in.separation;
  double e = in.a + in.b - in.delta;
  EstimateResult out;
  std::vector<double> ratio(n);
#pragma omp parallel for
  for (long long i = 0; i < static_cast<long long>(n); ++i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    double u[kMaxDim];
    rng.unit_vector(N, u);
    // Log-uniform distance from a randomly chosen center.
    double rho = 1e-3 * std::pow(1e6 * (1.0 + L), rng.uniform());
    bool at_k = rng.uniform() < 0.5;
    double x[kMaxDim];
    for (int k = 0; k < N; ++k) x[k] = rho * u[k];
    if (at_k) x[0] += L;
    double dj = 0.0, dk = 0.0;
    for (int k = 0; k < N; ++k) {
      dj += x[k] * x[k];
      double y = x[k] - (k == 0 ? L : 0.0);
      dk += y * y;
    }
    dj = std::sqrt(dj);
    dk = std::sqrt(dk);
    double g = std::pow(1.0 + dj, -in.a) * std::pow(1.0 + dk, -in.b);
    double rhs = std::pow(L, -in.delta) * (std::pow(1.0 + dj, -e) + std::pow(1.0 + dk, -e));
    ratio[i] = g / rhs;
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.samples.push_back({static_cast<double>(i), ratio[i]});
    out.max_ratio = std::max(out.max_ratio, ratio[i]);
  }
  return out;
}

std::vector<double> radius_grid(std::size_t n, double r_max) {
  std::vector<double> r{0.0};
  for (std::size_t i = 1; i < n; ++i) {
    r.push_back(1e-2 * std::pow(r_max / 1e-2, (i - 1.0) / std::max<double>(1.0, n - 2.0)));
  }
  return r;
}

EstimateResult probe_b3(const EstimateInputs& in, std::size_t n) {
  int N = in.N;
  if (N < 5) throw std::domain_error("estimate_probe B3: N must be >= 5");
  if (!(in.delta > 0.0 && in.delta < N - 2.0)) {
    throw std::domain_error("estimate_probe B3: delta must lie in (0, N - 2)");
  }
  auto f = [&](double s) { return std::pow(1.0 + s, -(2.0 + in.delta)); };
  auto r = radius_grid(std::max<std::size_t>(n, 3), in.r_max);
  EstimateResult out;
  out.samples.resize(r.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(r.size()); ++i) {
    double c = radial_convolution(N - 2.0, f, r[i], N, {AngularFactor::unit, INFINITY, 1e-9});
    out.samples[i] = {r[i], c * std::pow(1.0 + r[i], in.delta)};
  }
  for (const auto& s : out.samples) out.max_ratio = std::max(out.max_ratio, s.ratio);
  return out;
}

EstimateResult probe_b4(const EstimateInputs& in, std::size_t n) {
  int N = in.N;
  if (N < 5) throw std::domain_error("estimate_probe B4: N must be >= 5");
  if (!(in.eta > 0.0)) throw std::domain_error("estimate_probe B4: eta must be positive");
  if (!(in.mu > 0.0 && in.mu < N)) throw std::domain_error("estimate_probe B4: mu outside (0, N)");
  double ex = std::min(in.mu, in.eta);
  auto f = [&](double s) { return std::pow(1.0 + s, -(N - in.mu + in.eta)); };
  auto r = radius_grid(std::max<std::size_t>(n, 3), in.r_max);
  EstimateResult out;
  out.samples.resize(r.size());
  std::vector<double> conv(r.size());
#pragma omp parallel for schedule(dynamic)
  for (long long i = 0; i < static_cast<long long>(r.size()); ++i) {
    conv[i] = radial_convolution(in.mu, f, r[i], N, {AngularFactor::unit, INFINITY, 1e-9});
    out.samples[i] = {r[i], conv[i] * std::pow(1.0 + r[i], ex)};
  }
  for (const auto& s : out.samples) out.max_ratio = std::max(out.max_ratio, s.ratio);
  // Least-squares slope of log conv against log(1 + r) over the top decade.
  double sx = 0, sy = 0, sxx = 0, sxy = 0, k = 0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] < 0.1 * in.r_max) continue;
    double lx = std::log1p(r[i]), ly = std::log(conv[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    k += 1.0;
  }
  if (k >= 2.0) out.decay_exponent = -(k * sxy - sx * sy) / (k * sxx - sx * sx);
  out.predicted_exponent = ex;
  return out;
}

}  // namespace

EstimateResult estimate_probe(EstimateKind which, const EstimateInputs& in, std::size_t sample_count,
                              std::uint64_t seed) {
  if (sample_count == 0) throw std::domain_error("estimate_probe: zero samples");
  switch (which) {
    case EstimateKind::B2:
      return probe_b2(in, sample_count, seed);
    case EstimateKind::B3:
      return probe_b3(in, sample_count);
    case EstimateKind::B4:
      return probe_b4(in, sample_count);
  }
  return {};
}

}  // namespace hartree
