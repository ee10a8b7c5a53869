#include "hartree/pohozaev.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "hartree/quadrature.hpp"

namespace hartree {

bool PohozaevDomain::contains(const double* x, int N) const {
  double r = std::hypot(x[0], x[1]);
  double d2 = (r - r0) * (r - r0);
  for (int k = 2; k < N; ++k) d2 += (x[k] - x0pp[k - 2]) * (x[k] - x0pp[k - 2]);
  return d2 <= rho * rho;
}

PohozaevField bubble_field(const Bubble& b, const Potential& K) {
  auto bp = std::make_shared<Bubble>(b);
  const SystemParams& p = b.params;
  double mu = p.mu();
  int N = p.N();
  PohozaevField f;
  f.value = [bp](const double* x) { return bp->value(x); };
  f.gradient = [bp](const double* x, double* g) { bp->gradient(x, g); };
  f.neg_laplacian = [bp](const double* x) { return bp->neg_laplacian(x); };
  auto sampler = std::make_shared<ConvolutionSampler>(N, mu, std::vector<Vec>{b.center},
                                                      std::vector<double>{b.scale});
  const Potential* Kp = &K;
  f.nonlocal_draw = [bp, sampler, Kp, mu, N](const double* x, CounterRng& rng) {
    double c = riesz_convolution_bubble(mu, *bp, x);
    if (Kp->is_unit()) return c;
    auto g = [&](const double* y) { return (Kp->value(y, N) - 1.0) * bp->power(y, mu); };
    return c + sampler->draw(x, 1.0 / bp->scale, g, rng);
  };
  f.centers = {b.center};
  f.scales = {b.scale};
  f.mu = mu;
  f.two_star = p.two_star();
  return f;
}

PohozaevField ansatz_field(const PolygonConfig& cfg, const std::optional<CutoffSpec>& cutoff,
                           const Potential& K) {
  const SystemParams& p = cfg.params;
  int N = p.N();
  double mu = p.mu(), ts = p.two_star();
  auto bubbles = std::make_shared<std::vector<Bubble>>();
  auto z = polygon_centers(cfg);
  for (const auto& c : z) bubbles->emplace_back(p, c, cfg.lambda);
  auto cut = std::make_shared<std::optional<CutoffSpec>>(cutoff);
  auto sampler = std::make_shared<ConvolutionSampler>(N, mu, z, std::vector<double>(cfg.m, cfg.lambda));
  PohozaevField f;
  auto star = [bubbles](const double* x) {
    double s = 0.0;
    for (const auto& b : *bubbles) s += b.value(x);
    return s;
  };
  auto xi_of = [cut, N](const double* x) { return *cut ? cutoff_eval(**cut, x, N) : 1.0; };
  f.value = [star, xi_of](const double* x) { return xi_of(x) * star(x); };
  f.gradient = [bubbles, cut, N](const double* x, double* g) {
    double s = 0.0, gb[kMaxDim];
    for (int i = 0; i < N; ++i) g[i] = 0.0;
    for (const auto& b : *bubbles) {
      s += b.value(x);
      b.gradient(x, gb);
      for (int i = 0; i < N; ++i) g[i] += gb[i];
    }
    if (!*cut) return;
    CutoffJet cj = cutoff_jet(**cut, x, N);
    for (int i = 0; i < N; ++i) g[i] = cj.value * g[i] + s * cj.grad[i];
  };
  f.neg_laplacian = [bubbles, cut, N](const double* x) {
    double s = 0.0, nl = 0.0, gb[kMaxDim], gs[kMaxDim] = {};
    for (const auto& b : *bubbles) {
      s += b.value(x);
      nl += b.neg_laplacian(x);
      b.gradient(x, gb);
      for (int i = 0; i < N; ++i) gs[i] += gb[i];
    }
    if (!*cut) return nl;
    CutoffJet cj = cutoff_jet(**cut, x, N);
    double cross = 0.0;
    for (int i = 0; i < N; ++i) cross += cj.grad[i] * gs[i];
    return cj.value * nl - s * cj.laplacian - 2.0 * cross;
  };
  const Potential* Kp = &K;
  double R = 1.0 / cfg.lambda;
  f.nonlocal_draw = [bubbles, sampler, star, xi_of, Kp, mu, ts, N, R](const double* x, CounterRng& rng) {
    double c = 0.0;
    for (const auto& b : *bubbles) c += riesz_convolution_bubble(mu, b, x);
    auto g = [&](const double* y) {
      double sp = 0.0;
      for (const auto& b : *bubbles) sp += std::pow(b.value(y), ts);
      return Kp->value(y, N) * std::pow(xi_of(y) * star(y), ts) - sp;
    };
    return c + sampler->draw(x, R, g, rng);
  };
  f.centers = z;
  f.scales.assign(cfg.m, cfg.lambda);
  f.mu = mu;
  f.two_star = ts;
  return f;
}

PohozaevField zero_field(int N) {
  PohozaevField f;
  f.value = [](const double*) { return 0.0; };
  f.gradient = [N](const double*, double* g) {
    for (int i = 0; i < N; ++i) g[i] = 0.0;
  };
  f.neg_laplacian = [](const double*) { return 0.0; };
  f.nonlocal_draw = [](const double*, CounterRng&) { return 0.0; };
  return f;
}

bool consistent_with_zero(const PohozaevResult& r, double k) {
  return std::abs(r.value) <= k * r.std_error + 1e-12 * r.abs_scale;
}

namespace {

enum class Pairing { dilation, translation, scaling };

struct Integrand {
  double value = 0.0;
  double abs = 0.0;
};

// One equation's contribution: (-Delta a - K (conv) b^(2*-1)) * pairing(b).
Integrand equation_term(const PohozaevField& a, const PohozaevField& b, const Potential& K,
                        double ts, int N, const double* x, double pairing, CounterRng& rng) {
  double bv = b.value(x);
  double lap = a.neg_laplacian(x);
  double nl = 0.0;
  if (bv > 0.0) nl = K.value(x, N) * b.nonlocal_draw(x, rng) * std::pow(bv, ts - 1.0);
  return {(lap - nl) * pairing, (std::abs(lap) + std::abs(nl)) * std::abs(pairing)};
}

PohozaevResult run(const PohozaevField& u, const PohozaevField& v, const Potential& K1,
                   const Potential& K2, const PohozaevDomain* dom, Pairing kind, int axis,
                   const std::function<double(const double*)>& dlambda, int N,
                   const MonteCarloSpec& mc) {
  if (!u.value || !v.value) throw std::domain_error("pohozaev: fields must be set");
  double mu = u.mu > 0.0 ? u.mu : v.mu;
  double ts = u.two_star > 0.0 ? u.two_star : v.two_star;
  std::vector<Vec> centers = u.centers;
  std::vector<double> scales = u.scales;
  centers.insert(centers.end(), v.centers.begin(), v.centers.end());
  scales.insert(scales.end(), v.scales.begin(), v.scales.end());
  if (centers.empty()) {
    // No proposal: integrand is identically zero for zero fields.
    PohozaevResult r;
    r.samples = mc.sample_count;
    return r;
  }
  ConvolutionSampler proposal(N, mu, centers, scales);
  std::vector<double> abs_vals(mc.sample_count);
  auto acc = mc_accumulate(mc.sample_count, [&](std::size_t i) {
    CounterRng rng(mc.seed, i);
    double x[kMaxDim];
    double p = proposal.sample_bubble(rng, x);
    abs_vals[i] = 0.0;
    if (dom && !dom->contains(x, N)) return 0.0;
    if (!(p > 0.0)) return 0.0;
    double gu[kMaxDim], gv[kMaxDim];
    double pu = 0.0, pv = 0.0;
    if (kind == Pairing::scaling) {
      pu = pv = dlambda(x);
    } else {
      u.gradient(x, gu);
      v.gradient(x, gv);
      if (kind == Pairing::translation) {
        pu = gu[axis];
        pv = gv[axis];
      } else {
        for (int k = 0; k < N; ++k) {
          pu += x[k] * gu[k];
          pv += x[k] * gv[k];
        }
      }
    }
    Integrand a = equation_term(u, v, K1, ts, N, x, pv, rng);
    Integrand b = equation_term(v, u, K2, ts, N, x, pu, rng);
    abs_vals[i] = (a.abs + b.abs) / p;
    return (a.value + b.value) / p;
  });
  PohozaevResult r;
  r.value = acc.mean;
  r.std_error = acc.std_error();
  MCAccumulator abs_acc;
  for (double a : abs_vals) abs_acc.add(a);
  r.abs_scale = abs_acc.mean;
  r.samples = mc.sample_count;
  return r;
}

void check_domain(const PohozaevDomain& dom, int N) {
  if (!(dom.rho > 0.0)) throw std::domain_error("PohozaevDomain: rho must be positive");
  if (static_cast<int>(dom.x0pp.size()) != N - 2) throw std::domain_error("PohozaevDomain: x0pp size");
}

}  // namespace


PohozaevResult pohozaev_dilation_residual(const PohozaevField& u, const PohozaevField& v,
                                          const Potential& K1, const Potential& K2,
                                          const PohozaevDomain& dom, const MonteCarloSpec& mc) {
  int N = static_cast<int>(dom.x0pp.size()) + 2;
  check_domain(dom, N);
  return run(u, v, K1, K2, &dom, Pairing::dilation, 0, {}, N, mc);
}

PohozaevResult pohozaev_translation_residual(const PohozaevField& u, const PohozaevField& v,
                                             const Potential& K1, const Potential& K2,
                                             const PohozaevDomain& dom, int i,
                                             const MonteCarloSpec& mc) {
  int N = static_cast<int>(dom.x0pp.size()) + 2;
  check_domain(dom, N);
  if (i < 3 || i > N) throw std::domain_error("pohozaev: translation index must lie in 3..N");
  return run(u, v, K1, K2, &dom, Pairing::translation, i - 1, {}, N, mc);
}

PohozaevResult pohozaev_scaling_residual(const PohozaevField& u, const PohozaevField& v,
                                         const PolygonConfig& cfg,
                                         const std::optional<CutoffSpec>& cutoff,
                                         const Potential& K1, const Potential& K2,
                                         const MonteCarloSpec& mc) {
  cfg.validate();
  int N = cfg.params.N();
  std::vector<Bubble> bubbles;
  for (const auto& c : polygon_centers(cfg)) bubbles.emplace_back(cfg.params, c, cfg.lambda);
  auto dlambda = [&](const double* x) {
    double s = 0.0;
    for (const auto& b : bubbles) s += b.dlambda(x);
    return cutoff ? cutoff_eval(*cutoff, x, N) * s : s;
  };
  return run(u, v, K1, K2, nullptr, Pairing::scaling, 0, dlambda, N, mc);
}

namespace {

// g = -1/(1 - s^2), s = rho / R; the bump is A exp(g).
double bump_g1(double rho, double R) {
  double s = rho / R, w = 1.0 - s * s;
  return -2.0 * s / (R * w * w);
}

double bump_g1_over_rho(double rho, double R) {
  double s = rho / R, w = 1.0 - s * s;
  return -2.0 / (R * R * w * w);
}

double bump_g2(double rho, double R) {
  double s = rho / R, w = 1.0 - s * s;
  return -2.0 * (1.0 + 3.0 * s * s) / (R * R * w * w * w);
}

}  // namespace

double RadialBump::value(double rho) const {
  if (rho >= radius) return 0.0;
  double s = rho / radius;
  return amplitude * std::exp(-1.0 / (1.0 - s * s));
}

double RadialBump::d1(double rho) const {
  if (rho >= radius) return 0.0;
  return value(rho) * bump_g1(rho, radius);
}

double RadialBump::d2(double rho) const {
  if (rho >= radius) return 0.0;
  double g1 = bump_g1(rho, radius);
  return value(rho) * (g1 * g1 + bump_g2(rho, radius));
}

double RadialBump::neg_laplacian(double rho, int N) const {
  if (rho >= radius) return 0.0;
  return -(d2(rho) + (N - 1) * value(rho) * bump_g1_over_rho(rho, radius));
}

D12Check identity_check_d12(const RadialBump& u, const RadialBump& v, double k1, double k2,
                            const PohozaevDomain& dom, const SystemParams& p, double tol) {
  int N = p.N();
  double mu = p.mu(), ts = p.two_star();
  check_domain(dom, N);
  if (static_cast<int>(u.center.size()) != N || u.center != v.center)
    throw std::domain_error("identity_check_d12: bumps must be concentric in R^N");
  if (!(mu + 1.0 < N)) throw std::domain_error("identity_check_d12: needs mu + 1 < N");
  double reach = cutoff_distance(CutoffSpec{dom.r0, dom.x0pp, 0.0}, u.center.data(), N) +
                 std::max(u.radius, v.radius);
  if (reach > dom.rho) throw std::domain_error("identity_check_d12: support leaves D_rho");

  // Radial integrals over the ball containing both supports; the weight is |S^(N-1)| rho^(N-1).
  double R = std::max(u.radius, v.radius);
  double area = sphere_surface_area(N);
  auto integrate = [&](const std::function<double(double)>& f) {
    auto r = adaptive_integrate([&](double s) { return f(s) * std::pow(s, N - 1); }, 0.0, R, tol,
                                0.0, 1 << 16);
    return area * r.value;
  };
  auto power = [ts](const RadialBump& b) {
    return [&b, ts](double s) { return std::pow(b.value(s), ts); };
  };
  auto fu = power(u), fv = power(v);
  RadialConvOptions unit{AngularFactor::unit, R, tol};
  RadialConvOptions vec{AngularFactor::radial_vec, R, tol};
  auto W = [&](const std::function<double(double)>& f, double s) {
    return radial_convolution(mu, f, s, N, unit);
  };
  auto Q = [&](const std::function<double(double)>& f, double s) {
    return radial_convolution(mu, f, s, N, vec);
  };

  D12Check out;
  double grad_pair = integrate([&](double s) {
    return u.neg_laplacian(s, N) * s * v.d1(s) + v.neg_laplacian(s, N) * s * u.d1(s);
  });
  double nl_v = integrate([&](double s) {
    double vv = v.value(s);
    return vv > 0.0 ? W(fv, s) * std::pow(vv, ts - 1.0) * s * v.d1(s) : 0.0;
  });
  double nl_u = integrate([&](double s) {
    double uu = u.value(s);
    return uu > 0.0 ? W(fu, s) * std::pow(uu, ts - 1.0) * s * u.d1(s) : 0.0;
  });
  out.lhs = grad_pair - k1 * k1 * nl_v - k2 * k2 * nl_u;

  out.blocks.gradient = -(N - 2) * integrate([&](double s) { return u.d1(s) * v.d1(s); });
  auto conv_block = [&](const std::function<double(double)>& f) {
    double a = integrate([&](double s) { return f(s) > 0.0 ? W(f, s) * f(s) : 0.0; });
    double b = integrate([&](double s) { return f(s) > 0.0 ? f(s) * s * Q(f, s) : 0.0; });
    return N * a - mu * b;
  };
  out.blocks.convolution = (k1 * k1 * conv_block(fv) + k2 * k2 * conv_block(fu)) / ts;
  out.blocks.k_derivative = 0.0;
  out.rhs = out.blocks.gradient + out.blocks.convolution + out.blocks.k_derivative;
  return out;
}

}  // namespace hartree
