#include "hartree/reduced_energy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hartree/bubble.hpp"
#include "hartree/quadrature.hpp"

namespace hartree {

PotentialPair PotentialPair::quadratic(int N, double r0, Vec x0pp, double delta, Eigen::MatrixXd q1,
                                       Eigen::MatrixXd q2) {
  PotentialPair p;
  p.N = N;
  p.r0 = r0;
  p.x0pp = x0pp.empty() ? Vec(N - 2, 0.0) : std::move(x0pp);
  p.delta = delta;
  p.q1 = std::move(q1);
  p.q2 = std::move(q2);
  return p;
}

AxialPolynomialPotential PotentialPair::K1() const {
  return AxialPolynomialPotential(r0, x0pp, q1, quartic1, linear1);
}

AxialPolynomialPotential PotentialPair::K2() const {
  return AxialPolynomialPotential(r0, x0pp, q2, quartic2, linear2);
}

Eigen::VectorXd PotentialPair::critical_point() const {
  Eigen::VectorXd c(N - 1);
  c(0) = r0;
  for (int i = 0; i < N - 2; ++i) c(i + 1) = x0pp[i];
  return c;
}

Eigen::VectorXd PotentialPair::grad_sum(const Eigen::VectorXd& rx) const {
  return K1().gradient_reduced(rx) + K2().gradient_reduced(rx);
}

PotentialReport potential_checks(const PotentialPair& p) {
  PotentialReport rep;
  auto k1 = p.K1(), k2 = p.K2();
  Eigen::VectorXd c = p.critical_point();
  rep.values_one = std::abs(k1.value_reduced(c) - 1.0) < 1e-12 && std::abs(k2.value_reduced(c) - 1.0) < 1e-12;
  if (!rep.values_one) rep.diagnostics.push_back("K1 or K2 differs from 1 at the critical point");
  rep.common_critical_point = (k1.gradient_reduced(c) + k2.gradient_reduced(c)).norm() < 1e-12;
  if (!rep.common_critical_point) rep.diagnostics.push_back("grad(K1 + K2) nonzero at the critical point");
  rep.laplacian1 = k1.laplacian_at_critical();
  rep.laplacian2 = k2.laplacian_at_critical();
  rep.condition_II = rep.laplacian1 < 0.0 && rep.laplacian2 < 0.0;
  if (!rep.condition_II) rep.diagnostics.push_back("condition (II) violated: Laplacian of K_i not negative");
  Eigen::MatrixXd H = k1.hessian_reduced(c) + k2.hessian_reduced(c);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(H);
  double det = lu.determinant();
  double scale = std::pow(std::max(H.cwiseAbs().maxCoeff(), 1e-300), H.rows());
  rep.nondegenerate = lu.rank() == H.rows() && std::abs(det) > 1e-12 * scale;
  rep.degree_proxy = rep.nondegenerate ? (det > 0.0 ? 1 : -1) : 0;
  if (!rep.nondegenerate) rep.diagnostics.push_back("degenerate critical point");
  // K_i > 0 on the 10 delta ball: sample the reduced sphere shells and the axes.
  rep.positive_on_ball = true;
  int d = p.N - 1;
  for (int s = 0; s < 4096 && rep.positive_on_ball; ++s) {
    CounterRng rng(0x5eed, static_cast<std::uint64_t>(s));
    double u[kMaxDim];
    rng.unit_vector(d, u);
    double rad = 10.0 * p.delta * (s % 8 + 1) / 8.0;
    Eigen::VectorXd w = c;
    for (int i = 0; i < d; ++i) w(i) += rad * u[i];
    if (w(0) <= 0.0) continue;
    // Evaluate the unclamped polynomial so the floor cannot mask a sign change.
    auto raw = [&](const Eigen::MatrixXd& q, double quart, const Eigen::VectorXd& g) {
      Eigen::VectorXd dw = w - c;
      double n2 = dw.squaredNorm();
      double lin = g.size() ? g.dot(dw) : 0.0;
      return 1.0 + lin + 0.5 * dw.dot(q * dw) + quart * n2 * n2;
    };
    if (raw(p.q1, p.quartic1, p.linear1) <= 0.0 || raw(p.q2, p.quartic2, p.linear2) <= 0.0) {
      rep.positive_on_ball = false;
    }
  }
  if (!rep.positive_on_ball) rep.diagnostics.push_back("K_i not positive on the 10 delta ball");
  return rep;
}

double constant_B1_pair(const SystemParams& params) {
  int N = params.N();
  double mu = params.mu();
  double c = conv_constant(mu, params) * std::pow(params.C(), params.two_star());
  auto f = [&](double r) { return std::pow(1.0 + r * r, -0.5 * mu) * std::pow(1.0 + r * r, -0.5 * (N + params.alpha())); };
  return c * radial_integral(f, N, 1e-13);
}

double constant_A2(const SystemParams& params) {
  int N = params.N();
  double c = conv_constant(params.mu(), params) * std::pow(params.C(), params.two_star());
  auto f = [&](double r) { return r * r * std::pow(1.0 + r * r, -static_cast<double>(N)); };
  return c * radial_integral(f, N, 1e-13);
}

B3Result constant_B3(const SystemParams& params, const PotentialPair& pot) {
  B3Result out;
  double lap = pot.K1().laplacian_at_critical() + pot.K2().laplacian_at_critical();
  int N = params.N();
  out.value = constant_A2(params) * std::abs(lap) / (2.0 * params.two_star() * N);
  out.sign_ok = lap < 0.0;
  if (!out.sign_ok) out.diagnostic = "Laplacian of K1 + K2 is not negative; the balance has no root";
  return out;
}

double constant_B4_asymptotic(const SystemParams& params) {
  int N = params.N();
  double C = params.C();
  return (N - 2.0) * N * (N - 2.0) * C * C * ball_volume(N);
}

B4Result constant_B4(const SystemParams& params, const B4Options& opt) {
  if (opt.separations.size() < 2) throw std::domain_error("constant_B4: need at least two separations");
  int N = params.N();
  double J0 = params.constants().A1 * (1.0 - 1.0 / params.two_star());
  ConstantPotential one;
  B4Result out;
  out.asymptotic = constant_B4_asymptotic(params);
  for (double d : opt.separations) {
    if (!(d > 0.0)) throw std::domain_error("constant_B4: separations must be positive");
    PolygonConfig cfg(params, 2, 0.5 * d, Vec(N - 2, 0.0), 1.0);
    EnergyEstimate e = energy_estimate(cfg, std::nullopt, one, one, opt.mc);
    out.points.push_back({d, 2.0 * J0 - e.J, e.std_error});
  }
  // Weighted log-log slope, and a weighted least-squares fit of
  // a d^-(N-2) + b d^-(N-alpha); the second term is the far-field cross
  // convolution of the two bubble densities. It is dropped when the exponents nearly coincide.
  double mu = params.mu();
  bool two_term = std::abs(mu - (N - 2.0)) > 0.25 && out.points.size() >= 3;
  Eigen::MatrixXd A(out.points.size(), two_term ? 2 : 1);
  Eigen::VectorXd rhs(out.points.size());
  double sw = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < out.points.size(); ++i) {
    const auto& p = out.points[i];
    double s = 1.0 / std::max(p.std_error, 1e-300);
    A(i, 0) = s * std::pow(p.separation, -(N - 2.0));
    if (two_term) A(i, 1) = s * std::pow(p.separation, -mu);
    rhs(i) = s * p.interaction;
    if (p.interaction > 0.0) {
      double lx = std::log(p.separation), ly = std::log(p.interaction);
      double wl = p.interaction * p.interaction * s * s;  // 1/var of log
      sw += wl;
      sx += wl * lx;
      sy += wl * ly;
      sxx += wl * lx * lx;
      sxy += wl * lx * ly;
    }
  }
  out.fitted_exponent = -(sw * sxy - sx * sy) / (sw * sxx - sx * sx);
  Eigen::MatrixXd AtA = A.transpose() * A;
  Eigen::VectorXd coef = AtA.ldlt().solve(A.transpose() * rhs);
  Eigen::MatrixXd cov = AtA.inverse();
  // interaction = 2 E0 / d^(N-2) + ..., B4 = (N-2) E0.
  out.value = 0.5 * (N - 2.0) * coef(0);
  out.std_error = 0.5 * (N - 2.0) * std::sqrt(cov(0, 0));
  if (!std::isfinite(out.fitted_exponent) || std::abs(out.fitted_exponent - (N - 2.0)) > opt.exponent_tol) {
    throw AccuracyError("constant_B4: separation decay does not follow d^-(N-2)", out.value,
                        out.fitted_exponent);
  }
  return out;
}

double balance_lambda(int m, double B3, double B4, int N) {
  if (!(B3 > 0.0 && B4 > 0.0)) throw std::domain_error("balance_lambda: constants must be positive");
  if (N < 5) throw std::domain_error("balance_lambda: N must be >= 5");
  if (m < 1) throw std::domain_error("balance_lambda: m must be >= 1");
  // Exponent split keeps log lambda exactly linear in log m.
  return std::exp((std::log(B4 / B3) + (N - 2.0) * std::log(static_cast<double>(m))) / (N - 4.0));
}

double balance_lambda_bisection(int m, double B3, double B4, int N, double rel_tol) {
  if (!(B3 > 0.0 && B4 > 0.0)) throw std::domain_error("balance_lambda: constants must be positive");
  // g(l) = l^(N-1) * balance = -B3 l^(N-4) + B4 m^(N-2): decreasing in l.
  double M = std::pow(static_cast<double>(m), N - 2.0);
  auto g = [&](double l) { return -B3 * std::pow(l, N - 4.0) + B4 * M; };
  double lo = 1e-300, hi = 1.0;
  while (g(hi) > 0.0) hi *= 2.0;
  lo = hi / 2.0;
  while (g(lo) < 0.0) lo /= 2.0;
  for (int i = 0; i < 400 && (hi - lo) > rel_tol * hi; ++i) {
    double mid = 0.5 * (lo + hi);
    (g(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

namespace {

// lim_{m -> inf} m^(-p) sum_{j=1}^{m-1} (2 sin(j pi/m))^(-p) = 2 zeta(p) / (2 pi)^p.
double chord_sum_limit(double p) {
  double z = 0.0;
  const int K = 100000;
  for (int k = K; k >= 1; --k) z += std::pow(static_cast<double>(k), -p);
  z += std::pow(K + 0.5, 1.0 - p) / (p - 1.0);  // midpoint tail
  return 2.0 * z / std::pow(2.0 * M_PI, p);
}

}  // namespace

double ReducedEnergyModel::B_interaction(int m) const {
  int N = params.N();
  return B4.value * interaction_sum(m, potentials.r0, N - 2.0) / std::pow(static_cast<double>(m), N - 2.0);
}

ReducedEnergyModel build_model(const SystemParams& p, const PotentialPair& pot,
                               std::optional<ConstantRecord> B4) {
  if (pot.N != p.N()) throw std::domain_error("build_model: potential dimension differs from N");
  ReducedEnergyModel m(p, pot);
  double A1 = constant_B1_pair(p);
  m.B1 = {A1 / p.two_star(), "quadrature"};
  m.B2 = m.B1;
  m.B3 = {constant_B3(p, pot).value, "quadrature"};
  m.B4 = B4 ? *B4 : ConstantRecord{constant_B4_asymptotic(p), "asymptotic"};
  m.B5 = {m.B4.value * chord_sum_limit(p.N() - 2.0) / std::pow(pot.r0, p.N() - 1.0), "derived"};
  return m;
}

Eigen::VectorXd reduced_F(const ReducedEnergyModel& model, int m, const Eigen::VectorXd& y) {
  int N = model.params.N();
  Eigen::VectorXd F(N);
  double t = y(0);
  F(0) = -model.B_dilation() / (t * t * t) + model.B_interaction(m) / std::pow(t, N - 1.0);
  F.tail(N - 1) = model.potentials.grad_sum(y.tail(N - 1));
  return F;
}

BalanceSolution solve_reduced_system(const ReducedEnergyModel& model, int m, const SolverOptions& opt) {
  int N = model.params.N();
  BalanceSolution sol;
  double Bd = model.B_dilation(), Bi = model.B_interaction(m);
  if (!(Bd > 0.0 && Bi > 0.0)) {
    sol.diagnostic = "no admissible configuration: balance constants not positive";
    return sol;
  }
  auto bal = [&](double t) { return -Bd / (t * t * t) + Bi / std::pow(t, N - 1.0); };
  if (bal(model.L0) * bal(model.L1) > 0.0) {
    sol.diagnostic = "no admissible configuration: balance has no sign change in [L0, L1]";
    return sol;
  }
  Eigen::VectorXd c = model.potentials.critical_point();
  Eigen::VectorXd lo(N), hi(N);
  lo(0) = model.L0;
  hi(0) = model.L1;
  for (int i = 1; i < N; ++i) {
    lo(i) = c(i - 1) - model.theta;
    hi(i) = c(i - 1) + model.theta;
  }
  lo(1) = std::max(lo(1), 1e-9);
  // Start at the box center in t and slightly off the critical point in space.
  Eigen::VectorXd y(N);
  y(0) = 0.5 * (model.L0 + model.L1);
  for (int i = 1; i < N; ++i) y(i) = c(i - 1) + 0.25 * model.theta;
  Eigen::VectorXd F = reduced_F(model, m, y);
  int it = 0;
  for (; it < opt.max_iterations && F.norm() > opt.tol; ++it) {
    Eigen::MatrixXd J(N, N);
    for (int k = 0; k < N; ++k) {
      double h = opt.fd_step * std::max(1.0, std::abs(y(k)));
      Eigen::VectorXd yp = y, ym = y;
      yp(k) += h;
      ym(k) -= h;
      J.col(k) = (reduced_F(model, m, yp) - reduced_F(model, m, ym)) / (2.0 * h);
    }
    Eigen::VectorXd step = J.fullPivLu().solve(-F);
    // Backtracking with damping factor 1/2, projected onto the box.
    double a = 1.0;
    bool accepted = false;
    for (int b = 0; b < 40; ++b, a *= 0.5) {
      Eigen::VectorXd yn = (y + a * step).cwiseMax(lo).cwiseMin(hi);
      Eigen::VectorXd Fn = reduced_F(model, m, yn);
      if (Fn.norm() < F.norm()) {
        y = yn;
        F = Fn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  // The t-equation decouples, so bisection on it is an exact fallback.
  if (std::abs(F(0)) > opt.tol) {
    double a = model.L0, b = model.L1;
    for (int k = 0; k < 200 && b - a > 1e-16 * b; ++k) {
      double mid = 0.5 * (a + b);
      (bal(mid) * bal(a) > 0.0 ? a : b) = mid;
    }
    y(0) = 0.5 * (a + b);
    F = reduced_F(model, m, y);
    sol.used_bisection = true;
  }
  sol.t_star = y(0);
  sol.r_star = y(1);
  sol.x_star_pp.assign(y.data() + 2, y.data() + N);
  sol.residual_norm = F.norm();
  sol.iterations = it;
  sol.success = sol.residual_norm <= std::max(opt.tol, 1e-8);
  if (!sol.success) sol.diagnostic = "solver did not reach the residual tolerance";
  return sol;
}

std::vector<LandscapeRow> landscape(const ReducedEnergyModel& model, int m, double t_lo, double t_hi,
                                    int points) {
  if (!(t_lo > 0.0 && t_hi > t_lo) || points < 2) throw std::domain_error("landscape: invalid t range");
  int N = model.params.N();
  std::vector<LandscapeRow> rows;
  for (int i = 0; i < points; ++i) {
    double t = t_lo + (t_hi - t_lo) * i / (points - 1.0);
    rows.push_back({t, -model.B_dilation() / (t * t * t) + model.B_interaction(m) / std::pow(t, N - 1.0)});
  }
  return rows;
}

EnergyEstimate energy_estimate(const PolygonConfig& cfg, const std::optional<CutoffSpec>& cutoff,
                               const Potential& K1, const Potential& K2, const MonteCarloSpec& mc) {
  const SystemParams& p = cfg.params;
  int N = p.N();
  double mu = p.mu(), ts = p.two_star();
  auto z = polygon_centers(cfg);
  std::vector<Bubble> bubbles;
  for (const auto& c : z) bubbles.emplace_back(p, c, cfg.lambda);
  ConvolutionSampler sampler(N, mu, z, std::vector<double>(cfg.m, cfg.lambda), 0.5);
  double A1 = p.constants().A1;

  EnergyEstimate out;
  out.self_part = cfg.m * A1 * (1.0 - 1.0 / ts);

  struct Local {
    double W = 0.0, neg_lap = 0.0, self_gl = 0.0, xi = 1.0, grad_xi2 = 0.0;
    double pow_sum = 0.0;  // sum_j U_j^2*
    double G[64];          // U_j^2* per bubble, first 64
  };
  auto local = [&](const double* x) {
    Local L;
    for (std::size_t j = 0; j < bubbles.size(); ++j) {
      const Bubble& b = bubbles[j];
      double u = b.value(x);
      double c = riesz_convolution_bubble(mu, b, x);
      double nl = c * std::pow(u, ts - 1.0);  // -Laplacian of U_j
      L.W += u;
      L.neg_lap += nl;
      L.self_gl += u * nl;
      double g = std::pow(u, ts);
      L.pow_sum += g;
      if (j < 64) L.G[j] = g;
    }
    if (cutoff) {
      CutoffJet cj = cutoff_jet(*cutoff, x, N);
      L.xi = cj.value;
      for (double v : cj.grad) L.grad_xi2 += v * v;
    }
    return L;
  };
  if (bubbles.size() > 64) throw std::domain_error("energy_estimate: at most 64 bubbles");

  double R = 1.0 / cfg.lambda;
  auto acc = mc_accumulate(mc.sample_count, [&](std::size_t i) {
    CounterRng rng(mc.seed, i);
    double x[kMaxDim], y[kMaxDim];
    double px = sampler.sample_bubble(rng, x);
    double qy = sampler.sample(x, R, rng, y);
    Local Lx = local(x), Ly = local(y);
    // Gradient block: int xi^2 W (-Delta W) + |grad xi|^2 W^2 - sum_j U_j (-Delta U_j).
    double grad = Lx.xi * Lx.xi * Lx.W * Lx.neg_lap + Lx.grad_xi2 * Lx.W * Lx.W - Lx.self_gl;
    // Double convolution block: F(x)F(y) - sum_j G_j(x) G_j(y).
    double Zx = std::pow(Lx.xi * Lx.W, ts), Zy = std::pow(Ly.xi * Ly.W, ts);
    double self = 0.0;
    for (std::size_t j = 0; j < bubbles.size(); ++j) self += Lx.G[j] * Ly.G[j];
    double k1 = K1.value(x, N) * K1.value(y, N), k2 = K2.value(x, N) * K2.value(y, N);
    double d2 = 0.0;
    for (int k = 0; k < N; ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
    double ker = d2 > 0.0 ? std::pow(d2, -0.5 * mu) : 0.0;
    double dbl = ((k1 + k2) * Zx * Zy - 2.0 * self) * ker / qy;
    return (grad - dbl / (2.0 * ts)) / px;
  });
  out.J = out.self_part + acc.mean;
  out.std_error = acc.std_error();
  return out;
}

}  // namespace hartree
