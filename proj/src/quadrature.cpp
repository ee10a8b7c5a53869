#include "hartree/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>
#include <tuple>

#include "hartree/params_special.hpp"

namespace hartree {

namespace {

constexpr double kPi = std::numbers::pi;

// Jacobi polynomial P_n^(a,b)(x) and P_{n-1}.
void jacobi_eval(int n, double a, double b, double x, double& pn, double& pnm1) {
  double p0 = 1.0;
  double p1 = 0.5 * (a - b + (a + b + 2.0) * x);
  if (n == 0) {
    pn = p0;
    pnm1 = 0.0;
    return;
  }
  for (int k = 2; k <= n; ++k) {
    double c = 2.0 * k + a + b;
    double a1 = 2.0 * k * (k + a + b) * (c - 2.0);
    double a2 = (c - 1.0) * (a * a - b * b);
    double a3 = (c - 2.0) * (c - 1.0) * c;
    double a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c;
    double p2 = ((a2 + a3 * x) * p1 - a4 * p0) / a1;
    p0 = p1;
    p1 = p2;
  }
  pn = p1;
  pnm1 = p0;
}

double jacobi_derivative(int n, double a, double b, double x, double pn, double pnm1) {
  double c = 2.0 * n + a + b;
  return (n * (a - b - c * x) * pn + 2.0 * (n + a) * (n + b) * pnm1) / (c * (1.0 - x * x));
}

}  // namespace

Rule gauss_legendre(int n) {
  if (n < 1) throw std::domain_error("gauss_legendre: n must be >= 1");
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      double pn = (n == 1) ? x : p1;
      double pm = (n == 1) ? 1.0 : p0;
      dp = n * (x * pn - pm) / (x * x - 1.0);
      double dx = pn / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

Rule gauss_jacobi(int n, double a, double b) {
  if (n < 1) throw std::domain_error("gauss_jacobi: n must be >= 1");
  if (!(a > -1.0) || !(b > -1.0)) throw std::domain_error("gauss_jacobi: exponents must be > -1");
  double mu0 = std::pow(2.0, a + b + 1.0) * beta_fn(a + 1.0, b + 1.0);
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  if (n == 1) {
    r.nodes[0] = (b - a) / (a + b + 2.0);
    r.weights[0] = mu0;
    return r;
  }
  // Golub-Welsch on the symmetric Jacobi matrix.
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    double c = 2.0 * k + a + b;
    J(k, k) = (k == 0) ? (b - a) / (a + b + 2.0) : (b * b - a * a) / (c * (c + 2.0));
    if (k + 1 < n) {
      int m = k + 1;
      double cm = 2.0 * m + a + b;
      double beta;
      if (m == 1) {
        beta = 4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + a + b) * (2.0 + a + b) * (3.0 + a + b));
      } else {
        beta = 4.0 * m * (m + a) * (m + b) * (m + a + b) / (cm * cm * (cm + 1.0) * (cm - 1.0));
      }
      J(k, k + 1) = J(k + 1, k) = std::sqrt(beta);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  // Newton polish and derivative-based weights; log form keeps large n finite.
  double logc = (a + b + 1.0) * std::log(2.0) + lgamma_fn(n + a + 1.0) + lgamma_fn(n + b + 1.0) -
                lgamma_fn(n + a + b + 1.0) - lgamma_fn(n + 1.0);
  for (int i = 0; i < n; ++i) {
    double x = es.eigenvalues()(i);
    double pn = 0, pm = 0, dp = 0;
    for (int it = 0; it < 5; ++it) {
      jacobi_eval(n, a, b, x, pn, pm);
      dp = jacobi_derivative(n, a, b, x, pn, pm);
      double dx = pn / dp;
      double xn = x - dx;
      if (xn <= -1.0 || xn >= 1.0) break;
      x = xn;
      if (std::abs(dx) < 1e-16) break;
    }
    jacobi_eval(n, a, b, x, pn, pm);
    dp = jacobi_derivative(n, a, b, x, pn, pm);
    r.nodes[i] = x;
    r.weights[i] = std::exp(logc) / ((1.0 - x * x) * dp * dp);
  }
  return r;
}

const Rule& cached_legendre(int n) { return cached_jacobi(n, 0.0, 0.0); }

const Rule& cached_jacobi(int n, double a, double b) {
  static std::mutex mtx;
  static std::map<std::tuple<int, double, double>, Rule> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_tuple(n, a, b);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  Rule r = (a == 0.0 && b == 0.0) ? gauss_legendre(n) : gauss_jacobi(n, a, b);
  return cache.emplace(key, std::move(r)).first->second;
}

double gegenbauer_normalized(int k, double nu, double s) {
  if (k < 0) throw std::domain_error("gegenbauer_normalized: k must be >= 0");
  if (!(nu > 0.0)) throw std::domain_error("gegenbauer_normalized: nu must be > 0");
  if (std::abs(s) > 1.0 + 1e-14) throw std::domain_error("gegenbauer_normalized: |s| > 1");
  if (k == 0) return 1.0;
  // Recurrence on C_n / C_n(1) directly keeps values in [-1, 1].
  double p0 = 1.0, p1 = s;
  for (int n = 2; n <= k; ++n) {
    double p2 = ((2.0 * (n + nu - 1.0)) * s * p1 - (n - 1.0) * p0) / (n + 2.0 * nu - 1.0);
    p0 = p1;
    p1 = p2;
  }
  return p1;
}

QuadratureSpec funk_hecke_spec(int N, double t, int nodes, double tol) {
  return QuadratureSpec::jacobi(nodes, 0.5 * (N - 2.0 - t), 0.5 * (N - 2.0), tol);
}

double funk_hecke_oracle(int N, double t, int k, const QuadratureSpec& spec) {
  if (!(t < N)) throw std::domain_error("funk_hecke_oracle: t >= N gives a non-integrable kernel");
  if (!(t > 0.0)) throw std::domain_error("funk_hecke_oracle: t must be positive");
  double nu = 0.5 * (N - 1.0);
  double area = sphere_surface_area(N);
  double total = 0.0;
  if (spec.rule == QuadratureSpec::Kind::jacobi) {
    // Remaining integrand after the weight: P_k(s) times whatever the weight did not absorb.
    double ra = 0.5 * (N - 2.0 - t) - spec.a;
    double rb = 0.5 * (N - 2.0) - spec.b;
    const Rule& q = cached_jacobi(spec.node_count, spec.a, spec.b);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      double s = q.nodes[i];
      double g = gegenbauer_normalized(k, nu, s);
      if (ra != 0.0) g *= std::pow(1.0 - s, ra);
      if (rb != 0.0) g *= std::pow(1.0 + s, rb);
      total += q.weights[i] * g;
    }
  } else {
    const Rule& q = cached_legendre(spec.node_count);
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      double s = q.nodes[i];
      total += q.weights[i] * gegenbauer_normalized(k, nu, s) * std::pow(1.0 - s, -0.5 * t) *
               std::pow(1.0 - s * s, 0.5 * (N - 2.0));
    }
  }
  return area * std::pow(2.0, -0.5 * t) * total;
}

IntegrationResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol, double abs_tol, int budget) {
  const Rule& g8 = cached_legendre(8);
  const Rule& g16 = cached_legendre(16);
  struct Panel {
    double a, b, value, error;
    bool operator<(const Panel& o) const { return error < o.error; }
  };
  int evals = 0;
  auto eval_panel = [&](double lo, double hi) {
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double s8 = 0, s16 = 0;
    for (int i = 0; i < 8; ++i) s8 += g8.weights[i] * f(c + h * g8.nodes[i]);
    for (int i = 0; i < 16; ++i) s16 += g16.weights[i] * f(c + h * g16.nodes[i]);
    evals += 24;
    return Panel{lo, hi, s16 * h, std::abs(s16 - s8) * h};
  };
  std::priority_queue<Panel> pq;
  Panel p0 = eval_panel(a, b);
  pq.push(p0);
  double total = p0.value, err = p0.error;
  while (err > std::max(abs_tol, rel_tol * std::abs(total))) {
    if (evals + 48 > budget) {
      throw AccuracyError("adaptive_integrate: evaluation budget exhausted", total, err);
    }
    Panel p = pq.top();
    pq.pop();
    double m = 0.5 * (p.a + p.b);
    Panel l = eval_panel(p.a, m), r = eval_panel(m, p.b);
    total += l.value + r.value - p.value;
    err += l.error + r.error - p.error;
    pq.push(l);
    pq.push(r);
    if (m <= p.a || m >= p.b) break;
  }
  // Recompute sums to shed accumulated cancellation.
  total = 0.0;
  err = 0.0;
  while (!pq.empty()) {
    total += pq.top().value;
    err += pq.top().error;
    pq.pop();
  }
  return {total, err, evals};
}

double radial_integral(const std::function<double(double)>& f, int N, double tol, int budget) {
  auto g = [&](double u) {
    if (u >= 1.0) return 0.0;
    double om = 1.0 - u;
    double r = u / om;
    double v = f(r) * std::pow(r, N - 1) / (om * om);
    return std::isfinite(v) ? v : 0.0;
  };
  double area = sphere_surface_area(N);
  try {
    return area * adaptive_integrate(g, 0.0, 1.0, tol, 0.0, budget).value;
  } catch (const AccuracyError& e) {
    throw AccuracyError(e.what(), area * e.partial(), area * e.error_estimate());
  }
}

namespace {

struct AngularSetup {
  double p;       // exponent of D
  double b;       // (N-3)/2
  const Rule* g;  // Gauss-Legendre panel rule
  const Rule* jl; // weight t^b near t = 0
  const Rule* jr; // weight (2-t)^b near t = 2
};

// Numerator in the t = 1 - cos(theta) variable.
// diff = r - s is passed separately so that it stays exact when |r - s| << ulp(r).
inline double numerator(AngularFactor f, double diff, double s, double t) {
  switch (f) {
    case AngularFactor::unit:
      return 1.0;
    case AngularFactor::degree1:
      return 1.0 - t;
    case AngularFactor::radial_vec:
      return diff + s * t;
  }
  return 1.0;
}

double angular_kernel_impl(AngularFactor factor, const AngularSetup& st, double r, double s,
                           double diff, int N) {
  const double area = sphere_surface_area(N - 1);
  const double rs2 = 2.0 * r * s;
  const double d2 = diff * diff;
  const double a0 = d2 / rs2;
  const double b = st.b;
  auto integrand = [&](double t) {
    return numerator(factor, diff, s, t) * std::pow(d2 + rs2 * t, -st.p);
  };
  double total = 0.0;
  // [1, 2]: weight (2-t)^b, t = 1.5 + 0.5 u.
  {
    const Rule& q = *st.jr;
    double acc = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      double t = 1.5 + 0.5 * q.nodes[i];
      acc += q.weights[i] * integrand(t) * std::pow(t, b);
    }
    total += acc * std::pow(0.5, b + 1.0);
  }
  // [0, 1]: weight t^b on the innermost panel, geometric panels toward t = 0.
  double lo = std::min(std::max(a0, 1e-300), 1.0);
  {
    const Rule& q = *st.jl;
    double acc = 0.0;
    double h = 0.5 * lo;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) {
      double t = h * (1.0 + q.nodes[i]);
      acc += q.weights[i] * integrand(t) * std::pow(2.0 - t, b);
    }
    total += acc * std::pow(h, b + 1.0);
  }
  const Rule& g = *st.g;
  while (lo < 1.0) {
    double hi = std::min(2.0 * lo, 1.0);
    double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    double acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
      double t = c + h * g.nodes[i];
      acc += g.weights[i] * integrand(t) * std::pow(t * (2.0 - t), b);
    }
    total += acc * h;
    lo = hi;
  }
  return area * total;
}

AngularSetup make_setup(AngularFactor factor, double mu, int N) {
  AngularSetup st;
  st.p = (factor == AngularFactor::radial_vec) ? 0.5 * (mu + 2.0) : 0.5 * mu;
  st.b = 0.5 * (N - 3.0);
  st.g = &cached_legendre(16);
  st.jl = &cached_jacobi(16, 0.0, st.b);
  st.jr = &cached_jacobi(16, st.b, 0.0);
  return st;
}

}  // namespace

double angular_kernel(AngularFactor factor, double mu, double r, double s, int N) {
  if (N < 3) throw std::domain_error("angular_kernel: N must be >= 3");
  return angular_kernel_impl(factor, make_setup(factor, mu, N), r, s, r - s, N);
}

double radial_convolution(double mu, const std::function<double(double)>& f, double r, int N,
                          const RadialConvOptions& opt) {
  if (!(mu < N)) throw std::domain_error("radial_convolution: mu >= N diverges");
  if (!(mu > 0.0)) throw std::domain_error("radial_convolution: mu must be positive");
  if (opt.factor == AngularFactor::radial_vec && !(mu + 1.0 < N)) {
    throw std::domain_error("radial_convolution: gradient kernel needs mu + 1 < N");
  }
  if (r < 0.0) throw std::domain_error("radial_convolution: r must be >= 0");
  const double S = opt.support;
  const Rule& g = cached_legendre(16);
  auto panel = [&](double lo, double hi, auto&& h) {
    double c = 0.5 * (lo + hi), w = 0.5 * (hi - lo), acc = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) acc += g.weights[i] * h(c + w * g.nodes[i]);
    return acc * w;
  };

  // Breakpoints: dyadic in s away from r; the band |s - r| < r/2 is integrated in u = |s - r|
  // on dyadic panels so the kernel singularity at u = 0 is resolved below ulp(r).
  double gamma = N - mu - (opt.factor == AngularFactor::radial_vec ? 1.0 : 0.0);
  gamma = std::min(gamma, 1.0);
  int depth = static_cast<int>(std::ceil(std::log2(1.0 / (opt.tol * 1e-3)) / gamma));
  depth = std::clamp(depth, 20, 1000);
  std::vector<double> bp{0.0};
  for (int j = -8; j <= 60; ++j) {
    double v = std::ldexp(1.0, j);
    if (std::isfinite(S) && v >= S) break;
    if (r > 0.0 && std::abs(v - r) < 0.5 * r) continue;
    bp.push_back(v);
  }
  if (std::isfinite(S)) bp.push_back(S);
  if (r == 0.0) {
    for (int k = 9; k <= depth; ++k) bp.push_back(std::ldexp(1.0, -k));
  } else {
    bp.push_back(0.5 * r);
    bp.push_back(1.5 * r);
  }
  std::sort(bp.begin(), bp.end());
  bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
  if (std::isfinite(S)) {
    while (!bp.empty() && bp.back() > S) bp.pop_back();
  }

  if (r == 0.0) {
    if (opt.factor != AngularFactor::unit) return 0.0;
    double area = sphere_surface_area(N);
    auto h = [&](double s) { return s > 0.0 ? f(s) * std::pow(s, N - 1 - mu) : 0.0; };
    double total = 0.0, last = 0.0;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
      last = panel(bp[i], bp[i + 1], h);
      total += last;
      if (bp[i + 1] > 16.0 && std::abs(last) < 1e-3 * opt.tol * std::abs(total)) break;
    }
    return area * total;
  }

  AngularSetup st = make_setup(opt.factor, mu, N);
  auto h = [&](double s) {
    if (s <= 0.0 || s == r) return 0.0;
    double fs = f(s);
    if (fs == 0.0) return 0.0;
    return fs * std::pow(s, N - 1) * angular_kernel_impl(opt.factor, st, r, s, r - s, N);
  };
  // Band integrand in u = |s - r| on side sign (s = r + sign u).
  auto band = [&](double u, double sign) {
    double s = r + sign * u;
    if (std::isfinite(S) && s >= S) return 0.0;
    double fs = f(s);
    if (fs == 0.0) return 0.0;
    return fs * std::pow(s, N - 1) * angular_kernel_impl(opt.factor, st, r, s, -sign * u, N);
  };
  double total = 0.0;
  for (double sign : {-1.0, 1.0}) {
    for (int k = 1; k <= depth; ++k) {
      double hi = r * std::ldexp(1.0, -k);
      total += panel(0.5 * hi, hi, [&](double u) { return band(u, sign); });
    }
  }
  int small_run = 0;
  for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
    if (r > 0.0 && bp[i] >= 0.5 * r && bp[i + 1] <= 1.5 * r) continue;
    double v = panel(bp[i], bp[i + 1], h);
    total += v;
    if (bp[i] > 2.0 * r + 16.0) {
      small_run = (std::abs(v) < 1e-3 * opt.tol * std::abs(total)) ? small_run + 1 : 0;
      if (small_run >= 2) break;
    }
  }
  return total;
}

}  // namespace hartree
