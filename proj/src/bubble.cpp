#include "hartree/bubble.hpp"

#include <cmath>
#include <stdexcept>

#include "hartree/quadrature.hpp"

namespace hartree {

Bubble::Bubble(const SystemParams& p, Vec z, double lambda)
    : center(std::move(z)), scale(lambda), params(p) {
  if (!(lambda > 0.0)) throw std::domain_error("Bubble: scale must be positive");
  if (static_cast<int>(center.size()) != p.N()) throw std::domain_error("Bubble: center dimension");
}

double Bubble::dist2(const double* x) const {
  double d2 = 0.0;
  for (int i = 0; i < N(); ++i) d2 += (x[i] - center[i]) * (x[i] - center[i]);
  return d2;
}

double Bubble::radial_value(double rho) const {
  double l = scale;
  return params.C() * std::pow(l / (1.0 + l * l * rho * rho), 0.5 * (N() - 2));
}

double Bubble::value(const double* x) const {
  double l = scale;
  return params.C() * std::pow(l / (1.0 + l * l * dist2(x)), 0.5 * (N() - 2));
}

void Bubble::gradient(const double* x, double* g) const {
  double l = scale;
  double q = 1.0 + l * l * dist2(x);
  double c = -(N() - 2.0) * params.C() * std::pow(l, 0.5 * (N() + 2)) * std::pow(q, -0.5 * N());
  for (int i = 0; i < N(); ++i) g[i] = c * (x[i] - center[i]);
}

double Bubble::dlambda(const double* x) const {
  double l = scale;
  double t = l * l * dist2(x);
  return value(x) * 0.5 * (N() - 2.0) * (1.0 - t) / (l * (1.0 + t));
}

double Bubble::neg_laplacian(const double* x) const {
  double l = scale;
  double q = 1.0 + l * l * dist2(x);
  return N() * (N() - 2.0) * params.C() * std::pow(l, 0.5 * (N() + 2)) *
         std::pow(q, -0.5 * (N() + 2));
}

double Bubble::power(const double* x, double mu) const {
  double p = (2.0 * N() - mu) / (N() - 2.0);
  double l = scale;
  return std::pow(params.C(), p) * std::pow(l / (1.0 + l * l * dist2(x)), 0.5 * (N() - 2) * p);
}

double bubble_eval(const Bubble& b, const Vec& x) { return b.value(x.data()); }
double bubble_laplacian(const Bubble& b, const Vec& x) { return b.neg_laplacian(x.data()); }

double kernel_basis_eval(const SystemParams& p, const KernelBasisElement& e, const Vec& x) {
  int N = p.N();
  if (e.index < 1 || e.index > N + 1) throw std::domain_error("kernel_basis_eval: index out of range");
  double n2 = 0.0;
  for (double xi : x) n2 += xi * xi;
  double U = p.C() * std::pow(1.0 + n2, -0.5 * (N - 2));
  if (e.index == N + 1) return 0.5 * (N - 2.0) * U * (1.0 - n2) / (1.0 + n2);
  return (2.0 - N) * U * x[e.index - 1] / (1.0 + n2);
}

double kernel_basis_eval(const Bubble& b, const KernelBasisElement& e, const Vec& x) {
  int N = b.N();
  if (e.index < 1 || e.index > N + 1) throw std::domain_error("kernel_basis_eval: index out of range");
  if (e.index == N + 1) return b.dlambda(x.data());
  double g[kMaxDim];
  b.gradient(x.data(), g);
  return g[e.index - 1];
}

double conv_constant(double mu, const SystemParams& p) {
  int N = p.N();
  return riesz_selfconv_constant(N, mu) * std::pow(p.C(), (2.0 * N - mu) / (N - 2.0));
}

double riesz_convolution_bubble(double mu, const Bubble& b, const double* x) {
  double l = b.scale;
  return conv_constant(mu, b.params) * std::pow(l / (1.0 + l * l * b.dist2(x)), 0.5 * mu);
}

double riesz_convolution_bubble(double mu, const Bubble& b, const Vec& x) {
  if (static_cast<int>(x.size()) != b.N()) throw std::domain_error("riesz_convolution_bubble: dimension");
  return riesz_convolution_bubble(mu, b, x.data());
}

NonlocalEstimate nonlocal_term(double mu, const Bubble& b, const Potential& K, const double* x,
                               const MonteCarloSpec& mc, std::uint64_t stream) {
  NonlocalEstimate out;
  out.value = riesz_convolution_bubble(mu, b, x);
  if (K.is_unit()) return out;
  int N = b.N();
  ConvolutionSampler sampler(N, mu, {b.center}, {b.scale});
  double R = 1.0 / b.scale;
  auto g = [&](const double* y) { return (K.value(y, N) - 1.0) * b.power(y, mu); };
  auto acc = mc_accumulate(mc.sample_count, [&](std::size_t i) {
    CounterRng rng(mc.seed ^ mix64(stream), i);
    return sampler.draw(x, R, g, rng);
  });
  out.value += acc.mean;
  out.std_error = acc.std_error();
  return out;
}

PdeResidual pde_residual(const BubblePair& pair, const Vec& x, const Potential& K1,
                         const Potential& K2, const MonteCarloSpec& mc) {
  const SystemParams& p = pair.u.params;
  int N = p.N();
  if (static_cast<int>(x.size()) != N) throw std::domain_error("pde_residual: dimension");
  double mu = p.mu(), ts = p.two_star();
  PdeResidual r;
  auto one = [&](const Bubble& lap_b, const Bubble& src, const Potential& K, std::uint64_t stream,
                 double& res, double& scale, double& se) {
    NonlocalEstimate W = nonlocal_term(mu, src, K, x.data(), mc, stream);
    double lap = lap_b.neg_laplacian(x.data());
    double k = K.value(x.data(), N);
    double pw = std::pow(src.value(x.data()), ts - 1.0);
    double nl = k * W.value * pw;
    res = lap - nl;
    scale = std::max(std::abs(lap), std::abs(nl));
    se = k * W.std_error * pw;
  };
  one(pair.u, pair.v, K1, 1, r.res_u, r.scale_u, r.std_error_u);
  one(pair.v, pair.u, K2, 2, r.res_v, r.scale_v, r.std_error_v);
  return r;
}

double SeparableField::eval(const Bubble& b, const double* x) const {
  double rho = std::sqrt(b.dist2(x));
  double f = profile(rho);
  if (degree == 0) return f;
  if (degree == 1) return rho > 0.0 ? f * (x[axis] - b.center[axis]) / rho : 0.0;
  throw std::domain_error("SeparableField: unsupported angular degree");
}

double linearized_apply(LinearizedOp which, const BubblePair& pair, const SeparableField& psi,
                        const Vec& x, double tol) {
  if (psi.degree != 0 && psi.degree != 1) {
    throw std::domain_error("linearized_apply: unsupported angular degree");
  }
  const Bubble& V = which == LinearizedOp::T1 ? pair.v : pair.u;
  const SystemParams& p = V.params;
  int N = p.N();
  double mu = p.mu(), ts = p.two_star();
  double rho = std::sqrt(V.dist2(x.data()));
  auto f = [&](double s) { return std::pow(V.radial_value(s), ts - 1.0) * psi.profile(s); };
  RadialConvOptions opt;
  opt.factor = psi.degree == 1 ? AngularFactor::degree1 : AngularFactor::unit;
  opt.tol = tol;
  double conv = radial_convolution(mu, f, rho, N, opt);
  if (psi.degree == 1) conv = rho > 0.0 ? conv * (x[psi.axis] - V.center[psi.axis]) / rho : 0.0;
  double v = V.value(x.data());
  double first = ts * conv * std::pow(v, ts - 1.0);
  double second = (ts - 1.0) * riesz_convolution_bubble(mu, V, x.data()) * std::pow(v, ts - 2.0) *
                  psi.eval(V, x.data());
  return first + second;
}

}  // namespace hartree
