#pragma once

#include <functional>

#include "hartree/montecarlo.hpp"
#include "hartree/params_special.hpp"
#include "hartree/potential.hpp"

namespace hartree {

// U_{z,l}(x) = C (l / (1 + l^2 |x - z|^2))^((N-2)/2).
struct Bubble {
  Vec center;
  double scale = 1.0;
  SystemParams params;

  Bubble(const SystemParams& p, Vec z, double lambda);
  static Bubble unit(const SystemParams& p) { return Bubble(p, Vec(p.N(), 0.0), 1.0); }

  int N() const { return params.N(); }
  double dist2(const double* x) const;
  double value(const double* x) const;
  // Profile as a function of |x - z|.
  double radial_value(double rho) const;
  void gradient(const double* x, double* g) const;
  double dlambda(const double* x) const;
  // -Laplacian, closed form.
  double neg_laplacian(const double* x) const;
  // U^p for the integrand power p = (2N - mu)/(N - 2).
  double power(const double* x, double mu) const;
};

// The exact synchronized pair; u and v coincide.
struct BubblePair {
  Bubble u;
  Bubble v;
  explicit BubblePair(const Bubble& b) : u(b), v(b) {}
};

struct KernelBasisElement {
  enum class Role { translation, dilation };
  int index = 1;  // 1..N translation, N+1 dilation
  Role role(int N) const { return index == N + 1 ? Role::dilation : Role::translation; }
};

double bubble_eval(const Bubble& b, const Vec& x);
double bubble_laplacian(const Bubble& b, const Vec& x);

// Unit-bubble basis: phi_j = (2-N) U x_j / (1+|x|^2), phi_{N+1} = (N-2)/2 U (1-|x|^2)/(1+|x|^2).
double kernel_basis_eval(const SystemParams& p, const KernelBasisElement& e, const Vec& x);
// General (z, lambda): translation d/dx_j U, dilation d/dlambda U.
double kernel_basis_eval(const Bubble& b, const KernelBasisElement& e, const Vec& x);

// Closed form of |.|^(-mu) * U^((2N-mu)/(N-2)).
double riesz_convolution_bubble(double mu, const Bubble& b, const Vec& x);
double riesz_convolution_bubble(double mu, const Bubble& b, const double* x);
double conv_constant(double mu, const SystemParams& p);

struct NonlocalEstimate {
  double value = 0.0;
  double std_error = 0.0;
};

// (|.|^(-mu) * K U^p)(x), p = (2N-mu)/(N-2). Closed form for K == 1, otherwise the
// closed form plus a Monte Carlo estimate of the (K - 1) correction.
NonlocalEstimate nonlocal_term(double mu, const Bubble& b, const Potential& K, const double* x,
                               const MonteCarloSpec& mc, std::uint64_t stream = 0);

struct PdeResidual {
  double res_u = 0.0, res_v = 0.0;
  double scale_u = 0.0, scale_v = 0.0;  // magnitude of the dominant term
  double std_error_u = 0.0, std_error_v = 0.0;
};

PdeResidual pde_residual(const BubblePair& pair, const Vec& x, const Potential& K1,
                         const Potential& K2, const MonteCarloSpec& mc = {4096, 7, 0});

// Field f(|x - z|) times 1 (degree 0) or (x - z)_axis / |x - z| (degree 1).
struct SeparableField {
  std::function<double(double)> profile;
  int degree = 0;
  int axis = 0;
  double eval(const Bubble& b, const double* x) const;
};

enum class LinearizedOp { T1, T2 };

// T(psi)(x) = 2* (K * V^(2*-1) psi) V^(2*-1) + (2*-1) (K * V^(2*)) V^(2*-2) psi,
// with the radial convolution reduced against the degree-d angular kernel.
double linearized_apply(LinearizedOp which, const BubblePair& pair, const SeparableField& psi,
                        const Vec& x, double tol = 1e-11);

}  // namespace hartree
