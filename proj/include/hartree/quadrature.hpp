#pragma once

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace hartree {

// Thrown when an integrator exhausts its budget; carries the best estimate so far.
class AccuracyError : public std::runtime_error {
 public:
  AccuracyError(const std::string& what, double partial, double error_estimate)
      : std::runtime_error(what), partial_(partial), error_(error_estimate) {}
  double partial() const { return partial_; }
  double error_estimate() const { return error_; }

 private:
  double partial_;
  double error_;
};

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

Rule gauss_legendre(int n);
// Weight (1-s)^a (1+s)^b on [-1, 1].
Rule gauss_jacobi(int n, double a, double b);
// Process-wide memoized rules; returned references stay valid for the program lifetime.
const Rule& cached_legendre(int n);
const Rule& cached_jacobi(int n, double a, double b);

// C_k^(nu)(s) / C_k^(nu)(1).
double gegenbauer_normalized(int k, double nu, double s);

struct QuadratureSpec {
  enum class Kind { legendre, jacobi };
  int node_count = 64;
  Kind rule = Kind::legendre;
  double a = 0.0;
  double b = 0.0;
  double target_rel_tol = 1e-8;

  static QuadratureSpec legendre(int n, double tol = 1e-8) {
    return {n, Kind::legendre, 0.0, 0.0, tol};
  }
  static QuadratureSpec jacobi(int n, double a, double b, double tol = 1e-8) {
    return {n, Kind::jacobi, a, b, tol};
  }
};

// The Jacobi spec that factors the (2-2s)^(-t/2) (1-s^2)^((N-2)/2) weight exactly.
QuadratureSpec funk_hecke_spec(int N, double t, int nodes = 64, double tol = 1e-8);
double funk_hecke_oracle(int N, double t, int k, const QuadratureSpec& spec);

struct IntegrationResult {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

// Globally adaptive bisection with a Gauss 8 / Gauss 16 error estimate.
IntegrationResult adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                                     double rel_tol, double abs_tol = 0.0, int budget = 1 << 14);

// |S^(N-1)| * int_0^inf r^(N-1) f(r) dr, tail compactified by r = u/(1-u).
double radial_integral(const std::function<double(double)>& f, int N, double tol = 1e-10,
                       int budget = 1 << 14);

// Angular factor multiplying the kernel inside a radial convolution.
//   unit:      |x-y|^(-mu)
//   degree1:   |x-y|^(-mu) times the first zonal harmonic (cos of the angle)
//   radial_vec:(x-y).x_hat |x-y|^(-mu-2), the radial component of the gradient kernel
enum class AngularFactor { unit, degree1, radial_vec };

struct RadialConvOptions {
  AngularFactor factor = AngularFactor::unit;
  // f vanishes for s >= support.
  double support = std::numeric_limits<double>::infinity();
  double tol = 1e-11;
};

// Inner angular kernel |S^(N-2)| int_0^pi A(theta) D^(-p) sin^(N-2) theta dtheta,
// D = r^2 + s^2 - 2 r s cos theta.
double angular_kernel(AngularFactor factor, double mu, double r, double s, int N);

// (|.|^(-mu) * f)(x) at |x| = r for radial f, or the degree-one / gradient analogues.
double radial_convolution(double mu, const std::function<double(double)>& f, double r, int N,
                          const RadialConvOptions& opt = {});

}  // namespace hartree
