#include "hartree/params_special.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace hartree {

namespace {

constexpr double kPi = std::numbers::pi;

// Lanczos coefficients, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

// Valid for x >= 1/2.
double lanczos_series(double x) {
  double z = x - 1.0;
  double a = kLanczos[0];
  for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
  return a;
}

double binom(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("gamma_fn: argument must be positive");
  if (x < 0.5) return kPi / (std::sin(kPi * x) * gamma_fn(1.0 - x));
  if (x == std::floor(x) && x <= 21.0) {
    double f = 1.0;
    for (int i = 2; i < static_cast<int>(x); ++i) f *= i;
    return f;
  }
  if (x > 171.6) return INFINITY;
  double t = x - 0.5 + kLanczosG;
  // Split the power to avoid premature overflow near the top of the range.
  double p = std::pow(t, 0.5 * (x - 0.5));
  return std::sqrt(2.0 * kPi) * p * (p * std::exp(-t)) * lanczos_series(x);
}

double lgamma_fn(double x) {
  if (!(x > 0.0)) throw std::domain_error("lgamma_fn: argument must be positive");
  if (x < 0.5) return std::log(kPi / std::abs(std::sin(kPi * x))) - lgamma_fn(1.0 - x);
  double t = x - 0.5 + kLanczosG;
  return 0.5 * std::log(2.0 * kPi) + (x - 0.5) * std::log(t) - t +
         std::log(lanczos_series(x));
}

double gamma_ratio_shift(double x, double y, int k) {
  if (k < 0) throw std::domain_error("gamma_ratio_shift: negative shift");
  double r = (x < 100.0 && y < 100.0) ? gamma_fn(x) / gamma_fn(y)
                                      : std::exp(lgamma_fn(x) - lgamma_fn(y));
  for (int i = 0; i < k; ++i) r *= (x + i) / (y + i);
  return r;
}

double beta_fn(double a, double b) {
  if (a + b < 150.0) return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
  return std::exp(lgamma_fn(a) + lgamma_fn(b) - lgamma_fn(a + b));
}

double sphere_surface_area(int n) {
  if (n < 1) throw std::domain_error("sphere_surface_area: n must be >= 1");
  return 2.0 * std::pow(kPi, 0.5 * n) / gamma_fn(0.5 * n);
}

double ball_volume(int n) {
  if (n < 1) throw std::domain_error("ball_volume: n must be >= 1");
  return std::pow(kPi, 0.5 * n) / gamma_fn(0.5 * n + 1.0);
}

double hls_sharp_constant(int N, double mu) {
  if (!(mu > 0.0 && mu < N)) throw std::domain_error("hls_sharp_constant: mu outside (0, N)");
  double hN = 0.5 * N;
  return std::pow(kPi, 0.5 * mu) * gamma_fn(hN - 0.5 * mu) / gamma_fn(N - 0.5 * mu) *
         std::pow(gamma_fn(hN) / gamma_fn(N), -1.0 + mu / N);
}

long long harmonic_dim(int N, int k) {
  if (k < 0) throw std::domain_error("harmonic_dim: k must be >= 0");
  if (k == 0) return 1;
  if (k == 1) return N + 1;
  return static_cast<long long>(binom(k + N, k) - binom(k + N - 2, k - 2));
}

double funk_hecke_eigenvalue(int N, double t, int k) {
  if (!(t > 0.0 && t < N)) throw std::domain_error("funk_hecke_eigenvalue: t outside (0, N)");
  if (k < 0) throw std::domain_error("funk_hecke_eigenvalue: k must be >= 0");
  double base = std::pow(2.0, N - t) * std::pow(kPi, 0.5 * N) * gamma_fn(0.5 * (N - t));
  return base * gamma_ratio_shift(0.5 * t, N - 0.5 * t, k) / gamma_fn(0.5 * t);
}

double alpha_upper_bound(int N) { return N - 5.0 + 6.0 / (N - 2.0); }

AdmissibilityReport check_admissible(int N, double alpha) {
  AdmissibilityReport r;
  if (N < 5) r.violations.push_back("N >= 5 required");
  if (!(alpha > 0.0)) r.violations.push_back("alpha > 0 required");
  if (!(alpha < N)) r.violations.push_back("alpha < N required");
  if (N >= 3 && !(alpha < alpha_upper_bound(N))) {
    std::ostringstream os;
    os << "alpha < N - 5 + 6/(N-2) = " << alpha_upper_bound(N) << " required";
    r.violations.push_back(os.str());
  }
  r.admissible = r.violations.empty();
  return r;
}

double riesz_selfconv_constant(int N, double mu) {
  if (!(mu > 0.0 && mu < N)) throw std::domain_error("riesz_selfconv_constant: mu outside (0, N)");
  return std::pow(kPi, 0.5 * N) * gamma_fn(0.5 * (N - mu)) / gamma_fn(N - 0.5 * mu);
}

SystemParams::SystemParams(int N, double alpha) : N_(N), alpha_(alpha) {
  auto rep = check_admissible(N, alpha);
  if (!rep.admissible) {
    std::string msg = "inadmissible parameters:";
    for (const auto& v : rep.violations) msg += " " + v + ";";
    throw std::domain_error(msg);
  }
  two_star_ = (N + alpha) / (N - 2.0);
  double hN = 0.5 * N;
  c_.C_pow = N * (N - 2.0) * gamma_fn(0.5 * (N + alpha)) /
             (std::pow(kPi, hN) * gamma_fn(0.5 * alpha));
  c_.C_N_alpha = std::pow(c_.C_pow, (N - 2.0) / (2.0 * alpha + 4.0));
  c_.I_kernel = riesz_selfconv_constant(N, N - alpha);
  c_.C_N = gamma_fn(hN) / (2.0 * (N - 2.0) * std::pow(kPi, hN));
  double c2 = std::pow(c_.C_N_alpha, 2.0 * two_star_) * c_.I_kernel;
  c_.A1 = c2 * std::pow(kPi, hN) * gamma_fn(hN) / gamma_fn(N);
  c_.A2 = c2 * std::pow(kPi, hN) * gamma_fn(hN + 1.0) * gamma_fn(hN - 1.0) /
          (gamma_fn(hN) * gamma_fn(N));
}

double bubble_amplitude(const SystemParams& p) { return p.C(); }

}  // namespace hartree
