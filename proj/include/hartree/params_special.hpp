#pragma once

#include <string>
#include <vector>

namespace hartree {

// Gamma function for x > 0 (reflection is used internally for x < 1/2).
double gamma_fn(double x);
double lgamma_fn(double x);
// Gamma(x + k) / Gamma(y + k) by recurrence from Gamma(x)/Gamma(y).
double gamma_ratio_shift(double x, double y, int k);
double beta_fn(double a, double b);

double sphere_surface_area(int n);
double ball_volume(int n);

double hls_sharp_constant(int N, double mu);
long long harmonic_dim(int N, int k);
double funk_hecke_eigenvalue(int N, double t, int k);

struct AdmissibilityReport {
  bool admissible = true;
  std::vector<std::string> violations;
};
AdmissibilityReport check_admissible(int N, double alpha);

// Upper end of the admissible alpha interval, N - 5 + 6/(N-2).
double alpha_upper_bound(int N);

struct DerivedConstants {
  double C_N_alpha = 0;      // bubble amplitude
  double C_pow = 0;          // C_N_alpha^((2 alpha + 4)/(N-2)), evaluated without pow
  double I_kernel = 0;       // riesz_selfconv_constant(N, N - alpha)
  double C_N = 0;            // Green constant Gamma(N/2) / (2 (N-2) pi^(N/2))
  double A1 = 0;             // closed form of the single bubble double convolution
  double A2 = 0;             // second moment version of A1
};

class SystemParams {
 public:
  // Throws std::domain_error when (N, alpha) is inadmissible.
  SystemParams(int N, double alpha);

  int N() const { return N_; }
  double alpha() const { return alpha_; }
  double two_star() const { return two_star_; }
  double mu() const { return N_ - alpha_; }
  const DerivedConstants& constants() const { return c_; }
  double C() const { return c_.C_N_alpha; }

 private:
  int N_;
  double alpha_;
  double two_star_;
  DerivedConstants c_;
};

double bubble_amplitude(const SystemParams& p);
double riesz_selfconv_constant(int N, double mu);

}  // namespace hartree
