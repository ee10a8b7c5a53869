#pragma once

#include <optional>
#include <vector>

#include "hartree/params_special.hpp"
#include "hartree/stereographic.hpp"

namespace hartree {

struct SpectralRow {
  int k = 0;
  double lambda_k_N2 = 0.0;
  double lambda_k_Nalpha = 0.0;
  double mu_k = 0.0;
  bool crosses_one = false;
};

struct SpectralVerdict {
  bool nondegenerate = true;
  int anomaly_k = -1;  // set when nondegenerate is false
};

struct SpectralReport {
  SystemParams params;
  double tol;
  std::vector<SpectralRow> rows;
  SpectralVerdict verdict;
};

// Multiplier of mode k in the diagonalized integral system on the sphere.
double spectral_multiplier(const SystemParams& p, int k);
// (N + 2 alpha + 2)/(N - 2).
double mu0_closed_form(const SystemParams& p);
// The product lambda_k(N-2) [2* lambda_k(N-alpha) + (2*-1) lambda_0(N-alpha)].
double double_kernel_eigenvalue(const SystemParams& p, int k);

// Verdict from rows whose mu_k are already filled.
SpectralVerdict classify_spectrum(std::vector<SpectralRow>& rows, double tol);
SpectralReport nondegeneracy_report(const SystemParams& p, int kmax = 50, double tol = 1e-9);

int kernel_dimension(int N);

struct FixedPointCheck {
  double applied = 0.0;
  double expected = 0.0;
};

// Applies the composed sphere kernels to a degree-k mode by zonal quadrature and
// compares with the eigenvalue prediction at xi. k = 0: constant; k = 1: the
// coordinate xi_{mode_index}; k >= 2: a zonal harmonic about a coordinate axis.
FixedPointCheck integral_system_fixed_point_check(const SystemParams& p, int k, int mode_index,
                                                  std::optional<SpherePoint> xi = std::nullopt,
                                                  int nodes = 24);

}  // namespace hartree
