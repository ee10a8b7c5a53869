#include "hartree/nondegeneracy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hartree/quadrature.hpp"

namespace hartree {

double double_kernel_eigenvalue(const SystemParams& p, int k) {
  int N = p.N();
  double ts = p.two_star();
  double t2 = N - 2.0, ta = N - p.alpha();
  return funk_hecke_eigenvalue(N, t2, k) *
         (ts * funk_hecke_eigenvalue(N, ta, k) + (ts - 1.0) * funk_hecke_eigenvalue(N, ta, 0));
}

double spectral_multiplier(const SystemParams& p, int k) {
  if (k < 0) throw std::domain_error("spectral_multiplier: k must be >= 0");
  int N = p.N();
  double ts = p.two_star();
  const auto& c = p.constants();
  return c.C_N * c.C_pow * std::pow(2.0, -(ts - 1.0) * (N - 2.0)) * double_kernel_eigenvalue(p, k);
}

double mu0_closed_form(const SystemParams& p) {
  return (p.N() + 2.0 * p.alpha() + 2.0) / (p.N() - 2.0);
}

SpectralVerdict classify_spectrum(std::vector<SpectralRow>& rows, double tol) {
  SpectralVerdict v;
  for (auto& r : rows) {
    r.crosses_one = std::abs(r.mu_k - 1.0) <= tol;
    bool ok = (r.k == 1) == r.crosses_one;
    if (!ok && v.nondegenerate) {
      v.nondegenerate = false;
      v.anomaly_k = r.k;
    }
  }
  return v;
}

SpectralReport nondegeneracy_report(const SystemParams& p, int kmax, double tol) {
  if (kmax < 2) throw std::domain_error("nondegeneracy_report: kmax must be >= 2");
  SpectralReport rep{p, tol, {}, {}};
  int N = p.N();
  rep.rows.resize(kmax + 1);
#pragma omp parallel for
  for (int k = 0; k <= kmax; ++k) {
    SpectralRow r;
    r.k = k;
    r.lambda_k_N2 = funk_hecke_eigenvalue(N, N - 2.0, k);
    r.lambda_k_Nalpha = funk_hecke_eigenvalue(N, N - p.alpha(), k);
    r.mu_k = spectral_multiplier(p, k);
    rep.rows[k] = r;
  }
  rep.verdict = classify_spectrum(rep.rows, tol);
  return rep;
}

int kernel_dimension(int N) {
  if (N < 5) throw std::domain_error("kernel_dimension: N must be >= 5");
  return 2 * (N + 1);
}

namespace {

// Zonal reduction of int_{S^N} |eta - sigma|^(-t) G(sigma . e) d sigma, where c = eta . e.
struct ZonalOperator {
  int N;
  double t;
  const Rule* s_rule;
  const Rule* u_rule;
  double prefactor;

  ZonalOperator(int N_, double t_, int nodes) : N(N_), t(t_) {
    s_rule = &cached_jacobi(nodes, 0.5 * (N - 2.0 - t), 0.5 * (N - 2.0));
    u_rule = &cached_jacobi(nodes, 0.5 * (N - 3.0), 0.5 * (N - 3.0));
    prefactor = std::pow(2.0, -0.5 * t) * sphere_surface_area(N - 1);
  }

  template <class G>
  double apply(double c, G&& g) const {
    double sc = std::sqrt(std::max(0.0, 1.0 - c * c));
    double total = 0.0;
    for (std::size_t i = 0; i < s_rule->nodes.size(); ++i) {
      double s = s_rule->nodes[i];
      double ss = std::sqrt(std::max(0.0, 1.0 - s * s));
      double inner = 0.0;
      for (std::size_t j = 0; j < u_rule->nodes.size(); ++j) {
        double cs = s * c + ss * sc * u_rule->nodes[j];
        inner += u_rule->weights[j] * g(cs);
      }
      total += s_rule->weights[i] * inner;
    }
    return prefactor * total;
  }
};

}  // namespace

FixedPointCheck integral_system_fixed_point_check(const SystemParams& p, int k, int mode_index,
                                                  std::optional<SpherePoint> xi, int nodes) {
  int N = p.N();
  if (k < 0) throw std::domain_error("fixed_point_check: k must be >= 0");
  if (mode_index < 1 || mode_index > harmonic_dim(N, k)) {
    throw std::domain_error("fixed_point_check: mode_index outside the harmonic space");
  }
  if (!xi) {
    SpherePoint d;
    d.xi.resize(N + 1);
    double s = 0.0;
    for (int i = 0; i <= N; ++i) {
      d.xi[i] = 1.0 / (i + 1.5);
      s += d.xi[i] * d.xi[i];
    }
    for (auto& v : d.xi) v /= std::sqrt(s);
    xi = d;
  }
  int axis = (k == 0) ? 0 : (mode_index - 1) % (N + 1);
  double c = xi->xi[axis];
  double nu = 0.5 * (N - 1.0);
  auto Y = [&](double cs) { return gegenbauer_normalized(k, nu, std::clamp(cs, -1.0, 1.0)); };
  auto one = [](double) { return 1.0; };
  // Degree counts: each zonal reduction is exact for polynomials of degree < 2 * nodes.
  int n = std::max(nodes, k + 2);
  ZonalOperator Aa(N, N - p.alpha(), n), A2(N, N - 2.0, n);
  double ts = p.two_star();
  auto outer = [&](double cs) {
    double inner_mode = Aa.apply(cs, Y);
    double inner_const = Aa.apply(cs, one);
    return ts * inner_mode + (ts - 1.0) * Y(cs) * inner_const;
  };
  FixedPointCheck out;
  out.applied = A2.apply(c, outer);
  out.expected = double_kernel_eigenvalue(p, k) * Y(c);
  return out;
}

}  // namespace hartree
