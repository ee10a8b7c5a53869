#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "hartree/montecarlo.hpp"
#include "hartree/multibubble.hpp"
#include "hartree/params_special.hpp"
#include "hartree/potential.hpp"

namespace hartree {

// K_i(r, x'') = 1 + g_i.w + (1/2) w^T q_i w + quartic_i |w|^4, w = (r - r0, x'' - x0'').
struct PotentialPair {
  int N = 5;
  double r0 = 1.0;
  Vec x0pp;
  double delta = 0.1;
  Eigen::MatrixXd q1, q2;
  double quartic1 = 0.0, quartic2 = 0.0;
  Eigen::VectorXd linear1, linear2;  // empty means zero

  static PotentialPair quadratic(int N, double r0, Vec x0pp, double delta, Eigen::MatrixXd q1,
                                 Eigen::MatrixXd q2);
  AxialPolynomialPotential K1() const;
  AxialPolynomialPotential K2() const;
  // Reduced gradient of K1 + K2 at (r, x'').
  Eigen::VectorXd grad_sum(const Eigen::VectorXd& rx) const;
  Eigen::VectorXd critical_point() const;
};

struct PotentialReport {
  bool values_one = false;
  bool common_critical_point = false;
  bool condition_II = false;
  bool positive_on_ball = false;
  bool nondegenerate = false;
  int degree_proxy = 0;  // sign det Hess(K1 + K2), 0 when degenerate
  double laplacian1 = 0.0, laplacian2 = 0.0;
  std::vector<std::string> diagnostics;
  bool ok() const { return diagnostics.empty(); }
};

PotentialReport potential_checks(const PotentialPair& p);

// A1 = int (|.|^(-mu) * U^2*) U^2* for the unit bubble, by radial quadrature.
double constant_B1_pair(const SystemParams& params);
// A2, the |y|^2-weighted analogue, by radial quadrature.
double constant_A2(const SystemParams& params);

struct B3Result {
  double value = 0.0;
  bool sign_ok = false;
  std::string diagnostic;
};

// B3 = A2 |Delta(K1 + K2)(x0)| / (2 2* N); sign_ok requires Delta(K1 + K2) < 0.
B3Result constant_B3(const SystemParams& params, const PotentialPair& pot);

struct B4Options {
  std::vector<double> separations{8.0, 16.0, 32.0, 64.0};
  MonteCarloSpec mc{200000, 11, 0};
  double exponent_tol = 0.5;  // fit accepted when |fitted - (N-2)| <= exponent_tol
};

struct B4Point {
  double separation = 0.0;
  double interaction = 0.0;  // 2 J0 - J(two bubbles), expected ~ 2 B4 / ((N-2) d^(N-2))
  double std_error = 0.0;
};

struct B4Result {
  double value = 0.0;
  double std_error = 0.0;
  double fitted_exponent = 0.0;  // decay exponent of the interaction in d, expected N - 2
  double asymptotic = 0.0;       // (N-2) N (N-2) C^2 pi^(N/2) / Gamma(N/2 + 1)
  std::vector<B4Point> points;
  std::string provenance = "quadrature-fit";
};

// Throws AccuracyError when the fitted exponent misses N - 2 by more than exponent_tol.
B4Result constant_B4(const SystemParams& params, const B4Options& opt = {});
double constant_B4_asymptotic(const SystemParams& params);

// lambda* = (B4 m^(N-2) / B3)^(1/(N-4)).
double balance_lambda(int m, double B3, double B4, int N);
// Same root by bisection of -B3/l^3 + B4 m^(N-2)/l^(N-1), used as an oracle.
double balance_lambda_bisection(int m, double B3, double B4, int N, double rel_tol = 1e-14);

struct ConstantRecord {
  double value = 0.0;
  std::string provenance;  // "quadrature", "closed-form", "quadrature-fit", "asymptotic", "derived", "user-supplied"
};

// Canonical balance constants. With lambda = t m^((N-2)/(N-4)) the dilation equation reads
// -B_dilation / t^3 + B_interaction / t^(N-1) = 0, B_dilation = B3 and
// B_interaction = B4 * interaction_sum(m, r0, N-2) / m^(N-2).
struct ReducedEnergyModel {
  SystemParams params;
  PotentialPair potentials;
  ConstantRecord B1, B2, B3, B4, B5;
  double L0 = 0.5, L1 = 2.0;
  double theta = 0.5;  // half-width of the (r, x'') search box around (r0, x0'')

  ReducedEnergyModel(const SystemParams& p, PotentialPair pot) : params(p), potentials(std::move(pot)) {}
  double B_dilation() const { return B3.value; }
  double B_interaction(int m) const;
};

// Fills B1..B5 from quadrature and the asymptotic interaction constant; a fitted B4
// may be supplied instead.
ReducedEnergyModel build_model(const SystemParams& p, const PotentialPair& pot,
                               std::optional<ConstantRecord> B4 = std::nullopt);

// F(t, r, x'') = (-B_dil/t^3 + B_int/t^(N-1), grad_{r,x''}(K1 + K2)).
Eigen::VectorXd reduced_F(const ReducedEnergyModel& model, int m, const Eigen::VectorXd& y);

struct BalanceSolution {
  bool success = false;
  double t_star = 0.0;
  double r_star = 0.0;
  Vec x_star_pp;
  double residual_norm = 0.0;
  int iterations = 0;
  bool used_bisection = false;
  std::string diagnostic;
};

struct SolverOptions {
  double tol = 1e-12;
  int max_iterations = 100;
  double fd_step = 1e-6;
};

BalanceSolution solve_reduced_system(const ReducedEnergyModel& model, int m,
                                     const SolverOptions& opt = {});

struct LandscapeRow {
  double t = 0.0;
  double balance = 0.0;
};
std::vector<LandscapeRow> landscape(const ReducedEnergyModel& model, int m, double t_lo,
                                    double t_hi, int points);

struct EnergyEstimate {
  double J = 0.0;
  double std_error = 0.0;
  double self_part = 0.0;  // m A1 (1 - 1/2*)
};

// J(Z, Y) = int grad Z . grad Y - (1/(2 2*)) [D_K1(Y) + D_K2(Z)] for the synchronized ansatz.
// Without a cutoff the bubble sum is used directly.
EnergyEstimate energy_estimate(const PolygonConfig& cfg, const std::optional<CutoffSpec>& cutoff,
                               const Potential& K1, const Potential& K2, const MonteCarloSpec& mc);

}  // namespace hartree
