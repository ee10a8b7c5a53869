#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "hartree/bubble.hpp"
#include "hartree/montecarlo.hpp"
#include "hartree/multibubble.hpp"
#include "hartree/potential.hpp"

namespace hartree {

// D_rho = {x : |(|x'| - r0, x'' - x0'')| <= rho}.
struct PohozaevDomain {
  double r0 = 1.0;
  Vec x0pp;
  double rho = 0.35;

  static PohozaevDomain around(const CutoffSpec& c) { return {c.r0, c.x0pp, 3.5 * c.delta}; }
  // rho in (2 delta, 5 delta).
  bool admissible(double delta) const { return rho > 2.0 * delta && rho < 5.0 * delta; }
  bool contains(const double* x, int N) const;
};

// A field with analytic derivatives and an unbiased single-draw estimator of
// (|.|^(-mu) * K f^2*)(x) for the potential it is paired with.
struct PohozaevField {
  std::function<double(const double*)> value;
  std::function<void(const double*, double*)> gradient;
  std::function<double(const double*)> neg_laplacian;
  std::function<double(const double*, CounterRng&)> nonlocal_draw;
  // Proposal for the outer integration: bubble-shaped densities at these centers.
  std::vector<Vec> centers;
  std::vector<double> scales;
  double mu = 0.0;
  double two_star = 0.0;
};

// The field U_{z,l}; nonlocal_draw is closed form for unit K, otherwise closed form plus a
// one-sample (K - 1) correction. The potential must outlive the field.
PohozaevField bubble_field(const Bubble& b, const Potential& K);
// The ansatz xi sum_j U_{z_j,l} (or the bare sum without a cutoff).
PohozaevField ansatz_field(const PolygonConfig& cfg, const std::optional<CutoffSpec>& cutoff,
                           const Potential& K);
PohozaevField zero_field(int N);

struct PohozaevResult {
  double value = 0.0;
  double std_error = 0.0;
  // Monte Carlo estimate of the integral of |each term x pairing|, the roundoff scale.
  double abs_scale = 0.0;
  std::size_t samples = 0;
};

// |value| <= k sigma + 1e-12 abs_scale.
bool consistent_with_zero(const PohozaevResult& r, double k = 3.0);

// d1: int_{D_rho} (-Delta u - K1 (conv K1 v^2*) v^(2*-1)) <x, grad v> + (u <-> v, K1 -> K2).
// v must be built with K1 and u with K2, so that each nonlocal_draw carries its own potential.
PohozaevResult pohozaev_dilation_residual(const PohozaevField& u, const PohozaevField& v,
                                          const Potential& K1, const Potential& K2,
                                          const PohozaevDomain& dom, const MonteCarloSpec& mc);
// d2 with pairing d/dx_i, i in 3..N (1-based).
PohozaevResult pohozaev_translation_residual(const PohozaevField& u, const PohozaevField& v,
                                             const Potential& K1, const Potential& K2,
                                             const PohozaevDomain& dom, int i,
                                             const MonteCarloSpec& mc);
// d3 over R^N with pairing d/d lambda of the ansatz.
PohozaevResult pohozaev_scaling_residual(const PohozaevField& u, const PohozaevField& v,
                                         const PolygonConfig& cfg,
                                         const std::optional<CutoffSpec>& cutoff,
                                         const Potential& K1, const Potential& K2,
                                         const MonteCarloSpec& mc);

// A exp(-1/(1 - (rho/R)^2)) for rho < R, zero beyond.
struct RadialBump {
  Vec center;
  double amplitude = 1.0;
  double radius = 0.1;
  double value(double rho) const;
  double d1(double rho) const;
  double d2(double rho) const;
  double neg_laplacian(double rho, int N) const;
};

struct D12Blocks {
  double gradient = 0.0;     // -(N-2) int grad u . grad v
  double convolution = 0.0;  // (1/2*)[N int K W f^2* - mu int K f^2* x.Q] summed over both fields
  double k_derivative = 0.0; // (1/2*) int <x, grad K> W f^2*; zero for constant K
};

struct D12Check {
  double lhs = 0.0;
  double rhs = 0.0;
  D12Blocks blocks;
};

// Two-path check of the integration-by-parts form: lhs is the d1 pairing, rhs the
// rearranged expansion. Fields are concentric radial bumps inside D_rho with constant
// K1 = k1, K2 = k2; the gradient-kernel path needs mu + 1 < N.
D12Check identity_check_d12(const RadialBump& u, const RadialBump& v, double k1, double k2,
                            const PohozaevDomain& dom, const SystemParams& p, double tol = 1e-10);

}  // namespace hartree
