#pragma once

#include <functional>
#include <string>
#include <vector>

#include "hartree/bubble.hpp"
#include "hartree/montecarlo.hpp"
#include "hartree/params_special.hpp"
#include "hartree/potential.hpp"

namespace hartree {

struct PolygonConfig {
  int m = 1;
  double r_bar = 1.0;
  Vec x_bar_pp;  // length N - 2
  double lambda = 1.0;
  SystemParams params;
  bool window_regime = false;
  double L0 = 0.5;
  double L1 = 2.0;

  PolygonConfig(const SystemParams& p, int m_, double r, Vec xpp, double l);
  // Throws std::domain_error on invalid fields or, when window_regime is set, on a
  // lambda outside [L0 m^e, L1 m^e], e = (N-2)/(N-4).
  void validate() const;
};

double lambda_window_exponent(int N);

std::vector<Vec> polygon_centers(const PolygonConfig& cfg);
// sum_{j=2}^m (2 r sin((j-1) pi / m))^(-p); 0 for m < 2.
double interaction_sum(int m, double r_bar, double p);
double interaction_sum(const PolygonConfig& cfg, double p);

// xi = 1 for d <= delta, 0 for d >= 2 delta, d = |(|x'| - r0, x'' - x0'')|.
struct CutoffSpec {
  double r0 = 1.0;
  Vec x0pp;
  double delta = 0.1;
};

// Smooth step on [0, 1]: 1 at 0, 0 at 1, all derivatives vanishing at both ends.
double cutoff_profile(double s);

struct CutoffJet {
  double value = 0.0;
  Vec grad;
  double laplacian = 0.0;
};

double cutoff_eval(const CutoffSpec& spec, const Vec& x);
double cutoff_eval(const CutoffSpec& spec, const double* x, int N);
CutoffJet cutoff_jet(const CutoffSpec& spec, const double* x, int N);
// (|x'| - r0, x'' - x0'') distance.
double cutoff_distance(const CutoffSpec& spec, const double* x, int N);

enum class AnsatzField { Z, Y, Z_star, Y_star };

double ansatz_eval(const PolygonConfig& cfg, const CutoffSpec& cutoff, AnsatzField which,
                   const Vec& x);

// Sum of all bubbles (no cutoff) with gradient.
struct StarJet {
  double value = 0.0;
  Vec grad;
};
StarJet ansatz_star_jet(const PolygonConfig& cfg, const double* x);

// l = 1: d/d lambda, l = 2: d/d r_bar, l = 3..N: d/d of center coordinate l; of xi U_{z_j, lambda}.
double derivative_basis_eval(const PolygonConfig& cfg, const CutoffSpec& cutoff, int j, int l,
                             const Vec& x);

struct WeightedNormSpec {
  double eta_bar = 0.05;
  std::vector<Vec> sample_set;
  double tau() const { return 1.0 + eta_bar; }
};

enum class NormKind { star, starstar };

struct NormResult {
  double value = 0.0;
  std::size_t samples = 0;
  std::size_t argmax = 0;
};

// Weight sum_j (1 + lambda |x - z_j|)^(-e), e = (N-2)/2 + tau (star) or (N+2)/2 + tau (starstar).
double norm_weight(const PolygonConfig& cfg, NormKind kind, double tau, const double* x);

// Sup over the sample set; a lower bound on the true norm.
NormResult weighted_norm(NormKind kind, const std::function<double(const Vec&)>& field,
                         const PolygonConfig& cfg, const WeightedNormSpec& spec);
// Same sup taken over precomputed field values aligned with spec.sample_set.
NormResult weighted_norm_values(NormKind kind, const std::vector<double>& values,
                                const PolygonConfig& cfg, const WeightedNormSpec& spec);

// Bubble peaks, midpoints of adjacent peaks, points in the cutoff band, and random fill
// near the bubbles, all in the 2 pi / m fundamental sector.
std::vector<Vec> structured_sample_set(const PolygonConfig& cfg, const CutoffSpec& cutoff,
                                       int random_fill, std::uint64_t seed);

struct LmPoint {
  Vec x;
  double l1 = 0.0, l2 = 0.0;
  double se1 = 0.0, se2 = 0.0;
  double weighted = 0.0;  // (|l1| + |l2|) / weight, with the lambda prefactor
};

struct LmProbeResult {
  double norm_estimate = 0.0;
  double std_error = 0.0;  // at the maximizing point
  std::vector<LmPoint> per_point;
  bool flagged = false;  // max pointwise MC error exceeds rel_tol times the norm
  std::string note;
};

// l_m = (l_m1, l_m2) evaluated pointwise: the ansatz nonlinear term minus the
// cutoffed bubble sum, plus the commutator Z* Delta xi + 2 grad xi . grad Z*.
// Convolutions with K = 1 are closed form; the remainder is Monte Carlo.
LmProbeResult residual_lm_probe(const PolygonConfig& cfg, const CutoffSpec& cutoff,
                                const Potential& K1, const Potential& K2,
                                const WeightedNormSpec& norm_spec, const MonteCarloSpec& mc,
                                double rel_tol = 0.25);

// l_m1 at one point, exposed for tests.
LmPoint lm_point(const PolygonConfig& cfg, const CutoffSpec& cutoff, const Potential& K1,
                 const Potential& K2, const Vec& x, const MonteCarloSpec& mc,
                 std::uint64_t stream);

enum class EstimateKind { B2, B3, B4 };

struct EstimateInputs {
  // B2
  double a = 2.0, b = 2.0, delta = 2.0;
  double separation = 1.0;
  // B3: delta in (0, N - 2); B4: eta > 0, kernel exponent mu.
  int N = 5;
  double eta = 0.5;
  double mu = 3.0;
  double r_max = 1e3;
};

struct EstimateSample {
  double where = 0.0;  // |x| or a coordinate summary
  double ratio = 0.0;
};

struct EstimateResult {
  double max_ratio = 0.0;
  std::vector<EstimateSample> samples;
  // B4 only: far-field log-log decay exponent and its predicted value min{mu, eta}.
  double decay_exponent = 0.0;
  double predicted_exponent = 0.0;
};

EstimateResult estimate_probe(EstimateKind which, const EstimateInputs& in, std::size_t sample_count,
                              std::uint64_t seed);

}  // namespace hartree
