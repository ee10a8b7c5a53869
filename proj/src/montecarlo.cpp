#include "hartree/montecarlo.hpp"

#include <algorithm>

#include "hartree/params_special.hpp"

namespace hartree {

double Domain::volume() const {
  int n = dim();
  switch (kind) {
    case Kind::ball:
      return ball_volume(n) * std::pow(r_out, n);
    case Kind::annulus:
      return ball_volume(n) * (std::pow(r_out, n) - std::pow(r_in, n));
    case Kind::box: {
      double v = 1.0;
      for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
      return v;
    }
  }
  return 0.0;
}

namespace {

void sample_shell(const Domain& d, double a, double b, CounterRng& rng, double* x) {
  int n = d.dim();
  double u[kMaxDim];
  rng.unit_vector(n, u);
  double an = std::pow(a, n), bn = std::pow(b, n);
  double r = std::pow(an + rng.uniform() * (bn - an), 1.0 / n);
  for (int i = 0; i < n; ++i) x[i] = d.center[i] + r * u[i];
}

}  // namespace

MCEstimate monte_carlo_integral(const PointFn& g, const Domain& d, const MonteCarloSpec& spec,
                                Exec exec) {
  if (spec.sample_count == 0) throw std::domain_error("monte_carlo_integral: zero samples");
  int n = d.dim();
  if (n < 1 || n > kMaxDim) throw std::domain_error("monte_carlo_integral: unsupported dimension");
  if (d.kind == Domain::Kind::box) {
    auto acc = mc_accumulate(
        spec.sample_count,
        [&](std::size_t i) {
          CounterRng rng(spec.seed, i);
          double x[kMaxDim];
          for (int k = 0; k < n; ++k) x[k] = d.lo[k] + rng.uniform() * (d.hi[k] - d.lo[k]);
          return g(x);
        },
        exec);
    double v = d.volume();
    return {v * acc.mean, v * acc.std_error(), spec.sample_count};
  }
  int shells = std::max(1, spec.radial_shells);
  double a = d.kind == Domain::Kind::annulus ? d.r_in : 0.0;
  double b = d.r_out;
  double an = std::pow(a, n), bn = std::pow(b, n);
  double vol = d.volume();
  double est = 0.0, var = 0.0;
  std::size_t per = std::max<std::size_t>(2, spec.sample_count / shells);
  for (int s = 0; s < shells; ++s) {
    // Equal-volume shells, so each carries vol / shells.
    double lo = std::pow(an + (bn - an) * s / shells, 1.0 / n);
    double hi = std::pow(an + (bn - an) * (s + 1.0) / shells, 1.0 / n);
    std::uint64_t offset = static_cast<std::uint64_t>(s) * per;
    auto acc = mc_accumulate(
        per,
        [&](std::size_t i) {
          CounterRng rng(spec.seed, offset + i);
          double x[kMaxDim];
          sample_shell(d, lo, hi, rng, x);
          return g(x);
        },
        exec);
    double vs = vol / shells;
    est += vs * acc.mean;
    var += vs * vs * acc.variance() / acc.n;
  }
  return {est, std::sqrt(var), per * shells};
}

ConvolutionSampler::ConvolutionSampler(int N, double mu, std::vector<Vec> centers,
                                       std::vector<double> scales, double kernel_weight)
    : N_(N), mu_(mu), centers_(std::move(centers)), scales_(std::move(scales)), wk_(kernel_weight) {
  if (N < 1 || N > kMaxDim) throw std::domain_error("ConvolutionSampler: unsupported dimension");
  if (!(mu > 0.0 && mu < N)) throw std::domain_error("ConvolutionSampler: mu outside (0, N)");
  if (centers_.size() != scales_.size()) throw std::domain_error("ConvolutionSampler: size mismatch");
  if (centers_.empty()) wk_ = 1.0;
  bubble_norm_ = ball_volume(N);  // pi^(N/2) / Gamma(N/2 + 1)
  kernel_norm_ = sphere_surface_area(N) / (N - mu);
}

double ConvolutionSampler::bubble_density(const double* y) const {
  if (centers_.empty()) return 0.0;
  double s = 0.0;
  for (std::size_t j = 0; j < centers_.size(); ++j) {
    double l = scales_[j], d2 = 0.0;
    for (int i = 0; i < N_; ++i) d2 += (y[i] - centers_[j][i]) * (y[i] - centers_[j][i]);
    s += std::pow(l, N_) * std::pow(1.0 + l * l * d2, -0.5 * (N_ + 2)) / bubble_norm_;
  }
  return s / centers_.size();
}

double ConvolutionSampler::density(const double* x, double R, const double* y) const {
  double d2 = 0.0;
  for (int i = 0; i < N_; ++i) d2 += (y[i] - x[i]) * (y[i] - x[i]);
  double pk = 0.0;
  if (wk_ > 0.0 && d2 > 0.0) {
    pk = std::pow(d2, -0.5 * mu_) * std::pow(1.0 + d2 / (R * R), -0.5 * (N_ - mu_ + 2.0)) /
         (kernel_norm_ * std::pow(R, N_ - mu_));
  }
  return wk_ * pk + (1.0 - wk_) * bubble_density(y);
}

double ConvolutionSampler::sample_bubble(CounterRng& rng, double* y) const {
  std::size_t j = std::min(centers_.size() - 1,
                           static_cast<std::size_t>(rng.uniform() * centers_.size()));
  double dir[kMaxDim];
  rng.unit_vector(N_, dir);
  double u = std::pow(rng.uniform(), 2.0 / N_);
  double rho = std::sqrt(u / (1.0 - u)) / scales_[j];
  for (int i = 0; i < N_; ++i) y[i] = centers_[j][i] + rho * dir[i];
  return bubble_density(y);
}

double ConvolutionSampler::sample(const double* x, double R, CounterRng& rng, double* y) const {
  double pick = rng.uniform();
  double dir[kMaxDim];
  if (pick < wk_) {
    rng.unit_vector(N_, dir);
    double u = std::pow(rng.uniform(), 2.0 / (N_ - mu_));
    double rho = R * std::sqrt(u / (1.0 - u));
    for (int i = 0; i < N_; ++i) y[i] = x[i] + rho * dir[i];
  } else {
    sample_bubble(rng, y);
  }
  return density(x, R, y);
}

}  // namespace hartree
