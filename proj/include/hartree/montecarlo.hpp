#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace hartree {

using Vec = std::vector<double>;
constexpr int kMaxDim = 16;

// SplitMix64 finalizer; the generator is a pure function of (seed, index, draw).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t index, std::uint32_t draw) {
  std::uint64_t h = mix64(seed ^ mix64(index * 0x2545F4914F6CDD1DULL + draw));
  // 53 random bits, open interval (0, 1).
  return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53;
}

class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t index) : seed_(seed), index_(index) {}
  double uniform() { return counter_uniform(seed_, index_, draw_++); }
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform(), u2 = uniform();
    double rad = std::sqrt(-2.0 * std::log(u1));
    spare_ = rad * std::sin(6.283185307179586 * u2);
    has_spare_ = true;
    return rad * std::cos(6.283185307179586 * u2);
  }
  void unit_vector(int n, double* out) {
    double s = 0.0;
    do {
      s = 0.0;
      for (int i = 0; i < n; ++i) {
        out[i] = normal();
        s += out[i] * out[i];
      }
    } while (s == 0.0);
    s = 1.0 / std::sqrt(s);
    for (int i = 0; i < n; ++i) out[i] *= s;
  }

 private:
  std::uint64_t seed_, index_;
  std::uint32_t draw_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class Exec { serial, parallel };

// Chan-style mergeable mean / variance accumulator.
struct MCAccumulator {
  double n = 0.0, mean = 0.0, m2 = 0.0;
  void add(double x) {
    n += 1.0;
    double d = x - mean;
    mean += d / n;
    m2 += d * (x - mean);
  }
  void merge(const MCAccumulator& o) {
    if (o.n == 0.0) return;
    if (n == 0.0) {
      *this = o;
      return;
    }
    double tot = n + o.n;
    double d = o.mean - mean;
    mean += d * o.n / tot;
    m2 += o.m2 + d * d * n * o.n / tot;
    n = tot;
  }
  double variance() const { return n > 1.0 ? m2 / (n - 1.0) : 0.0; }
  double std_error() const { return n > 1.0 ? std::sqrt(variance() / n) : 0.0; }
};

constexpr std::size_t kMCBlock = 1024;

// Runs sample(i) for i in [0, n). Blocks are reduced in index order, so the
// result does not depend on the thread count or on exec.
template <class F>
MCAccumulator mc_accumulate(std::size_t n, F&& sample, Exec exec = Exec::parallel) {
  std::size_t nblocks = (n + kMCBlock - 1) / kMCBlock;
  std::vector<MCAccumulator> blocks(nblocks);
  auto run_block = [&](std::size_t b) {
    MCAccumulator acc;
    std::size_t hi = std::min(n, (b + 1) * kMCBlock);
    for (std::size_t i = b * kMCBlock; i < hi; ++i) acc.add(sample(i));
    blocks[b] = acc;
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (long long b = 0; b < static_cast<long long>(nblocks); ++b) run_block(b);
  } else {
    for (std::size_t b = 0; b < nblocks; ++b) run_block(b);
  }
  MCAccumulator total;
  for (const auto& b : blocks) total.merge(b);
  return total;
}

struct MonteCarloSpec {
  std::size_t sample_count = 100000;
  std::uint64_t seed = 1;
  // 0 means no stratification; otherwise the number of equal-volume radial shells.
  int radial_shells = 0;
};

struct Domain {
  enum class Kind { ball, annulus, box };
  Kind kind = Kind::ball;
  Vec center;
  double r_in = 0.0, r_out = 1.0;
  Vec lo, hi;

  static Domain ball(Vec c, double r) { return {Kind::ball, std::move(c), 0.0, r, {}, {}}; }
  static Domain annulus(Vec c, double a, double b) {
    return {Kind::annulus, std::move(c), a, b, {}, {}};
  }
  static Domain box(Vec l, Vec h) { return {Kind::box, {}, 0.0, 0.0, std::move(l), std::move(h)}; }
  int dim() const { return kind == Kind::box ? static_cast<int>(lo.size()) : static_cast<int>(center.size()); }
  double volume() const;
};

struct MCEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

using PointFn = std::function<double(const double*)>;

MCEstimate monte_carlo_integral(const PointFn& g, const Domain& d, const MonteCarloSpec& spec,
                                Exec exec = Exec::parallel);

// Importance sampler for int |x - y|^(-mu) g(y) dy. The proposal mixes
// bubble-shaped densities (1 + l^2 |y - z|^2)^(-(N+2)/2) at the given centers
// with a kernel-shaped density |y - x|^(-mu) (1 + |y - x|^2 / R^2)^(-(N-mu+2)/2),
// which keeps the variance finite for every mu in (0, N).
class ConvolutionSampler {
 public:
  ConvolutionSampler(int N, double mu, std::vector<Vec> centers, std::vector<double> scales,
                     double kernel_weight = 0.3);

  int N() const { return N_; }
  double mu() const { return mu_; }

  // Draws y given x and returns the proposal density at y.
  double sample(const double* x, double R, CounterRng& rng, double* y) const;
  double density(const double* x, double R, const double* y) const;
  double bubble_density(const double* y) const;
  // Bubble part only (no kernel component), for sampling outer integration points.
  double sample_bubble(CounterRng& rng, double* y) const;

  // One unbiased draw of the convolution integral.
  template <class G>
  double draw(const double* x, double R, G&& g, CounterRng& rng) const {
    double y[kMaxDim];
    double p = sample(x, R, rng, y);
    double d2 = 0.0;
    for (int i = 0; i < N_; ++i) d2 += (x[i] - y[i]) * (x[i] - y[i]);
    if (d2 == 0.0 || p == 0.0) return 0.0;
    return std::pow(d2, -0.5 * mu_) * g(y) / p;
  }

 private:
  int N_;
  double mu_;
  std::vector<Vec> centers_;
  std::vector<double> scales_;
  double wk_;
  double bubble_norm_;  // normalizer of (1+|w|^2)^(-(N+2)/2)
  double kernel_norm_;  // normalizer of |w|^(-mu)(1+|w|^2)^(-(N-mu+2)/2)
};

}  // namespace hartree
