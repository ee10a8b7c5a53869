#include "hartree/stereographic.hpp"

#include <cmath>

namespace hartree {

SpherePoint stereo_forward(const Vec& x) {
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  SpherePoint p;
  p.xi.resize(x.size() + 1);
  for (std::size_t i = 0; i < x.size(); ++i) p.xi[i] = 2.0 * x[i] / (1.0 + n2);
  p.xi.back() = (1.0 - n2) / (1.0 + n2);
  return p;
}

Vec stereo_inverse(const SpherePoint& p) {
  double den = 1.0 + p.xi.back();
  if (den < kSouthPoleGuard) throw SingularPointError("stereo_inverse: south pole");
  Vec x(p.xi.size() - 1);
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.xi[i] / den;
  return x;
}

double stereo_jacobian(const Vec& x) {
  double n2 = 0.0;
  for (double v : x) n2 += v * v;
  return std::pow(2.0 / (1.0 + n2), static_cast<double>(x.size()));
}

DistancePair distance_identity_check(const Vec& x, const Vec& y) {
  SpherePoint a = stereo_forward(x), b = stereo_forward(y);
  double d2 = 0.0, e2 = 0.0, nx = 0.0, ny = 0.0;
  for (std::size_t i = 0; i < a.xi.size(); ++i) d2 += (a.xi[i] - b.xi[i]) * (a.xi[i] - b.xi[i]);
  for (std::size_t i = 0; i < x.size(); ++i) {
    e2 += (x[i] - y[i]) * (x[i] - y[i]);
    nx += x[i] * x[i];
    ny += y[i] * y[i];
  }
  return {std::sqrt(d2), std::sqrt(e2) * std::sqrt(2.0 / (1.0 + nx)) * std::sqrt(2.0 / (1.0 + ny))};
}

double pushforward(const EuclidFn& h, const SpherePoint& p) {
  Vec x = stereo_inverse(p);
  double N = static_cast<double>(x.size());
  return std::pow(stereo_jacobian(x), (2.0 - N) / (2.0 * N)) * h(x);
}

double pullback(const SphereFn& H, const Vec& x) {
  double N = static_cast<double>(x.size());
  return std::pow(stereo_jacobian(x), (N - 2.0) / (2.0 * N)) * H(stereo_forward(x));
}

double pushforward_phi_expected(const SystemParams& p, int index, const SpherePoint& xi) {
  int N = p.N();
  double c = std::pow(2.0, -0.5 * N) * p.C();
  if (index == N + 1) return (N - 2.0) * c * xi.xi[N];
  return (2.0 - N) * c * xi.xi[index - 1];
}

SpherePoint random_sphere_point(int N, CounterRng& rng) {
  SpherePoint p;
  p.xi.resize(N + 1);
  rng.unit_vector(N + 1, p.xi.data());
  return p;
}

}  // namespace hartree
