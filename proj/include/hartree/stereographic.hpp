#pragma once

#include <functional>
#include <stdexcept>

#include "hartree/montecarlo.hpp"
#include "hartree/params_special.hpp"

namespace hartree {

class SingularPointError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Unit vector in R^(N+1).
struct SpherePoint {
  Vec xi;
};

constexpr double kSouthPoleGuard = 1e-9;

SpherePoint stereo_forward(const Vec& x);
Vec stereo_inverse(const SpherePoint& p);
double stereo_jacobian(const Vec& x);

struct DistancePair {
  double lhs = 0.0, rhs = 0.0;
};
// |S(x) - S(y)| against |x - y| r(x) r(y), r(x) = (2 / (1 + |x|^2))^(1/2).
DistancePair distance_identity_check(const Vec& x, const Vec& y);

using EuclidFn = std::function<double(const Vec&)>;
using SphereFn = std::function<double(const SpherePoint&)>;

// S_* h (xi) = J_S(S^-1 xi)^((2-N)/(2N)) h(S^-1 xi).
double pushforward(const EuclidFn& h, const SpherePoint& p);
// S^* H (x) = J_S(x)^((N-2)/(2N)) H(S x).
double pullback(const SphereFn& H, const Vec& x);

// Closed forms of the kernel-basis pushforwards.
double pushforward_phi_expected(const SystemParams& p, int index, const SpherePoint& xi);

SpherePoint random_sphere_point(int N, CounterRng& rng);

}  // namespace hartree
