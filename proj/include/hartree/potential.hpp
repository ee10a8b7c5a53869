#pragma once

#include <Eigen/Dense>
#include <memory>

#include "hartree/montecarlo.hpp"

namespace hartree {

// Coefficient K(x) multiplying the nonlocal term.
class Potential {
 public:
  virtual ~Potential() = default;
  virtual double value(const double* x, int N) const = 0;
  // Default: central differences with step 1e-6.
  virtual void gradient(const double* x, int N, double* g) const;
  // True only when K is identically one, which enables closed-form convolutions.
  virtual bool is_unit() const { return false; }
};

class ConstantPotential : public Potential {
 public:
  explicit ConstantPotential(double c = 1.0) : c_(c) {}
  double value(const double*, int) const override { return c_; }
  void gradient(const double*, int N, double* g) const override {
    for (int i = 0; i < N; ++i) g[i] = 0.0;
  }
  bool is_unit() const override { return c_ == 1.0; }

 private:
  double c_;
};

// 1 + amplitude * exp(-|x - center|^2 / width^2).
class GaussianBumpPotential : public Potential {
 public:
  GaussianBumpPotential(Vec center, double amplitude, double width)
      : c_(std::move(center)), a_(amplitude), w_(width) {}
  double value(const double* x, int N) const override;
  void gradient(const double* x, int N, double* g) const override;

 private:
  Vec c_;
  double a_, w_;
};

// Axially symmetric K(|x'|, x'') = 1 + g.w + (1/2) w^T Q w + quartic |w|^4,
// w = (|x'| - r0, x'' - x0''), clamped below at 1e-6.
class AxialPolynomialPotential : public Potential {
 public:
  AxialPolynomialPotential(double r0, Vec x0pp, Eigen::MatrixXd Q, double quartic,
                           Eigen::VectorXd linear = {});

  double value(const double* x, int N) const override;
  void gradient(const double* x, int N, double* g) const override;

  // Functions of the reduced variables (r, x'').
  double value_reduced(const Eigen::VectorXd& rx) const;
  Eigen::VectorXd gradient_reduced(const Eigen::VectorXd& rx) const;
  Eigen::MatrixXd hessian_reduced(const Eigen::VectorXd& rx) const;
  // Laplacian of K in R^N at the critical point equals the trace of the reduced Hessian.
  double laplacian_at_critical() const;

  int reduced_dim() const { return static_cast<int>(Q_.rows()); }
  double r0() const { return r0_; }
  const Vec& x0pp() const { return x0pp_; }
  const Eigen::MatrixXd& Q() const { return Q_; }
  double quartic() const { return quartic_; }
  const Eigen::VectorXd& linear() const { return g_; }

 private:
  Eigen::VectorXd reduce(const double* x, int N) const;
  double r0_;
  Vec x0pp_;
  Eigen::MatrixXd Q_;
  double quartic_;
  Eigen::VectorXd g_;
};

constexpr double kPotentialFloor = 1e-6;

}  // namespace hartree
