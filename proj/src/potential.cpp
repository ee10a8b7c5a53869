#include "hartree/potential.hpp"

#include <cmath>
#include <stdexcept>

namespace hartree {

void Potential::gradient(const double* x, int N, double* g) const {
  double y[kMaxDim];
  for (int i = 0; i < N; ++i) y[i] = x[i];
  for (int i = 0; i < N; ++i) {
    double h = 1e-6 * std::max(1.0, std::abs(x[i]));
    y[i] = x[i] + h;
    double fp = value(y, N);
    y[i] = x[i] - h;
    double fm = value(y, N);
    y[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
}

double GaussianBumpPotential::value(const double* x, int N) const {
  double d2 = 0.0;
  for (int i = 0; i < N; ++i) d2 += (x[i] - c_[i]) * (x[i] - c_[i]);
  return 1.0 + a_ * std::exp(-d2 / (w_ * w_));
}

void GaussianBumpPotential::gradient(const double* x, int N, double* g) const {
  double d2 = 0.0;
  for (int i = 0; i < N; ++i) d2 += (x[i] - c_[i]) * (x[i] - c_[i]);
  double e = a_ * std::exp(-d2 / (w_ * w_));
  for (int i = 0; i < N; ++i) g[i] = -2.0 * (x[i] - c_[i]) / (w_ * w_) * e;
}

AxialPolynomialPotential::AxialPolynomialPotential(double r0, Vec x0pp, Eigen::MatrixXd Q,
                                                   double quartic, Eigen::VectorXd linear)
    : r0_(r0), x0pp_(std::move(x0pp)), Q_(std::move(Q)), quartic_(quartic), g_(std::move(linear)) {
  int d = static_cast<int>(x0pp_.size()) + 1;
  if (Q_.rows() != d || Q_.cols() != d) {
    throw std::domain_error("AxialPolynomialPotential: Q must be (N-1)x(N-1)");
  }
  if (g_.size() == 0) g_ = Eigen::VectorXd::Zero(d);
  if (g_.size() != d) throw std::domain_error("AxialPolynomialPotential: linear term size");
  Q_ = 0.5 * (Q_ + Q_.transpose());
}

Eigen::VectorXd AxialPolynomialPotential::reduce(const double* x, int N) const {
  Eigen::VectorXd rx(N - 1);
  rx(0) = std::hypot(x[0], x[1]);
  for (int i = 2; i < N; ++i) rx(i - 1) = x[i];
  return rx;
}

double AxialPolynomialPotential::value_reduced(const Eigen::VectorXd& rx) const {
  Eigen::VectorXd w = rx;
  w(0) -= r0_;
  for (int i = 1; i < w.size(); ++i) w(i) -= x0pp_[i - 1];
  double n2 = w.squaredNorm();
  double k = 1.0 + g_.dot(w) + 0.5 * w.dot(Q_ * w) + quartic_ * n2 * n2;
  return std::max(k, kPotentialFloor);
}

Eigen::VectorXd AxialPolynomialPotential::gradient_reduced(const Eigen::VectorXd& rx) const {
  Eigen::VectorXd w = rx;
  w(0) -= r0_;
  for (int i = 1; i < w.size(); ++i) w(i) -= x0pp_[i - 1];
  double n2 = w.squaredNorm();
  double k = 1.0 + g_.dot(w) + 0.5 * w.dot(Q_ * w) + quartic_ * n2 * n2;
  if (k <= kPotentialFloor) return Eigen::VectorXd::Zero(w.size());
  return g_ + Q_ * w + 4.0 * quartic_ * n2 * w;
}

Eigen::MatrixXd AxialPolynomialPotential::hessian_reduced(const Eigen::VectorXd& rx) const {
  Eigen::VectorXd w = rx;
  w(0) -= r0_;
  for (int i = 1; i < w.size(); ++i) w(i) -= x0pp_[i - 1];
  double n2 = w.squaredNorm();
  Eigen::MatrixXd I = Eigen::MatrixXd::Identity(w.size(), w.size());
  return Q_ + quartic_ * (4.0 * n2 * I + 8.0 * w * w.transpose());
}

double AxialPolynomialPotential::laplacian_at_critical() const { return Q_.trace(); }

double AxialPolynomialPotential::value(const double* x, int N) const {
  if (N - 1 != Q_.rows()) throw std::domain_error("AxialPolynomialPotential: dimension mismatch");
  return value_reduced(reduce(x, N));
}

void AxialPolynomialPotential::gradient(const double* x, int N, double* g) const {
  Eigen::VectorXd rx = reduce(x, N);
  Eigen::VectorXd gr = gradient_reduced(rx);
  double r = rx(0);
  // Chain rule through r = |x'|; the axis r = 0 gets the symmetric limit 0.
  g[0] = r > 0.0 ? gr(0) * x[0] / r : 0.0;
  g[1] = r > 0.0 ? gr(0) * x[1] / r : 0.0;
  for (int i = 2; i < N; ++i) g[i] = gr(i - 1);
}

}  // namespace hartree
