#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "gpe/problem.hpp"

namespace gpe {

/// Lagrange multiplier and projected gradient at X.
template <typename Scalar>
struct Multiplier {
  double theta = 0.0;
  Eigen::VectorX<Scalar> residual;
};

/// theta = Re(X^* G) and R = A(X) X = G (X^* X) - X Re(G^* X), the gradient
/// projected onto the tangent space of the sphere. The M x M skew matrix
/// A(X) = G X^* - X G^* is never formed.
template <typename DerivedX, typename DerivedG>
Multiplier<typename DerivedX::Scalar> multiplier_and_residual(
    const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedG>& g) {
  Multiplier<typename DerivedX::Scalar> out;
  out.theta = real_dot(x, g);
  out.residual = x.squaredNorm() * g - out.theta * x;
  return out;
}

/// Closed form of the curvilinear update
///   Y(tau) = (I + tau A(X))^{-1} (I - tau A(X)) X = a(tau) X + b(tau) G,
/// which keeps ||Y|| = ||X|| for every tau >= 0.
template <typename DerivedX, typename DerivedG>
Eigen::VectorX<typename DerivedX::Scalar> feasible_point(const Eigen::MatrixBase<DerivedX>& x,
                                                         const Eigen::MatrixBase<DerivedG>& g,
                                                         double tau) {
  const double xg = real_dot(x, g);
  const double xx = x.squaredNorm();
  const double gg = g.squaredNorm();
  const double t2 = tau * tau;
  // 1 + tau^2 (||X||^2 ||G||^2 - (X^*G)^2) >= 1 by Cauchy-Schwarz
  const double denom = 1.0 - t2 * xg * xg + t2 * xx * gg;
  assert(denom >= 1.0 - 1e-12);
  const double a = ((1.0 + tau * xg) * (1.0 + tau * xg) - t2 * xx * gg) / denom;
  const double b = -2.0 * tau * xx / denom;
  return a * x + b * g;
}

/// Barzilai-Borwein step from S = X_k - X_{k-1}, W = R_k - R_{k-1}.
/// Variant 1: S.S / |S.W|; variant 2: |S.W| / W.W. Non-finite values reset to
/// tau_max, finite values are clamped to [tau_min, tau_max].
template <typename DerivedS, typename DerivedW>
double bb_step(const Eigen::MatrixBase<DerivedS>& s, const Eigen::MatrixBase<DerivedW>& w,
               int variant, double tau_min = 1e-10, double tau_max = 1e10) {
  const double sw = std::abs(real_dot(s, w));
  const double tau = variant == 1 ? s.squaredNorm() / sw : sw / w.squaredNorm();
  if (!std::isfinite(tau)) return tau_max;
  return std::min(std::max(tau, tau_min), tau_max);
}

}  // namespace gpe
