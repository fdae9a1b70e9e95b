#pragma once

#include <complex>
#include <cstddef>

#include <Eigen/Core>

#include "gpe/grid.hpp"
#include "gpe/potential.hpp"

namespace gpe {

enum class Flavor { FD, SP, FP };
enum class FieldKind { Real, Complex };

const char* to_string(Flavor f);
const char* to_string(FieldKind f);

/// Real part of the Euclidean inner product, Re(a^* b).
template <typename DerivedA, typename DerivedB>
double real_dot(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return std::real(a.dot(b));
}

/// A discretized Gross-Pitaevskii energy on a fixed grid.
///
/// The discrete Hamiltonian H = -1/2 Lap_h + V - Omega L_z acts matrix-free
/// on grid functions; FD uses the second-order stencil, SP the sine
/// pseudospectral symbol, FP the Fourier symbol with rotation. In the unit
/// sphere scaling X = sqrt(cell_volume) Phi the energy reads
///
///   F(X) = X^* H X + alpha sum_j |X_j|^4,   alpha = beta / (2 cell_volume),
///
/// i.e. 1/2 X^* A X + alpha sum |X_j|^4 with A = 2H.
class DiscreteProblem {
 public:
  /// Validates flavor/boundary/rotation compatibility; throws ConfigError.
  DiscreteProblem(Grid grid, Flavor flavor, const Potential& potential, double beta,
                  double omega = 0.0);
  DiscreteProblem(Grid grid, Flavor flavor, const Potential& potential, double beta,
                  double omega, FieldKind field);

  const Grid& grid() const { return grid_; }
  Flavor flavor() const { return flavor_; }
  FieldKind field() const { return field_; }
  const Potential& potential() const { return potential_; }
  double beta() const { return beta_; }
  double omega() const { return omega_; }
  double alpha() const { return beta_ / (2.0 * grid_.cell_volume()); }
  std::ptrdiff_t size() const { return grid_.size(); }
  /// Cached potential samples at the stored nodes.
  const Eigen::VectorXd& potential_samples() const { return v_; }

  /// y = H x. Real input is rejected when Omega != 0.
  void apply_hamiltonian(const Eigen::VectorXd& x, Eigen::VectorXd& y) const;
  void apply_hamiltonian(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

 private:
  template <typename Scalar>
  void stencil_part(const Eigen::VectorX<Scalar>& x, Eigen::VectorX<Scalar>& y) const;
  template <typename Scalar>
  void sine_part(const Eigen::VectorX<Scalar>& x, Eigen::VectorX<Scalar>& y) const;
  void fourier_part(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const;

  Grid grid_;
  Flavor flavor_;
  FieldKind field_;
  Potential potential_;
  double beta_;
  double omega_;
  Eigen::VectorXd v_;
  // SP: lambda_l^2 / (4 N); FP: lambda_p^2 / (2 N) and lambda_p / N with the
  // Nyquist slot zeroed (odd derivative). Indexed by storage slot per axis.
  std::array<Eigen::VectorXd, 3> kinetic_symbol_;
  std::array<Eigen::VectorXd, 3> drift_symbol_;
};

/// Energy and gradient in the unit-sphere scaling. The gradient follows the
/// convention dF(X)[D] = Re(D^* G), so G = A X + 4 alpha |X|^2 X.
template <typename Scalar>
struct Evaluation {
  double energy = 0.0;
  Eigen::VectorX<Scalar> gradient;
};

/// One Hamiltonian application shared by F and G. Throws NumericalError on
/// non-finite output.
template <typename Scalar>
Evaluation<Scalar> evaluate(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x);

template <typename Scalar>
double energy(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x);

/// Second directional derivative
///   D^* A D + 4 alpha sum_j [ |X_j|^2 |D_j|^2 + 2 Re(conj(X_j) D_j)^2 ].
template <typename Scalar>
double hessian_form(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x,
                    const Eigen::VectorX<Scalar>& d);

/// mu = F + alpha sum |X_j|^4 (equals half the Lagrange multiplier).
template <typename Scalar>
double chemical_potential(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x);

/// X = sqrt(cell_volume) Phi. Throws ConfigError when |sum h|Phi|^2 - 1| > 1e-10.
template <typename Scalar>
Eigen::VectorX<Scalar> to_unified(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& phi);
template <typename Scalar>
Eigen::VectorX<Scalar> from_unified(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x);

// Grid-function forms E_h(Phi) and G_h = grad E_h(Phi) = 2 cell_volume (H Phi + beta |Phi|^2 Phi).
// The flavor-named entry points check the problem flavor first.

template <typename Scalar>
double grid_energy(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& phi);
template <typename Scalar>
Eigen::VectorX<Scalar> grid_gradient(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& phi);

double fd_energy(const DiscreteProblem& p, const Eigen::VectorXd& phi);
Eigen::VectorXd fd_gradient(const DiscreteProblem& p, const Eigen::VectorXd& phi);
double sp_energy(const DiscreteProblem& p, const Eigen::VectorXd& phi);
Eigen::VectorXd sp_gradient(const DiscreteProblem& p, const Eigen::VectorXd& phi);
double fp_energy(const DiscreteProblem& p, const Eigen::VectorXcd& phi);
Eigen::VectorXcd fp_gradient(const DiscreteProblem& p, const Eigen::VectorXcd& phi);

}  // namespace gpe
