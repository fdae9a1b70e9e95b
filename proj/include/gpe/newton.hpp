#pragma once

#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Core>

#include "gpe/gradient.hpp"
#include "gpe/grid.hpp"
#include "gpe/problem.hpp"

namespace gpe {

struct NewtonParams {
  double eta1 = 0.01;
  double eta2 = 0.9;
  double gamma1 = 2.0;
  double gamma2 = 4.0;
  double delta0 = 0.0;       // <= 0 selects max(1, ||G(X1)||)
  double delta_floor = 1e-12;
  double delta_stop = 1e-8;  // ||X+ - X||_inf over accepted steps
  int k_init = 100;
  int k_sub = 200;
  int k_newton = 500;
  double sub_rel_tol = 1e-2;
  double sub_abs_tol = 1e-8;
  GradParams grad;           // warm start and subproblem line search

  void validate() const;
};

/// Regularized second-order model around the anchor X_k:
///
///   W(X) = Re(X^* H X) + sum_j [ 4 alpha |X_k,j|^2 c_j
///                               + 2 alpha (|X_k,j|^2 |D_j|^2 + 2 c_j^2) ]
///          + delta/2 ||D||^2,        D = X - X_k,  c_j = Re(conj(X_k,j) D_j).
///
/// W(X) - W(X_k) is the second-order Taylor expansion of F at X_k plus the
/// proximal term.
template <typename Scalar>
struct NewtonModel {
  const DiscreteProblem* problem = nullptr;
  Eigen::VectorX<Scalar> anchor;
  double delta = 1.0;

  /// W and its gradient in the Re(D^* G) convention.
  Evaluation<Scalar> operator()(const Eigen::VectorX<Scalar>& x) const;
};

template <typename Scalar>
double model_value(const NewtonModel<Scalar>& m, const Eigen::VectorX<Scalar>& x);
template <typename Scalar>
Eigen::VectorX<Scalar> model_gradient(const NewtonModel<Scalar>& m,
                                      const Eigen::VectorX<Scalar>& x);

template <typename Scalar>
struct SubproblemResult {
  Eigen::VectorX<Scalar> z;
  double model_start = 0.0;  // W(X_start)
  double model_end = 0.0;    // W(Z)
  int iterations = 0;
  int evaluations = 0;
};

/// Approximately minimizes the model on the sphere with the feasible
/// gradient method; never returns a point with W(Z) > W(X_start).
template <typename Scalar>
SubproblemResult<Scalar> solve_subproblem(const NewtonModel<Scalar>& m,
                                          const Eigen::VectorX<Scalar>& start,
                                          const NewtonParams& params, double gradient_norm);

/// (F(Z) - F(X_k)) / (W(Z) - W(X_k)); -inf when the model decrease is below
/// 1e-16 max(1, |W(X_k)|).
double tr_ratio(double f_new, double f_old, double w_new, double w_old);

bool accept_step(double rho, const NewtonParams& params);
double update_regularization(double delta, double rho, const NewtonParams& params);

struct NewtonTrace {
  int level = 0;
  int k = 0;
  double energy = 0.0;  // F at the current iterate after the update
  double rho = 0.0;
  double delta = 0.0;
  double delta_next = 0.0;
  bool accepted = false;
  double step = 0.0;    // ||Z - X_k||_inf
  double residual = 0.0;  // ||R|| at the current iterate
  int sub_iterations = 0;
};

template <typename Scalar>
struct NewtonResult {
  Eigen::VectorX<Scalar> x;
  Eigen::VectorX<Scalar> gradient;
  double energy = 0.0;
  double theta = 0.0;
  double residual = 0.0;
  int warm_iterations = 0;
  int iterations = 0;  // outer Newton iterations
  int rejected = 0;
  int sub_iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<NewtonTrace> trace;
  std::vector<double> accepted_energies;  // F after the warm start and after each accepted step
};

/// Algorithm 2: K_init gradient steps, then regularized Newton iterations
/// until an accepted step moves X by at most delta_stop in the max norm.
template <typename Scalar>
NewtonResult<Scalar> newton_solve(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x0,
                                  const NewtonParams& params, int level = 0,
                                  const std::function<void(const NewtonTrace&)>& trace = {});

/// Interpolates a unit-sphere state from `coarse` to `fine` = refine_grid(coarse)
/// and renormalizes. FD: multilinear; SP: sine zero-padding; FP: Fourier
/// zero-padding with the Nyquist coefficient split symmetrically.
template <typename Scalar>
Eigen::VectorX<Scalar> prolong(const Eigen::VectorX<Scalar>& x, Flavor flavor,
                               const Grid& coarse, const Grid& fine);

using ProblemBuilder = std::function<DiscreteProblem(const Grid&)>;

template <typename Scalar>
struct CascadicResult {
  std::vector<Grid> grids;
  std::vector<NewtonResult<Scalar>> levels;
  const NewtonResult<Scalar>& finest() const { return levels.back(); }
};

/// Algorithm 3: Newton solve on g0, prolong, solve again, `levels` grids in all.
template <typename Scalar>
CascadicResult<Scalar> cascadic_solve(const ProblemBuilder& build, const Grid& g0, int levels,
                                      const Eigen::VectorX<Scalar>& x0,
                                      const NewtonParams& params,
                                      const std::function<void(const NewtonTrace&)>& trace = {});

}  // namespace gpe
