#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpe/errors.hpp"
#include "gpe/problem.hpp"
#include "gpe/sphere.hpp"

namespace gpe {

struct GradParams {
  double eta = 0.85;         // nonmonotone memory
  double rho1 = 1e-4;        // sufficient decrease
  double delta_back = 0.5;   // backtracking factor
  double eps0 = 1e-6;        // ||X+ - X||_inf / tau <= eps0
  int max_iter = 2000;
  double tau_min = 1e-10;
  double tau_max = 1e10;
  bool monotone = false;     // Armijo against F(X_k) instead of C_k
  double residual_tol = 0.0; // optional stop on ||R|| (0 disables)
  int max_backtracks = 50;

  /// Throws ConfigError unless the parameter ranges hold.
  void validate() const;
};

inline void GradParams::validate() const {
  auto open01 = [](double v) { return v > 0.0 && v < 1.0; };
  if (!open01(eta)) throw ConfigError("solver.eta must lie in (0, 1)");
  if (!open01(rho1)) throw ConfigError("solver.rho1 must lie in (0, 1)");
  if (!open01(delta_back)) throw ConfigError("solver.delta_back must lie in (0, 1)");
  if (!(tau_min > 0.0 && tau_min <= tau_max)) {
    throw ConfigError("solver.tau_min/tau_max must satisfy 0 < tau_min <= tau_max");
  }
  if (max_iter < 0) throw ConfigError("solver.max_iter must be nonnegative");
  if (!(eps0 >= 0.0)) throw ConfigError("solver.eps0 must be nonnegative");
}

/// Objective wrapper for the discrete energy of a problem.
template <typename Scalar>
struct EnergyObjective {
  const DiscreteProblem* problem;
  Evaluation<Scalar> operator()(const Eigen::VectorX<Scalar>& x) const {
    return evaluate(*problem, x);
  }
};

/// Iteration bookkeeping of the feasible gradient method.
template <typename Scalar>
struct OptimState {
  Eigen::VectorX<Scalar> x;
  Eigen::VectorX<Scalar> gradient;
  Eigen::VectorX<Scalar> residual;
  double energy = 0.0;
  double theta = 0.0;
  double tau = 0.0;
  double reference = 0.0;  // C_k
  double weight = 1.0;     // Q_k
  int k = 0;
  Eigen::VectorX<Scalar> prev_x;
  Eigen::VectorX<Scalar> prev_residual;
};

struct GradTrace {
  int k = 0;
  double energy = 0.0;
  double reference = 0.0;
  double residual = 0.0;  // ||R|| at the new iterate
  double tau = 0.0;
  int backtracks = 0;
};

template <typename Scalar>
struct GradResult {
  Eigen::VectorX<Scalar> x;
  Eigen::VectorX<Scalar> gradient;
  double energy = 0.0;
  double theta = 0.0;
  double residual = 0.0;
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::vector<int> backtracks;
  Eigen::VectorX<Scalar> best_x;
  double best_energy = 0.0;
  // set when the line search gave up; x is then the last accepted iterate
  bool step_failed = false;
  std::string failure;
};

template <typename Scalar>
struct SearchOutcome {
  Eigen::VectorX<Scalar> x;
  Evaluation<Scalar> eval;
  double tau = 0.0;
  int backtracks = 0;
  int evaluations = 0;
};

namespace detail {
template <typename Scalar>
void renormalize(Eigen::VectorX<Scalar>& x) {
  if (std::abs(x.squaredNorm() - 1.0) > 1e-14) x.normalize();
}
}  // namespace detail

/// Curvilinear backtracking: the first tau = tau0/2 * delta^m (m = 0, 1, ...)
/// with F(Y(tau)) <= C - rho1 tau ||R||^2, C = F(X) in monotone mode. Updates
/// the reference value C and weight Q of `state` on success.
template <typename Objective, typename Scalar>
SearchOutcome<Scalar> nonmonotone_search(const Objective& objective, OptimState<Scalar>& state,
                                         double tau0, const GradParams& params) {
  const double r2 = state.residual.squaredNorm();
  const double ref = params.monotone ? state.energy : state.reference;
  SearchOutcome<Scalar> out;
  double tau = 0.5 * tau0;
  for (int m = 0; m <= params.max_backtracks; ++m, tau *= params.delta_back) {
    Eigen::VectorX<Scalar> y = feasible_point(state.x, state.gradient, tau);
    detail::renormalize(y);
    Evaluation<Scalar> ev = objective(y);
    ++out.evaluations;
    if (ev.energy <= ref - params.rho1 * tau * r2) {
      const double q = params.eta * state.weight + 1.0;
      state.reference = (params.eta * state.weight * state.reference + ev.energy) / q;
      state.weight = q;
      out.x = std::move(y);
      out.eval = std::move(ev);
      out.tau = tau;
      out.backtracks = m;
      return out;
    }
  }
  throw StepFailure("line search failed after " + std::to_string(params.max_backtracks) +
                        " backtracks (||R|| = " + std::to_string(std::sqrt(r2)) + ")",
                    std::sqrt(r2));
}

/// Algorithm 1 without the exception: a line-search failure is reported
/// through `step_failed` and the last accepted iterate is kept.
template <typename Objective, typename Scalar>
GradResult<Scalar> gradient_run(const Objective& objective, Eigen::VectorX<Scalar> x0,
                                const GradParams& params,
                                const std::function<void(const GradTrace&)>& trace = {}) {
  params.validate();
  OptimState<Scalar> s;
  s.x = std::move(x0);
  detail::renormalize(s.x);
  Evaluation<Scalar> ev = objective(s.x);
  GradResult<Scalar> out;
  out.evaluations = 1;
  s.energy = ev.energy;
  s.gradient = std::move(ev.gradient);
  {
    auto mr = multiplier_and_residual(s.x, s.gradient);
    s.theta = mr.theta;
    s.residual = std::move(mr.residual);
  }
  s.reference = s.energy;
  s.weight = 1.0;
  out.best_x = s.x;
  out.best_energy = s.energy;

  while (true) {
    const double rnorm = s.residual.norm();
    if (rnorm == 0.0 || (params.residual_tol > 0.0 && rnorm <= params.residual_tol)) {
      out.converged = true;
      break;
    }
    if (s.k >= params.max_iter) break;

    double tau0;
    if (s.k == 0) {
      tau0 = std::min(1e-2, 1.0 / (s.gradient.norm() + 1.0));
    } else {
      tau0 = bb_step(s.x - s.prev_x, s.residual - s.prev_residual, s.k % 2 == 1 ? 2 : 1,
                     params.tau_min, params.tau_max);
    }
    SearchOutcome<Scalar> step;
    try {
      step = nonmonotone_search(objective, s, tau0, params);
    } catch (const StepFailure& e) {
      out.evaluations += params.max_backtracks + 1;
      out.step_failed = true;
      out.failure = e.what();
      break;
    }
    out.evaluations += step.evaluations;
    out.backtracks.push_back(step.backtracks);

    const double change = (step.x - s.x).cwiseAbs().maxCoeff();
    s.prev_x = std::move(s.x);
    s.prev_residual = std::move(s.residual);
    s.x = std::move(step.x);
    s.energy = step.eval.energy;
    s.gradient = std::move(step.eval.gradient);
    auto mr = multiplier_and_residual(s.x, s.gradient);
    s.theta = mr.theta;
    s.residual = std::move(mr.residual);
    s.tau = step.tau;
    ++s.k;
    if (s.energy < out.best_energy) {
      out.best_energy = s.energy;
      out.best_x = s.x;
    }
    if (trace) {
      trace({s.k, s.energy, s.reference, s.residual.norm(), s.tau, step.backtracks});
    }
    if (change / s.tau <= params.eps0) {
      out.converged = true;
      break;
    }
  }
  out.x = std::move(s.x);
  out.gradient = std::move(s.gradient);
  out.energy = s.energy;
  out.theta = s.theta;
  out.residual = s.residual.norm();
  out.iterations = s.k;
  return out;
}

/// Feasible gradient method on the unit sphere with alternating BB steps and
/// a nonmonotone line search. Stops when ||X+ - X||_inf / tau <= eps0, when
/// ||R|| <= residual_tol, or after max_iter steps. Throws StepFailure when
/// the line search runs out of backtracks.
template <typename Objective, typename Scalar>
GradResult<Scalar> gradient_descent(const Objective& objective, Eigen::VectorX<Scalar> x0,
                                    const GradParams& params,
                                    const std::function<void(const GradTrace&)>& trace = {}) {
  GradResult<Scalar> out = gradient_run(objective, std::move(x0), params, trace);
  if (out.step_failed) throw StepFailure(out.failure, out.residual);
  return out;
}

}  // namespace gpe
