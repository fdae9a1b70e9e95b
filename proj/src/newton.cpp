#include "gpe/newton.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "gpe/errors.hpp"
#include "gpe/transforms.hpp"

namespace gpe {

void NewtonParams::validate() const {
  if (!(0.0 < eta1 && eta1 <= eta2 && eta2 < 1.0)) {
    throw ConfigError("newton.eta1/eta2 must satisfy 0 < eta1 <= eta2 < 1");
  }
  if (!(1.0 < gamma1 && gamma1 <= gamma2)) {
    throw ConfigError("newton.gamma1/gamma2 must satisfy 1 < gamma1 <= gamma2");
  }
  if (!(delta_stop > 0.0)) throw ConfigError("solver.delta_stop must be positive");
  if (k_init < 0 || k_sub < 1 || k_newton < 0) {
    throw ConfigError("solver.k_init/k_sub/k_newton must be nonnegative (k_sub >= 1)");
  }
  grad.validate();
}

template <typename Scalar>
Evaluation<Scalar> NewtonModel<Scalar>::operator()(const Eigen::VectorX<Scalar>& x) const {
  const double alpha = problem->alpha();
  Evaluation<Scalar> out;
  problem->apply_hamiltonian(x, out.gradient);
  const Eigen::VectorX<Scalar> d = x - anchor;
  const Eigen::ArrayXd rho = anchor.cwiseAbs2().array();
  const Eigen::ArrayXd c = (anchor.conjugate().array() * d.array()).real();
  const double quartic =
      (4.0 * alpha * rho * c + 2.0 * alpha * (rho * d.cwiseAbs2().array() + 2.0 * c.square()))
          .sum();
  out.energy = real_dot(x, out.gradient) + quartic + 0.5 * delta * d.squaredNorm();
  out.gradient = 2.0 * out.gradient.array() + x.array() * (4.0 * alpha * rho) +
                 anchor.array() * (8.0 * alpha * c) + delta * d.array();
  return out;
}

template <typename Scalar>
double model_value(const NewtonModel<Scalar>& m, const Eigen::VectorX<Scalar>& x) {
  return m(x).energy;
}

template <typename Scalar>
Eigen::VectorX<Scalar> model_gradient(const NewtonModel<Scalar>& m,
                                      const Eigen::VectorX<Scalar>& x) {
  return m(x).gradient;
}

template <typename Scalar>
SubproblemResult<Scalar> solve_subproblem(const NewtonModel<Scalar>& m,
                                          const Eigen::VectorX<Scalar>& start,
                                          const NewtonParams& params, double gradient_norm) {
  const Evaluation<Scalar> w0 = m(start);
  const double r0 = multiplier_and_residual(start, w0.gradient).residual.norm();
  GradParams gp = params.grad;
  gp.max_iter = params.k_sub;
  gp.residual_tol = std::max(params.sub_rel_tol * r0, params.sub_abs_tol * gradient_norm);
  if (!(gp.residual_tol > 0.0)) gp.residual_tol = std::numeric_limits<double>::min();

  SubproblemResult<Scalar> out;
  out.model_start = w0.energy;
  GradResult<Scalar> run = gradient_run(m, start, gp);
  out.iterations = run.iterations;
  out.evaluations = run.evaluations;
  if (run.energy <= w0.energy) {
    out.z = std::move(run.x);
    out.model_end = run.energy;
  } else if (run.best_energy <= w0.energy) {
    out.z = std::move(run.best_x);
    out.model_end = run.best_energy;
  } else {
    out.z = start;
    out.model_end = w0.energy;
  }
  return out;
}

double tr_ratio(double f_new, double f_old, double w_new, double w_old) {
  const double dw = w_new - w_old;
  if (std::abs(dw) <= 1e-16 * std::max(1.0, std::abs(w_old))) {
    return -std::numeric_limits<double>::infinity();
  }
  return (f_new - f_old) / dw;
}

bool accept_step(double rho, const NewtonParams& params) { return rho >= params.eta1; }

double update_regularization(double delta, double rho, const NewtonParams& params) {
  if (rho > params.eta2) return std::max(0.5 * delta, params.delta_floor);
  if (rho >= params.eta1) return delta * params.gamma1;
  return delta * params.gamma2;
}

template <typename Scalar>
NewtonResult<Scalar> newton_solve(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x0,
                                  const NewtonParams& params, int level,
                                  const std::function<void(const NewtonTrace&)>& trace) {
  params.validate();
  NewtonResult<Scalar> out;
  const EnergyObjective<Scalar> objective{&p};

  GradParams warm = params.grad;
  warm.max_iter = params.k_init;
  GradResult<Scalar> start = gradient_descent(objective, x0, warm);
  out.warm_iterations = start.iterations;
  out.evaluations = start.evaluations;

  Eigen::VectorX<Scalar> x = std::move(start.x);
  Evaluation<Scalar> ev{start.energy, std::move(start.gradient)};
  double delta = params.delta0 > 0.0 ? params.delta0 : std::max(1.0, ev.gradient.norm());
  out.accepted_energies.push_back(ev.energy);

  for (int k = 0; k < params.k_newton; ++k) {
    const NewtonModel<Scalar> model{&p, x, delta};
    SubproblemResult<Scalar> sub = solve_subproblem(model, x, params, ev.gradient.norm());
    out.sub_iterations += sub.iterations;
    out.evaluations += sub.evaluations;

    Evaluation<Scalar> trial = evaluate(p, sub.z);
    ++out.evaluations;
    const double rho = tr_ratio(trial.energy, ev.energy, sub.model_end, sub.model_start);
    const double step = (sub.z - x).cwiseAbs().maxCoeff();
    ++out.iterations;

    NewtonTrace rec;
    rec.level = level;
    rec.k = out.iterations;
    rec.rho = rho;
    rec.delta = delta;
    rec.step = step;
    rec.sub_iterations = sub.iterations;

    bool done = false;
    if (std::isinf(rho) &&
        std::abs(trial.energy - ev.energy) <= 1e-15 * std::max(1.0, std::abs(ev.energy))) {
      // neither the model nor F can move any further
      done = true;
    }
    rec.accepted = accept_step(rho, params);
    if (rec.accepted) {
      x = std::move(sub.z);
      ev = std::move(trial);
      out.accepted_energies.push_back(ev.energy);
      if (step <= params.delta_stop) done = true;
    } else {
      ++out.rejected;
    }
    delta = update_regularization(delta, rho, params);
    rec.delta_next = delta;
    rec.energy = ev.energy;
    rec.residual = multiplier_and_residual(x, ev.gradient).residual.norm();
    out.trace.push_back(rec);
    if (trace) trace(rec);
    if (done) {
      out.converged = true;
      break;
    }
  }

  auto mr = multiplier_and_residual(x, ev.gradient);
  out.theta = mr.theta;
  out.residual = mr.residual.norm();
  out.x = std::move(x);
  out.gradient = std::move(ev.gradient);
  out.energy = ev.energy;
  return out;
}

namespace {

// Tensor with axis 0 fastest; `shape` holds the stored points per axis.
template <typename Scalar>
struct Field {
  std::vector<Scalar> data;
  Shape shape;
};

template <typename Scalar>
std::ptrdiff_t at(const Shape& s, int i0, int i1, int i2) {
  return i0 + static_cast<std::ptrdiff_t>(s[0]) * (i1 + static_cast<std::ptrdiff_t>(s[1]) * i2);
}

// Copies `in` into a tensor whose `axis` has length `n_out`, mapping source
// line index i to destination `map(i)` (entries not hit stay zero).
template <typename Scalar, typename Map>
Field<Scalar> scatter_axis(const Field<Scalar>& in, int axis, int n_out, Map map) {
  Field<Scalar> out;
  out.shape = in.shape;
  out.shape[axis] = n_out;
  out.data.assign(static_cast<size_t>(out.shape[0]) * out.shape[1] * out.shape[2], Scalar(0));
  for (int k = 0; k < in.shape[2]; ++k) {
    for (int j = 0; j < in.shape[1]; ++j) {
      for (int i = 0; i < in.shape[0]; ++i) {
        std::array<int, 3> idx{i, j, k};
        const Scalar v = in.data[at<Scalar>(in.shape, i, j, k)];
        idx[axis] = map(idx[axis]);
        out.data[at<Scalar>(out.shape, idx[0], idx[1], idx[2])] += v;
      }
    }
  }
  return out;
}

// Linear interpolation along one axis. Dirichlet: n-1 interior points become
// 2n-1; periodic: n points become 2n.
template <typename Scalar>
Field<Scalar> linear_axis(const Field<Scalar>& in, int axis, bool periodic) {
  const int n_in = in.shape[axis];
  const int n_out = periodic ? 2 * n_in : 2 * n_in + 1;
  Field<Scalar> out = scatter_axis(in, axis, n_out, [&](int i) { return periodic ? 2 * i : 2 * i + 1; });
  std::array<int, 3> s = out.shape;
  for (int k = 0; k < s[2]; ++k) {
    for (int j = 0; j < s[1]; ++j) {
      for (int i = 0; i < s[0]; ++i) {
        std::array<int, 3> idx{i, j, k};
        const int m = idx[axis];
        const bool fresh = periodic ? (m % 2 == 1) : (m % 2 == 0);
        if (!fresh) continue;
        auto neighbor = [&](int mm) -> Scalar {
          if (periodic) mm = (mm + n_out) % n_out;
          if (mm < 0 || mm >= n_out) return Scalar(0);
          std::array<int, 3> q = idx;
          q[axis] = mm;
          return out.data[at<Scalar>(s, q[0], q[1], q[2])];
        };
        out.data[at<Scalar>(s, i, j, k)] = 0.5 * (neighbor(m - 1) + neighbor(m + 1));
      }
    }
  }
  return out;
}

template <typename Scalar>
Field<Scalar> sine_pad_axis(Field<Scalar> in, int axis) {
  const int n = in.shape[axis] + 1;  // coarse intervals
  detail::sine_axis(in.data.data(), in.shape, axis);
  for (auto& v : in.data) v /= static_cast<double>(n);
  Field<Scalar> out = scatter_axis(in, axis, 2 * n - 1, [](int l) { return l; });
  detail::sine_axis(out.data.data(), out.shape, axis);
  for (auto& v : out.data) v *= 0.5;
  return out;
}

Field<std::complex<double>> fourier_pad_axis(Field<std::complex<double>> in, int axis) {
  const int n = in.shape[axis];
  detail::fourier_axis(in.data.data(), in.shape, axis, -1);
  for (auto& v : in.data) v /= static_cast<double>(n);
  // Nyquist mode -n/2 of the coarse grid goes half to -n/2 and half to +n/2.
  Field<std::complex<double>> out = scatter_axis(in, axis, 2 * n, [n](int k) {
    const int p = fourier_mode(k, n);
    return p >= 0 ? p : 2 * n + p;
  });
  for (int k = 0; k < out.shape[2]; ++k) {
    for (int j = 0; j < out.shape[1]; ++j) {
      for (int i = 0; i < out.shape[0]; ++i) {
        std::array<int, 3> idx{i, j, k};
        if (idx[axis] != 2 * n - n / 2) continue;
        auto& lo = out.data[at<std::complex<double>>(out.shape, i, j, k)];
        idx[axis] = n / 2;
        auto& hi = out.data[at<std::complex<double>>(out.shape, idx[0], idx[1], idx[2])];
        lo *= 0.5;
        hi = lo;
      }
    }
  }
  detail::fourier_axis(out.data.data(), out.shape, axis, +1);
  return out;
}

template <typename Scalar>
Field<std::complex<double>> to_complex(const Field<Scalar>& f) {
  Field<std::complex<double>> out{{f.data.begin(), f.data.end()}, f.shape};
  return out;
}

}  // namespace

template <typename Scalar>
Eigen::VectorX<Scalar> prolong(const Eigen::VectorX<Scalar>& x, Flavor flavor,
                               const Grid& coarse, const Grid& fine) {
  if (!(fine == refine_grid(coarse))) {
    throw ConfigError("prolong: fine grid is not the uniform refinement of the coarse grid");
  }
  if (x.size() != coarse.size()) {
    throw ConfigError("prolong: state has " + std::to_string(x.size()) +
                      " entries, coarse grid has " + std::to_string(coarse.size()));
  }
  const bool periodic = coarse.bc() == Boundary::Periodic;
  Eigen::VectorX<Scalar> y;
  if (flavor == Flavor::FP) {
    Field<std::complex<double>> f{{x.data(), x.data() + x.size()}, coarse.shape()};
    for (int d = 0; d < coarse.dim(); ++d) f = fourier_pad_axis(std::move(f), d);
    y.resize(fine.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if constexpr (std::is_same_v<Scalar, double>) {
        y[i] = f.data[i].real();
      } else {
        y[i] = f.data[i];
      }
    }
  } else {
    Field<Scalar> f{{x.data(), x.data() + x.size()}, coarse.shape()};
    for (int d = 0; d < coarse.dim(); ++d) {
      f = flavor == Flavor::SP ? sine_pad_axis(std::move(f), d) : linear_axis(f, d, periodic);
    }
    y = Eigen::Map<const Eigen::VectorX<Scalar>>(f.data.data(), fine.size());
  }
  const double norm = y.norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) throw NumericalError("prolong: zero or non-finite state");
  return y / norm;
}

template <typename Scalar>
CascadicResult<Scalar> cascadic_solve(const ProblemBuilder& build, const Grid& g0, int levels,
                                      const Eigen::VectorX<Scalar>& x0,
                                      const NewtonParams& params,
                                      const std::function<void(const NewtonTrace&)>& trace) {
  if (levels < 1) throw ConfigError("solver.levels must be at least 1");
  CascadicResult<Scalar> out;
  Grid g = g0;
  Eigen::VectorX<Scalar> x = x0;
  for (int l = 0; l < levels; ++l) {
    if (l > 0) {
      Grid fine = refine_grid(g);
      const DiscreteProblem coarse_problem = build(g);
      x = prolong(x, coarse_problem.flavor(), g, fine);
      g = fine;
    }
    const DiscreteProblem p = build(g);
    out.grids.push_back(g);
    out.levels.push_back(newton_solve(p, x, params, l, trace));
    x = out.levels.back().x;
  }
  return out;
}

#define GPE_INSTANTIATE(S)                                                                     \
  template struct NewtonModel<S>;                                                              \
  template double model_value(const NewtonModel<S>&, const Eigen::VectorX<S>&);                \
  template Eigen::VectorX<S> model_gradient(const NewtonModel<S>&, const Eigen::VectorX<S>&);  \
  template SubproblemResult<S> solve_subproblem(const NewtonModel<S>&,                         \
                                                const Eigen::VectorX<S>&, const NewtonParams&, \
                                                double);                                       \
  template NewtonResult<S> newton_solve(const DiscreteProblem&, const Eigen::VectorX<S>&,      \
                                        const NewtonParams&, int,                              \
                                        const std::function<void(const NewtonTrace&)>&);       \
  template Eigen::VectorX<S> prolong(const Eigen::VectorX<S>&, Flavor, const Grid&,            \
                                     const Grid&);                                             \
  template CascadicResult<S> cascadic_solve(const ProblemBuilder&, const Grid&, int,           \
                                            const Eigen::VectorX<S>&, const NewtonParams&,     \
                                            const std::function<void(const NewtonTrace&)>&);

GPE_INSTANTIATE(double)
GPE_INSTANTIATE(std::complex<double>)

}  // namespace gpe
