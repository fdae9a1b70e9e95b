#include "gpe/problem.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <string>

#include "gpe/errors.hpp"
#include "gpe/transforms.hpp"

namespace gpe {

const char* to_string(Flavor f) {
  switch (f) {
    case Flavor::FD: return "fd";
    case Flavor::SP: return "sp";
    case Flavor::FP: return "fp";
  }
  return "?";
}

const char* to_string(FieldKind f) { return f == FieldKind::Real ? "real" : "complex"; }

namespace {

FieldKind default_field(Flavor f) { return f == Flavor::FP ? FieldKind::Complex : FieldKind::Real; }

// data[.., a, ..] *= symbol[a] along `axis`.
template <typename Scalar>
void scale_along(Scalar* data, const Shape& shape, int axis, const Eigen::VectorXd& symbol) {
  std::ptrdiff_t inner = 1;
  for (int d = 0; d < axis; ++d) inner *= shape[d];
  std::ptrdiff_t outer = 1;
  for (int d = axis + 1; d < 3; ++d) outer *= shape[d];
  const int n = shape[axis];
  for (std::ptrdiff_t o = 0; o < outer; ++o) {
    for (int a = 0; a < n; ++a) {
      const double s = symbol[a];
      Scalar* line = data + (o * n + a) * inner;
      for (std::ptrdiff_t i = 0; i < inner; ++i) line[i] *= s;
    }
  }
}

}  // namespace

DiscreteProblem::DiscreteProblem(Grid grid, Flavor flavor, const Potential& potential,
                                 double beta, double omega)
    : DiscreteProblem(std::move(grid), flavor, potential, beta, omega, default_field(flavor)) {}

DiscreteProblem::DiscreteProblem(Grid grid, Flavor flavor, const Potential& potential,
                                 double beta, double omega, FieldKind field)
    : grid_(std::move(grid)),
      flavor_(flavor),
      field_(field),
      potential_(potential),
      beta_(beta),
      omega_(omega) {
  const int dim = grid_.dim();
  if (flavor == Flavor::FP && grid_.bc() != Boundary::Periodic) {
    throw ConfigError("the fp discretization needs a periodic domain");
  }
  if (flavor != Flavor::FP && grid_.bc() != Boundary::Dirichlet) {
    throw ConfigError(std::string("the ") + to_string(flavor) +
                      " discretization needs a dirichlet domain");
  }
  if (flavor != Flavor::FD) {
    for (int d = 0; d < dim; ++d) {
      if (grid_.intervals(d) % 2 != 0) {
        throw ConfigError("spectral discretizations need an even grid count");
      }
    }
  }
  if (!std::isfinite(beta) || !std::isfinite(omega)) {
    throw ConfigError("beta and omega must be finite");
  }
  if (omega != 0.0) {
    if (flavor != Flavor::FP) throw ConfigError("rotation (omega != 0) needs the fp discretization");
    if (dim < 2) throw ConfigError("rotation (omega != 0) needs dim 2 or 3");
    if (field != FieldKind::Complex) throw ConfigError("rotation (omega != 0) needs a complex field");
  }
  if (potential.kind != Potential::Kind::Custom) {
    for (int d = 0; d < dim; ++d) {
      if (!(potential.gamma[d] > 0.0)) throw ConfigError("trap frequencies gamma must be positive");
    }
  }
  v_ = sample_potential(potential, grid_);
  if (!v_.allFinite()) throw ConfigError("potential is not finite at every grid node");

  for (int d = 0; d < dim; ++d) {
    const int n = grid_.intervals(d);
    const double length = grid_.domain().extent(d);
    const int m = grid_.points(d);
    kinetic_symbol_[d].resize(m);
    drift_symbol_[d].setZero(m);
    for (int a = 0; a < m; ++a) {
      if (flavor == Flavor::SP) {
        const double lambda = std::numbers::pi * (a + 1) / length;
        kinetic_symbol_[d][a] = lambda * lambda / (4.0 * n);
      } else if (flavor == Flavor::FP) {
        const int p = fourier_mode(a, n);
        const double lambda = 2.0 * std::numbers::pi * p / length;
        kinetic_symbol_[d][a] = lambda * lambda / (2.0 * n);
        if (p != -n / 2) drift_symbol_[d][a] = lambda / n;
      }
    }
  }
}

template <typename Scalar>
void DiscreteProblem::stencil_part(const Eigen::VectorX<Scalar>& x,
                                   Eigen::VectorX<Scalar>& y) const {
  const auto& shape = grid_.shape();
  std::ptrdiff_t stride = 1;
  for (int d = 0; d < grid_.dim(); ++d) {
    const double h = grid_.spacing(d);
    const double diag = 1.0 / (h * h);
    const double off = -0.5 / (h * h);
    const int n = shape[d];
    std::ptrdiff_t outer = 1;
    for (int e = d + 1; e < 3; ++e) outer *= shape[e];
    for (std::ptrdiff_t o = 0; o < outer; ++o) {
      for (int a = 0; a < n; ++a) {
        const std::ptrdiff_t base = (o * n + a) * stride;
        for (std::ptrdiff_t i = 0; i < stride; ++i) {
          const std::ptrdiff_t k = base + i;
          Scalar acc = diag * x[k];
          if (a > 0) acc += off * x[k - stride];
          if (a + 1 < n) acc += off * x[k + stride];
          y[k] += acc;
        }
      }
    }
    stride *= n;
  }
}

template <typename Scalar>
void DiscreteProblem::sine_part(const Eigen::VectorX<Scalar>& x,
                                Eigen::VectorX<Scalar>& y) const {
  const auto& shape = grid_.shape();
  Eigen::VectorX<Scalar> work(x.size());
  for (int d = 0; d < grid_.dim(); ++d) {
    work = x;
    detail::sine_axis(work.data(), shape, d);
    scale_along(work.data(), shape, d, kinetic_symbol_[d]);
    detail::sine_axis(work.data(), shape, d);
    y += work;
  }
}

void DiscreteProblem::fourier_part(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  const auto& shape = grid_.shape();
  const bool rotating = omega_ != 0.0 && grid_.dim() >= 2;
  Eigen::VectorXcd work(x.size());
  for (int d = 0; d < grid_.dim(); ++d) {
    work = x;
    detail::fourier_axis(work.data(), shape, d, -1);
    if (rotating && d < 2) {
      // axis 0 symbol: lambda^2/2 + Omega y lambda; axis 1: eta^2/2 - Omega x eta
      const Eigen::VectorXd& kin = kinetic_symbol_[d];
      const Eigen::VectorXd& drift = drift_symbol_[d];
      for (int k = 0; k < shape[2]; ++k) {
        for (int j = 0; j < shape[1]; ++j) {
          for (int i = 0; i < shape[0]; ++i) {
            const std::ptrdiff_t idx = grid_.index(i, j, k);
            if (d == 0) {
              work[idx] *= kin[i] + omega_ * grid_.coordinate(1, j) * drift[i];
            } else {
              work[idx] *= kin[j] - omega_ * grid_.coordinate(0, i) * drift[j];
            }
          }
        }
      }
    } else {
      scale_along(work.data(), shape, d, kinetic_symbol_[d]);
    }
    detail::fourier_axis(work.data(), shape, d, +1);
    y += work;
  }
}

void DiscreteProblem::apply_hamiltonian(const Eigen::VectorXd& x, Eigen::VectorXd& y) const {
  if (x.size() != size()) throw ConfigError("state size does not match the grid");
  if (omega_ != 0.0) throw ConfigError("a rotating problem needs a complex state");
  y = v_.cwiseProduct(x);
  switch (flavor_) {
    case Flavor::FD: stencil_part(x, y); break;
    case Flavor::SP: sine_part(x, y); break;
    case Flavor::FP: {
      Eigen::VectorXcd xc = x.cast<std::complex<double>>();
      Eigen::VectorXcd yc = Eigen::VectorXcd::Zero(x.size());
      fourier_part(xc, yc);
      y += yc.real();
      break;
    }
  }
}

void DiscreteProblem::apply_hamiltonian(const Eigen::VectorXcd& x, Eigen::VectorXcd& y) const {
  if (x.size() != size()) throw ConfigError("state size does not match the grid");
  y = x.cwiseProduct(v_.cast<std::complex<double>>());
  switch (flavor_) {
    case Flavor::FD: stencil_part(x, y); break;
    case Flavor::SP: sine_part(x, y); break;
    case Flavor::FP: fourier_part(x, y); break;
  }
}

namespace {

template <typename Scalar>
[[noreturn]] void report_nonfinite(const Eigen::VectorX<Scalar>& x, double f,
                                   const Eigen::VectorX<Scalar>& g) {
  std::ostringstream msg;
  msg.precision(17);
  msg << "non-finite energy or gradient (F = " << f << ")";
  for (Eigen::Index i = 0; i < g.size(); ++i) {
    if (!std::isfinite(std::abs(g[i]))) {
      msg << "; first bad gradient entry " << i << " with X = " << x[i];
      break;
    }
  }
  msg << "; iterate norm " << x.norm() << ", max |X_j| " << x.cwiseAbs().maxCoeff();
  throw NumericalError(msg.str());
}

}  // namespace

template <typename Scalar>
Evaluation<Scalar> evaluate(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x) {
  Evaluation<Scalar> out;
  p.apply_hamiltonian(x, out.gradient);
  const Eigen::ArrayXd density = x.cwiseAbs2().array();
  const double alpha = p.alpha();
  out.energy = real_dot(x, out.gradient) + alpha * density.square().sum();
  out.gradient = 2.0 * out.gradient.array() + x.array() * (4.0 * alpha * density);
  if (!std::isfinite(out.energy) || !out.gradient.allFinite()) {
    report_nonfinite(x, out.energy, out.gradient);
  }
  return out;
}

template <typename Scalar>
double energy(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x) {
  Eigen::VectorX<Scalar> hx;
  p.apply_hamiltonian(x, hx);
  return real_dot(x, hx) + p.alpha() * x.cwiseAbs2().array().square().sum();
}

template <typename Scalar>
double hessian_form(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x,
                    const Eigen::VectorX<Scalar>& d) {
  Eigen::VectorX<Scalar> hd;
  p.apply_hamiltonian(d, hd);
  double quartic = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double cross = std::real(std::conj(x[j]) * d[j]);
    quartic += std::norm(x[j]) * std::norm(d[j]) + 2.0 * cross * cross;
  }
  return 2.0 * real_dot(d, hd) + 4.0 * p.alpha() * quartic;
}

template <typename Scalar>
double chemical_potential(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x) {
  return energy(p, x) + p.alpha() * x.cwiseAbs2().array().square().sum();
}

template <typename Scalar>
Eigen::VectorX<Scalar> to_unified(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& phi) {
  const double cv = p.grid().cell_volume();
  const double mass = cv * phi.squaredNorm();
  if (std::abs(mass - 1.0) > 1e-10) {
    throw ConfigError("grid function is not normalized (h-weighted norm^2 = " +
                      std::to_string(mass) + ")");
  }
  return std::sqrt(cv) * phi;
}

template <typename Scalar>
Eigen::VectorX<Scalar> from_unified(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x) {
  return x / std::sqrt(p.grid().cell_volume());
}

template <typename Scalar>
double grid_energy(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& phi) {
  Eigen::VectorX<Scalar> hphi;
  p.apply_hamiltonian(phi, hphi);
  const double quartic = phi.cwiseAbs2().array().square().sum();
  return p.grid().cell_volume() * (real_dot(phi, hphi) + 0.5 * p.beta() * quartic);
}

template <typename Scalar>
Eigen::VectorX<Scalar> grid_gradient(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& phi) {
  Eigen::VectorX<Scalar> hphi;
  p.apply_hamiltonian(phi, hphi);
  const Eigen::ArrayXd density = phi.cwiseAbs2().array();
  return 2.0 * p.grid().cell_volume() * (hphi.array() + phi.array() * (p.beta() * density)).matrix();
}

namespace {
void require(const DiscreteProblem& p, Flavor f) {
  if (p.flavor() != f) {
    throw ConfigError(std::string("expected a ") + to_string(f) + " problem, got " +
                      to_string(p.flavor()));
  }
}
}  // namespace

double fd_energy(const DiscreteProblem& p, const Eigen::VectorXd& phi) {
  require(p, Flavor::FD);
  return grid_energy(p, phi);
}
Eigen::VectorXd fd_gradient(const DiscreteProblem& p, const Eigen::VectorXd& phi) {
  require(p, Flavor::FD);
  return grid_gradient(p, phi);
}
double sp_energy(const DiscreteProblem& p, const Eigen::VectorXd& phi) {
  require(p, Flavor::SP);
  return grid_energy(p, phi);
}
Eigen::VectorXd sp_gradient(const DiscreteProblem& p, const Eigen::VectorXd& phi) {
  require(p, Flavor::SP);
  return grid_gradient(p, phi);
}
double fp_energy(const DiscreteProblem& p, const Eigen::VectorXcd& phi) {
  require(p, Flavor::FP);
  return grid_energy(p, phi);
}
Eigen::VectorXcd fp_gradient(const DiscreteProblem& p, const Eigen::VectorXcd& phi) {
  require(p, Flavor::FP);
  return grid_gradient(p, phi);
}

#define GPE_INSTANTIATE(S)                                                                   \
  template Evaluation<S> evaluate(const DiscreteProblem&, const Eigen::VectorX<S>&);         \
  template double energy(const DiscreteProblem&, const Eigen::VectorX<S>&);                  \
  template double hessian_form(const DiscreteProblem&, const Eigen::VectorX<S>&,             \
                               const Eigen::VectorX<S>&);                                    \
  template double chemical_potential(const DiscreteProblem&, const Eigen::VectorX<S>&);      \
  template Eigen::VectorX<S> to_unified(const DiscreteProblem&, const Eigen::VectorX<S>&);   \
  template Eigen::VectorX<S> from_unified(const DiscreteProblem&, const Eigen::VectorX<S>&); \
  template double grid_energy(const DiscreteProblem&, const Eigen::VectorX<S>&);             \
  template Eigen::VectorX<S> grid_gradient(const DiscreteProblem&, const Eigen::VectorX<S>&);

GPE_INSTANTIATE(double)
GPE_INSTANTIATE(std::complex<double>)
#undef GPE_INSTANTIATE

}  // namespace gpe
