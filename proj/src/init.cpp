#include "gpe/init.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <random>

#include "gpe/errors.hpp"
#include "gpe/grid_io.hpp"

namespace gpe {

namespace {

struct KindName {
  InitKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {InitKind::ThomasFermi, "tf"},  {InitKind::GaussianA, "a"},     {InitKind::VortexB, "b"},
    {InitKind::VortexBbar, "bbar"}, {InitKind::MixC, "c"},          {InitKind::MixCbar, "cbar"},
    {InitKind::OmegaMixD, "d"},     {InitKind::OmegaMixDbar, "dbar"}, {InitKind::ExcitedX, "x"},
    {InitKind::ExcitedY, "y"},      {InitKind::ExcitedXY, "xy"},    {InitKind::FromFile, "file"},
};

template <typename F>
Eigen::VectorXcd sample(const DiscreteProblem& p, F f) {
  const Grid& g = p.grid();
  const auto& n = g.shape();
  Eigen::VectorXcd out(g.size());
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        std::array<double, 3> x{g.coordinate(0, i), 0.0, 0.0};
        if (g.dim() > 1) x[1] = g.coordinate(1, j);
        if (g.dim() > 2) x[2] = g.coordinate(2, k);
        out[g.index(i, j, k)] = f(x);
      }
    }
  }
  return out;
}

template <typename Derived>
auto normalized(const Eigen::MatrixBase<Derived>& v) {
  const double n = v.norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw NumericalError("initial state vanishes on the grid; enlarge the domain or refine");
  }
  return (v / n).eval();
}

}  // namespace

InitKind parse_init_kind(const std::string& name) {
  for (const auto& kn : kKindNames) {
    if (name == kn.name) return kn.kind;
  }
  throw ConfigError("init.kind: unknown value '" + name +
                    "' (expected tf, a, b, bbar, c, cbar, d, dbar, x, y, xy or file)");
}

const char* to_string(InitKind kind) {
  for (const auto& kn : kKindNames) {
    if (kind == kn.kind) return kn.name;
  }
  return "?";
}

bool is_vortex(InitKind kind) {
  switch (kind) {
    case InitKind::VortexB:
    case InitKind::VortexBbar:
    case InitKind::MixC:
    case InitKind::MixCbar:
    case InitKind::OmegaMixD:
    case InitKind::OmegaMixDbar:
      return true;
    default:
      return false;
  }
}

double thomas_fermi_mu(int dim, double beta, const std::array<double, 3>& gamma) {
  using std::numbers::pi;
  switch (dim) {
    case 1:
      return 0.5 * std::pow(1.5 * beta * gamma[0], 2.0 / 3.0);
    case 2:
      return std::sqrt(beta * gamma[0] * gamma[1] / pi);
    case 3:
      return 0.5 * std::pow(15.0 * beta * gamma[0] * gamma[1] * gamma[2] / (4.0 * pi), 0.4);
    default:
      throw ConfigError("domain.dim must be 1, 2 or 3");
  }
}

Eigen::VectorXd thomas_fermi(const DiscreteProblem& p) {
  if (!(p.beta() > 0.0)) {
    throw ConfigError("init.kind = tf needs beta > 0; use init.kind = a for beta <= 0");
  }
  const double mu = thomas_fermi_mu(p.grid().dim(), p.beta(), p.potential().gamma);
  const Eigen::ArrayXd v = p.potential_samples().array();
  const Eigen::VectorXd phi = ((mu - v).max(0.0) / p.beta()).sqrt().matrix();
  return normalized(phi);
}

Eigen::VectorXcd ansatz(InitKind kind, const DiscreteProblem& p) {
  using cd = std::complex<double>;
  const int dim = p.grid().dim();
  if (is_vortex(kind) && dim < 2) {
    throw ConfigError(std::string("init.kind = ") + to_string(kind) + " needs dim >= 2");
  }
  if ((kind == InitKind::ExcitedY || kind == InitKind::ExcitedXY) && dim < 2) {
    throw ConfigError(std::string("init.kind = ") + to_string(kind) + " needs dim >= 2");
  }
  const double norm = 1.0 / std::sqrt(std::numbers::pi);
  auto gauss = [](const std::array<double, 3>& x) {
    return std::exp(-0.5 * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
  };
  auto phi_a = [&](const std::array<double, 3>& x) { return cd(norm * gauss(x), 0.0); };
  auto phi_b = [&](const std::array<double, 3>& x) { return cd(x[0], x[1]) * norm * gauss(x); };
  const double omega = p.omega();

  Eigen::VectorXcd out;
  switch (kind) {
    case InitKind::ThomasFermi:
      return thomas_fermi(p).cast<cd>();
    case InitKind::GaussianA:
      out = sample(p, phi_a);
      break;
    case InitKind::VortexB:
    case InitKind::VortexBbar:
      out = sample(p, phi_b);
      break;
    case InitKind::MixC:
    case InitKind::MixCbar:
      out = sample(p, [&](const auto& x) { return 0.5 * (phi_a(x) + phi_b(x)); });
      break;
    case InitKind::OmegaMixD:
    case InitKind::OmegaMixDbar:
      out = sample(p, [&](const auto& x) { return (1.0 - omega) * phi_a(x) + omega * phi_b(x); });
      break;
    case InitKind::ExcitedX:
      out = sample(p, [&](const auto& x) { return cd(std::sqrt(2.0) * x[0] * norm * gauss(x)); });
      break;
    case InitKind::ExcitedY:
      out = sample(p, [&](const auto& x) { return cd(std::sqrt(2.0) * x[1] * norm * gauss(x)); });
      break;
    case InitKind::ExcitedXY:
      out = sample(p, [&](const auto& x) { return cd(2.0 * x[0] * x[1] * norm * gauss(x)); });
      break;
    case InitKind::FromFile:
      throw ConfigError("init.kind = file has no closed form; use initial_state with a path");
  }
  if (kind == InitKind::VortexBbar || kind == InitKind::MixCbar ||
      kind == InitKind::OmegaMixDbar) {
    out = out.conjugate().eval();
  }
  return normalized(out);
}

template <typename Scalar>
Eigen::VectorX<Scalar> initial_state(InitKind kind, const DiscreteProblem& p,
                                     const std::string& path) {
  if (kind == InitKind::FromFile) {
    if (path.empty()) throw ConfigError("init.kind = file needs init.file");
    return read_state<Scalar>(path, p);
  }
  if constexpr (std::is_same_v<Scalar, double>) {
    if (is_vortex(kind)) {
      throw ConfigError(std::string("init.kind = ") + to_string(kind) +
                        " is complex-valued; set problem.field = complex");
    }
    if (kind == InitKind::ThomasFermi) return thomas_fermi(p);
    return ansatz(kind, p).real();
  } else {
    return ansatz(kind, p);
  }
}

template <typename Scalar>
double rms(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x, int axis) {
  const Grid& g = p.grid();
  if (axis < 0 || axis >= g.dim()) {
    throw ConfigError("rms: axis " + std::to_string(axis) + " outside a " +
                      std::to_string(g.dim()) + "-dimensional grid");
  }
  const auto& n = g.shape();
  double s = 0.0;
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        const std::array<int, 3> idx{i, j, k};
        const double c = g.coordinate(axis, idx[axis]);
        s += c * c * std::norm(x[g.index(i, j, k)]);
      }
    }
  }
  return std::sqrt(s);
}

template <typename Scalar>
Eigen::VectorXd density(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x) {
  return x.cwiseAbs2() / p.grid().cell_volume();
}

template <typename Scalar>
double curvature(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x, double theta,
                 const Eigen::VectorX<Scalar>& d) {
  return hessian_form(p, x, d) - theta * d.squaredNorm();
}

template <typename Scalar>
ProbeResult second_order_probe(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x,
                               int n_dirs, std::uint64_t seed) {
  ProbeResult out;
  out.seed = seed;
  out.theta = real_dot(x, evaluate(p, x).gradient);
  out.min_curvature = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorX<Scalar> d(x.size());
  for (int t = 0; t < n_dirs; ++t) {
    for (Eigen::Index i = 0; i < d.size(); ++i) {
      if constexpr (std::is_same_v<Scalar, double>) {
        d[i] = normal(rng);
      } else {
        const double re = normal(rng);
        d[i] = Scalar(re, normal(rng));
      }
    }
    d -= (real_dot(x, d) / x.squaredNorm()) * x;
    d.normalize();
    out.min_curvature = std::min(out.min_curvature, curvature(p, x, out.theta, d));
  }
  return out;
}

#define GPE_INSTANTIATE(S)                                                                    \
  template Eigen::VectorX<S> initial_state(InitKind, const DiscreteProblem&,                  \
                                           const std::string&);                               \
  template double rms(const DiscreteProblem&, const Eigen::VectorX<S>&, int);                 \
  template Eigen::VectorXd density(const DiscreteProblem&, const Eigen::VectorX<S>&);         \
  template double curvature(const DiscreteProblem&, const Eigen::VectorX<S>&, double,         \
                            const Eigen::VectorX<S>&);                                        \
  template ProbeResult second_order_probe(const DiscreteProblem&, const Eigen::VectorX<S>&,   \
                                          int, std::uint64_t);

GPE_INSTANTIATE(double)
GPE_INSTANTIATE(std::complex<double>)

}  // namespace gpe
