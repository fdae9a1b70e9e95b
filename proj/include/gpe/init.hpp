#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpe/problem.hpp"

namespace gpe {

enum class InitKind {
  ThomasFermi,
  GaussianA,
  VortexB,
  VortexBbar,
  MixC,
  MixCbar,
  OmegaMixD,
  OmegaMixDbar,
  ExcitedX,
  ExcitedY,
  ExcitedXY,
  FromFile
};

/// Config names: tf a b bbar c cbar d dbar x y xy file.
InitKind parse_init_kind(const std::string& name);
const char* to_string(InitKind kind);
bool is_vortex(InitKind kind);

/// mu^TF = 1/2 (3 beta gamma_x / 2)^{2/3}, (beta gamma_x gamma_y / pi)^{1/2},
/// 1/2 (15 beta gamma_x gamma_y gamma_z / (4 pi))^{2/5} in 1, 2, 3 dimensions.
double thomas_fermi_mu(int dim, double beta, const std::array<double, 3>& gamma);

/// sqrt(max(mu^TF - V, 0) / beta) at the nodes, as a unit vector in the
/// unified scaling. Throws ConfigError for beta <= 0.
Eigen::VectorXd thomas_fermi(const DiscreteProblem& p);

/// Closed-form initial data sampled at the nodes and renormalized.
/// Conjugated kinds apply complex conjugation.
Eigen::VectorXcd ansatz(InitKind kind, const DiscreteProblem& p);

/// Initial state of the problem's field kind. `path` is used by FromFile.
template <typename Scalar>
Eigen::VectorX<Scalar> initial_state(InitKind kind, const DiscreteProblem& p,
                                     const std::string& path = {});

/// sqrt(sum_j h x_axis^2 |phi_j|^2) for a unit vector X.
template <typename Scalar>
double rms(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x, int axis);

/// |phi_j|^2 in the grid-function scaling.
template <typename Scalar>
Eigen::VectorXd density(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x);

/// Hess F(X)[D, D] - theta ||D||^2.
template <typename Scalar>
double curvature(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x, double theta,
                 const Eigen::VectorX<Scalar>& d);

struct ProbeResult {
  double theta = 0.0;
  double min_curvature = 0.0;  // over unit tangent directions
  std::uint64_t seed = 0;
};

/// Samples `n_dirs` random unit tangent directions (Re(X^* D) = 0) and
/// returns the smallest second-order value.
template <typename Scalar>
ProbeResult second_order_probe(const DiscreteProblem& p, const Eigen::VectorX<Scalar>& x,
                               int n_dirs, std::uint64_t seed = 20240501);

}  // namespace gpe
