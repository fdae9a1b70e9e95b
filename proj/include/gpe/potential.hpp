#pragma once

#include <array>

#include <Eigen/Core>

#include "gpe/grid.hpp"

namespace gpe {

/// Dimensionless trapping potentials.
///
///   Harmonic:             1/2 sum_d gamma_d^2 x_d^2
///   HarmonicPlusLattice:  harmonic + A sum_d sin^2(pi x_d / L)
///   GaussianStirrer:      harmonic + w0 exp(-delta ((x - r0)^2 + y^2))
///   Custom:               node samples supplied by the caller
struct Potential {
  enum class Kind { Harmonic, HarmonicPlusLattice, GaussianStirrer, Custom };

  Kind kind = Kind::Harmonic;
  std::array<double, 3> gamma{1.0, 1.0, 1.0};
  double lattice_amplitude = 0.0;
  double lattice_period = 4.0;
  double stirrer_height = 0.0;
  double stirrer_width = 1.0;
  double stirrer_offset = 0.0;
  Eigen::VectorXd samples;  // Custom only, laid out like the grid's unknowns

  static Potential harmonic(std::array<double, 3> gamma = {1.0, 1.0, 1.0});
  static Potential lattice(double amplitude, double period,
                           std::array<double, 3> gamma = {1.0, 1.0, 1.0});
  static Potential stirrer(double height, double width, double offset,
                           std::array<double, 3> gamma = {1.0, 1.0, 1.0});
  static Potential custom(Eigen::VectorXd samples);

  /// Point evaluation; not available for Custom.
  double operator()(const std::array<double, 3>& x, int dim) const;
};

/// v_j = V(x_j) at every stored node of `g`.
Eigen::VectorXd sample_potential(const Potential& p, const Grid& g);

}  // namespace gpe
