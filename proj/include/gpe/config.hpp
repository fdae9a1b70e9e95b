#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "gpe/grid.hpp"
#include "gpe/init.hpp"
#include "gpe/newton.hpp"
#include "gpe/potential.hpp"
#include "gpe/problem.hpp"

namespace gpe {

enum class Method { Gradient, Newton, Cascadic };

/// Flat `key = value` run description; `#` starts a comment. Lists are
/// whitespace separated; a single value is broadcast to every axis.
///
///   domain.dim  domain.lower  domain.upper  domain.bc (auto|dirichlet|periodic)
///   grid.n                      finest interval count(s)
///   problem.flavor (fd|sp|fp)   problem.beta  problem.omega  problem.field (auto|real|complex)
///   potential.kind (harmonic|lattice|stirrer|file)  potential.gamma
///   potential.lattice_amplitude  potential.lattice_period
///   potential.stirrer_height  potential.stirrer_width  potential.stirrer_offset  potential.file
///   init.kind  init.file
///   solver.method (gradient|newton|cascadic)  solver.levels
///   solver.eps0  solver.max_iter  solver.eta  solver.rho1  solver.delta_back
///   solver.tau_min  solver.tau_max  solver.monotone  solver.max_backtracks
///   solver.delta_stop  solver.k_init  solver.k_sub  solver.k_newton
///   newton.eta1  newton.eta2  newton.gamma1  newton.gamma2  newton.delta0
///   probe.directions  seed
///   compare.kinds               init kinds for compare-init
///   study.n  study.reference_n  convergence-study meshes
struct RunConfig {
  int dim = 1;
  std::array<double, 3> lower{-16.0, -16.0, -16.0};
  std::array<double, 3> upper{16.0, 16.0, 16.0};
  std::string bc = "auto";
  std::array<int, 3> n{256, 256, 256};

  Flavor flavor = Flavor::SP;
  double beta = 0.0;
  double omega = 0.0;
  std::string field = "auto";

  std::string potential_kind = "harmonic";
  std::array<double, 3> gamma{1.0, 1.0, 1.0};
  double lattice_amplitude = 0.0;
  double lattice_period = 4.0;
  double stirrer_height = 0.0;
  double stirrer_width = 1.0;
  double stirrer_offset = 0.0;
  std::string potential_file;

  InitKind init = InitKind::ThomasFermi;
  std::string init_file;

  Method method = Method::Gradient;
  int levels = 1;
  NewtonParams params;  // params.grad holds the gradient-method settings

  int probe_directions = 20;
  std::uint64_t seed = 20240501;

  std::vector<InitKind> compare_kinds;
  std::vector<int> study_n;
  int study_reference_n = 0;

  /// Throws ConfigError naming the offending key.
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::string& path);
  /// Every effective setting, in a form `parse` accepts.
  std::string echo() const;

  Boundary boundary() const;
  FieldKind field_kind() const;
  Domain domain() const;
  /// Grid with `n` intervals per axis scaled down by 2^coarsen.
  Grid grid(int coarsen = 0) const;
  Potential potential(const Grid& g) const;
  DiscreteProblem problem(const Grid& g) const;
  DiscreteProblem problem(const Grid& g, Flavor f) const;
};

const char* to_string(Method m);

}  // namespace gpe
