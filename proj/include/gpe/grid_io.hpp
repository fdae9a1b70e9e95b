#pragma once

#include <array>
#include <string>

#include <Eigen/Core>

#include "gpe/grid.hpp"
#include "gpe/problem.hpp"

namespace gpe {

// Grid-data file, little-endian throughout:
//
//   char[8]  "GPEGRID1"
//   uint32   dim
//   uint32   boundary (0 Dirichlet, 1 periodic)
//   uint32   field (0 real, 1 complex)
//   dim x { uint64 intervals, float64 lower, float64 upper }
//   float64  values, row-major over the stored nodes (last axis fastest);
//            complex values as interleaved (re, im)
//
// Values are the grid function phi, not the unit vector X.

struct GridData {
  Domain domain;
  std::array<int, 3> intervals{1, 1, 1};
  FieldKind field = FieldKind::Real;
  Eigen::VectorXcd values;  // grid layout (axis 0 fastest)

  Grid grid() const { return Grid(domain, intervals); }
};

/// Throws IoError on failure.
void write_grid_data(const std::string& path, const Grid& g, const Eigen::VectorXd& phi);
void write_grid_data(const std::string& path, const Grid& g, const Eigen::VectorXcd& phi);
GridData read_grid_data(const std::string& path);

/// Loads a state for `p` and returns it in the unified scaling. The stored
/// grid must match the problem grid; complex data is rejected for a real
/// field unless its imaginary part vanishes.
template <typename Scalar>
Eigen::VectorX<Scalar> read_state(const std::string& path, const DiscreteProblem& p);

}  // namespace gpe
