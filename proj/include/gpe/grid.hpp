#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

namespace gpe {

enum class Boundary { Dirichlet, Periodic };

/// Box-shaped computational domain in 1, 2 or 3 dimensions.
struct Domain {
  int dim = 1;
  std::array<double, 3> lower{0.0, 0.0, 0.0};
  std::array<double, 3> upper{1.0, 1.0, 1.0};
  Boundary bc = Boundary::Dirichlet;

  double extent(int axis) const { return upper[axis] - lower[axis]; }
};

/// Uniform tensor-product grid.
///
/// `intervals[d]` is the number of mesh intervals N_d along axis d. A
/// Dirichlet grid stores only the N_d - 1 interior nodes x_j = a + j h,
/// j = 1..N_d-1 (boundary values are zero). A periodic grid stores the N_d
/// distinct nodes j = 0..N_d-1; node N_d is identified with node 0.
///
/// Unknowns are laid out with axis 0 varying fastest.
class Grid {
 public:
  Grid() = default;
  /// Throws ConfigError on a malformed domain or counts below 2.
  Grid(const Domain& domain, const std::array<int, 3>& intervals);

  const Domain& domain() const { return domain_; }
  int dim() const { return domain_.dim; }
  Boundary bc() const { return domain_.bc; }
  int intervals(int axis) const { return intervals_[axis]; }
  const std::array<int, 3>& intervals() const { return intervals_; }
  double spacing(int axis) const { return h_[axis]; }
  double cell_volume() const { return cell_volume_; }

  /// Unknowns along one axis (N-1 Dirichlet, N periodic); 1 for unused axes.
  int points(int axis) const { return points_[axis]; }
  const std::array<int, 3>& shape() const { return points_; }
  std::ptrdiff_t size() const { return size_; }

  /// Coordinate of stored node `i` (0-based storage index) along `axis`.
  double coordinate(int axis, int i) const {
    const int j = domain_.bc == Boundary::Dirichlet ? i + 1 : i;
    return domain_.lower[axis] + j * h_[axis];
  }

  std::ptrdiff_t index(int i0, int i1 = 0, int i2 = 0) const {
    return i0 + static_cast<std::ptrdiff_t>(points_[0]) *
                    (i1 + static_cast<std::ptrdiff_t>(points_[1]) * i2);
  }

  bool operator==(const Grid& other) const;

 private:
  Domain domain_;
  std::array<int, 3> intervals_{1, 1, 1};
  std::array<int, 3> points_{1, 1, 1};
  std::array<double, 3> h_{1.0, 1.0, 1.0};
  double cell_volume_ = 1.0;
  std::ptrdiff_t size_ = 0;
};

/// Validates and builds a grid. With `spectral` set, every count must be even.
Grid build_grid(const Domain& domain, const std::array<int, 3>& intervals,
                bool spectral = false);

/// Uniform refinement: every interval count doubles, domain unchanged.
Grid refine_grid(const Grid& g);

/// Stored node coordinates per axis (interior only for Dirichlet grids).
std::vector<Eigen::VectorXd> node_coordinates(const Grid& g);

}  // namespace gpe
