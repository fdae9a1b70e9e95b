#include "gpe/grid.hpp"

#include <cmath>
#include <string>

#include "gpe/errors.hpp"

namespace gpe {

Grid::Grid(const Domain& domain, const std::array<int, 3>& intervals)
    : domain_(domain) {
  if (domain.dim < 1 || domain.dim > 3) {
    throw ConfigError("domain.dim must be 1, 2 or 3 (got " +
                      std::to_string(domain.dim) + ")");
  }
  cell_volume_ = 1.0;
  size_ = 1;
  for (int d = 0; d < 3; ++d) {
    if (d >= domain.dim) {
      intervals_[d] = 1;
      points_[d] = 1;
      h_[d] = 1.0;
      continue;
    }
    if (!(domain.upper[d] > domain.lower[d]) || !std::isfinite(domain.extent(d))) {
      throw ConfigError("domain bounds along axis " + std::to_string(d) +
                        " must satisfy a < b");
    }
    if (intervals[d] < 2) {
      throw ConfigError("grid count along axis " + std::to_string(d) +
                        " must be >= 2");
    }
    intervals_[d] = intervals[d];
    h_[d] = domain.extent(d) / intervals[d];
    points_[d] = domain.bc == Boundary::Dirichlet ? intervals[d] - 1 : intervals[d];
    cell_volume_ *= h_[d];
    size_ *= points_[d];
  }
}

bool Grid::operator==(const Grid& other) const {
  if (domain_.dim != other.domain_.dim || domain_.bc != other.domain_.bc) return false;
  for (int d = 0; d < domain_.dim; ++d) {
    if (domain_.lower[d] != other.domain_.lower[d] ||
        domain_.upper[d] != other.domain_.upper[d] ||
        intervals_[d] != other.intervals_[d]) {
      return false;
    }
  }
  return true;
}

Grid build_grid(const Domain& domain, const std::array<int, 3>& intervals,
                bool spectral) {
  Grid g(domain, intervals);
  if (spectral) {
    for (int d = 0; d < domain.dim; ++d) {
      if (intervals[d] % 2 != 0) {
        throw ConfigError("spectral discretizations need an even grid count (axis " +
                          std::to_string(d) + " has " +
                          std::to_string(intervals[d]) + ")");
      }
    }
  }
  return g;
}

Grid refine_grid(const Grid& g) {
  std::array<int, 3> n = g.intervals();
  for (int d = 0; d < g.dim(); ++d) n[d] *= 2;
  return Grid(g.domain(), n);
}

std::vector<Eigen::VectorXd> node_coordinates(const Grid& g) {
  std::vector<Eigen::VectorXd> out(g.dim());
  for (int d = 0; d < g.dim(); ++d) {
    out[d].resize(g.points(d));
    for (int i = 0; i < g.points(d); ++i) out[d][i] = g.coordinate(d, i);
  }
  return out;
}

}  // namespace gpe
