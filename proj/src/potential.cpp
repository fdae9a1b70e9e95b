#include "gpe/potential.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gpe/errors.hpp"

namespace gpe {

Potential Potential::harmonic(std::array<double, 3> gamma) {
  Potential p;
  p.kind = Kind::Harmonic;
  p.gamma = gamma;
  return p;
}

Potential Potential::lattice(double amplitude, double period, std::array<double, 3> gamma) {
  Potential p;
  p.kind = Kind::HarmonicPlusLattice;
  p.gamma = gamma;
  p.lattice_amplitude = amplitude;
  p.lattice_period = period;
  return p;
}

Potential Potential::stirrer(double height, double width, double offset,
                             std::array<double, 3> gamma) {
  Potential p;
  p.kind = Kind::GaussianStirrer;
  p.gamma = gamma;
  p.stirrer_height = height;
  p.stirrer_width = width;
  p.stirrer_offset = offset;
  return p;
}

Potential Potential::custom(Eigen::VectorXd samples) {
  Potential p;
  p.kind = Kind::Custom;
  p.samples = std::move(samples);
  return p;
}

double Potential::operator()(const std::array<double, 3>& x, int dim) const {
  if (kind == Kind::Custom) {
    throw ConfigError("custom potentials have no closed form; sample them on a grid");
  }
  double v = 0.0;
  for (int d = 0; d < dim; ++d) v += 0.5 * gamma[d] * gamma[d] * x[d] * x[d];
  if (kind == Kind::HarmonicPlusLattice) {
    for (int d = 0; d < dim; ++d) {
      const double s = std::sin(std::numbers::pi * x[d] / lattice_period);
      v += lattice_amplitude * s * s;
    }
  } else if (kind == Kind::GaussianStirrer) {
    const double dx = x[0] - stirrer_offset;
    const double y = dim > 1 ? x[1] : 0.0;
    v += stirrer_height * std::exp(-stirrer_width * (dx * dx + y * y));
  }
  return v;
}

Eigen::VectorXd sample_potential(const Potential& p, const Grid& g) {
  if (p.kind == Potential::Kind::Custom) {
    if (p.samples.size() != g.size()) {
      throw ConfigError("custom potential has " + std::to_string(p.samples.size()) +
                        " samples but the grid has " + std::to_string(g.size()) +
                        " unknowns");
    }
    if (!p.samples.allFinite()) throw ConfigError("custom potential has non-finite samples");
    return p.samples;
  }
  Eigen::VectorXd v(g.size());
  const auto& n = g.shape();
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        std::array<double, 3> x{g.coordinate(0, i), 0.0, 0.0};
        if (g.dim() > 1) x[1] = g.coordinate(1, j);
        if (g.dim() > 2) x[2] = g.coordinate(2, k);
        v[g.index(i, j, k)] = p(x, g.dim());
      }
    }
  }
  return v;
}

}  // namespace gpe
