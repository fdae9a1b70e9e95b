#include "gpe/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <complex>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <vector>

#include "gpe/errors.hpp"

namespace gpe {

namespace {

constexpr char kMagic[8] = {'G', 'P', 'E', 'G', 'R', 'I', 'D', '1'};

template <typename T>
void put(std::ostream& os, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  os.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& is, const std::string& path) {
  char buf[sizeof(T)];
  if (!is.read(buf, sizeof(T))) throw IoError(path + ": truncated grid-data file");
  if constexpr (std::endian::native == std::endian::big) std::reverse(buf, buf + sizeof(T));
  T v;
  std::memcpy(&v, buf, sizeof(T));
  return v;
}

// Storage index (axis 0 fastest) of the r-th value in row-major file order.
std::ptrdiff_t storage_index(const Grid& g, std::ptrdiff_t r) {
  const auto& n = g.shape();
  std::array<int, 3> idx{0, 0, 0};
  for (int d = g.dim() - 1; d >= 0; --d) {
    idx[d] = static_cast<int>(r % n[d]);
    r /= n[d];
  }
  return g.index(idx[0], idx[1], idx[2]);
}

void write_impl(const std::string& path, const Grid& g, const Eigen::VectorXcd& phi, bool complex) {
  if (phi.size() != g.size()) {
    throw IoError(path + ": state size " + std::to_string(phi.size()) +
                  " does not match the grid (" + std::to_string(g.size()) + ")");
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path + " for writing");
  os.write(kMagic, sizeof(kMagic));
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.dim()));
  put<std::uint32_t>(os, g.bc() == Boundary::Periodic ? 1u : 0u);
  put<std::uint32_t>(os, complex ? 1u : 0u);
  for (int d = 0; d < g.dim(); ++d) {
    put<std::uint64_t>(os, static_cast<std::uint64_t>(g.intervals(d)));
    put<double>(os, g.domain().lower[d]);
    put<double>(os, g.domain().upper[d]);
  }
  for (std::ptrdiff_t r = 0; r < g.size(); ++r) {
    const std::complex<double> v = phi[storage_index(g, r)];
    put<double>(os, v.real());
    if (complex) put<double>(os, v.imag());
  }
  if (!os) throw IoError("write to " + path + " failed");
}

}  // namespace

void write_grid_data(const std::string& path, const Grid& g, const Eigen::VectorXd& phi) {
  write_impl(path, g, phi.cast<std::complex<double>>(), false);
}

void write_grid_data(const std::string& path, const Grid& g, const Eigen::VectorXcd& phi) {
  write_impl(path, g, phi, true);
}

GridData read_grid_data(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open " + path);
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0) {
    throw IoError(path + ": not a GPEGRID1 file");
  }
  GridData out;
  const auto dim = get<std::uint32_t>(is, path);
  const auto bc = get<std::uint32_t>(is, path);
  const auto field = get<std::uint32_t>(is, path);
  if (dim < 1 || dim > 3 || bc > 1 || field > 1) throw IoError(path + ": corrupt header");
  out.domain.dim = static_cast<int>(dim);
  out.domain.bc = bc == 1 ? Boundary::Periodic : Boundary::Dirichlet;
  out.field = field == 1 ? FieldKind::Complex : FieldKind::Real;
  for (unsigned d = 0; d < dim; ++d) {
    const auto n = get<std::uint64_t>(is, path);
    if (n < 2 || n > (1u << 20)) throw IoError(path + ": corrupt interval count");
    out.intervals[d] = static_cast<int>(n);
    out.domain.lower[d] = get<double>(is, path);
    out.domain.upper[d] = get<double>(is, path);
  }
  Grid g;
  try {
    g = out.grid();
  } catch (const ConfigError& e) {
    throw IoError(path + ": " + e.what());
  }
  out.values.resize(g.size());
  for (std::ptrdiff_t r = 0; r < g.size(); ++r) {
    const double re = get<double>(is, path);
    const double im = out.field == FieldKind::Complex ? get<double>(is, path) : 0.0;
    out.values[storage_index(g, r)] = {re, im};
  }
  if (is.peek() != std::char_traits<char>::eof()) throw IoError(path + ": trailing data");
  return out;
}

template <typename Scalar>
Eigen::VectorX<Scalar> read_state(const std::string& path, const DiscreteProblem& p) {
  const GridData data = read_grid_data(path);
  if (!(data.grid() == p.grid())) {
    throw ConfigError(path + ": stored grid does not match the problem grid");
  }
  if constexpr (std::is_same_v<Scalar, double>) {
    if (data.values.imag().cwiseAbs().maxCoeff() > 0.0) {
      throw ConfigError(path + ": complex state cannot seed a real-field problem");
    }
    return to_unified<double>(p, data.values.real());
  } else {
    return to_unified<std::complex<double>>(p, data.values);
  }
}

template Eigen::VectorXd read_state<double>(const std::string&, const DiscreteProblem&);
template Eigen::VectorXcd read_state<std::complex<double>>(const std::string&,
                                                           const DiscreteProblem&);

}  // namespace gpe
