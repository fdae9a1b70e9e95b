#include "gpe/config.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "gpe/errors.hpp"
#include "gpe/grid_io.hpp"

namespace gpe {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const double x = std::stod(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected a number, got '" + v + "'");
}

long long to_integer(const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used == v.size()) return x;
  } catch (const std::exception&) {
  }
  throw ConfigError(key + ": expected an integer, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < -(1LL << 30) || x > (1LL << 30)) throw ConfigError(key + ": value out of range");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(key + ": expected true or false, got '" + v + "'");
}

template <typename T, typename Conv>
std::array<T, 3> axis_list(const std::string& key, const std::string& v, Conv conv) {
  const auto w = words(v);
  if (w.empty() || w.size() > 3) throw ConfigError(key + ": expected 1 to 3 values");
  std::array<T, 3> out{};
  for (int d = 0; d < 3; ++d) out[d] = conv(key, w[std::min<size_t>(d, w.size() - 1)]);
  return out;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
std::string fmt_axes(const std::array<T, 3>& a, int dim) {
  std::string s;
  for (int d = 0; d < dim; ++d) {
    if (d) s += ' ';
    if constexpr (std::is_integral_v<T>) {
      s += std::to_string(a[d]);
    } else {
      s += fmt(a[d]);
    }
  }
  return s;
}

Flavor parse_flavor(const std::string& v) {
  if (v == "fd") return Flavor::FD;
  if (v == "sp") return Flavor::SP;
  if (v == "fp") return Flavor::FP;
  throw ConfigError("problem.flavor: expected fd, sp or fp, got '" + v + "'");
}

Method parse_method(const std::string& v) {
  if (v == "gradient") return Method::Gradient;
  if (v == "newton") return Method::Newton;
  if (v == "cascadic") return Method::Cascadic;
  throw ConfigError("solver.method: expected gradient, newton or cascadic, got '" + v + "'");
}

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::Gradient: return "gradient";
    case Method::Newton: return "newton";
    case Method::Cascadic: return "cascadic";
  }
  return "?";
}

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig c;
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key or value");
    }
    if (!kv.emplace(key, value).second) throw ConfigError(key + ": given twice");
  }

  auto& g = c.params.grad;
  const std::map<std::string, std::function<void(const std::string&, const std::string&)>>
      setters = {
          {"domain.dim", [&](auto& k, auto& v) { c.dim = to_int(k, v); }},
          {"domain.lower", [&](auto& k, auto& v) { c.lower = axis_list<double>(k, v, to_double); }},
          {"domain.upper", [&](auto& k, auto& v) { c.upper = axis_list<double>(k, v, to_double); }},
          {"domain.bc", [&](auto& k, auto& v) {
             if (v != "auto" && v != "dirichlet" && v != "periodic") {
               throw ConfigError(k + ": expected auto, dirichlet or periodic");
             }
             c.bc = v;
           }},
          {"grid.n", [&](auto& k, auto& v) { c.n = axis_list<int>(k, v, to_int); }},
          {"problem.flavor", [&](auto&, auto& v) { c.flavor = parse_flavor(v); }},
          {"problem.beta", [&](auto& k, auto& v) { c.beta = to_double(k, v); }},
          {"problem.omega", [&](auto& k, auto& v) { c.omega = to_double(k, v); }},
          {"problem.field", [&](auto& k, auto& v) {
             if (v != "auto" && v != "real" && v != "complex") {
               throw ConfigError(k + ": expected auto, real or complex");
             }
             c.field = v;
           }},
          {"potential.kind", [&](auto& k, auto& v) {
             if (v != "harmonic" && v != "lattice" && v != "stirrer" && v != "file") {
               throw ConfigError(k + ": expected harmonic, lattice, stirrer or file");
             }
             c.potential_kind = v;
           }},
          {"potential.gamma", [&](auto& k, auto& v) { c.gamma = axis_list<double>(k, v, to_double); }},
          {"potential.lattice_amplitude", [&](auto& k, auto& v) { c.lattice_amplitude = to_double(k, v); }},
          {"potential.lattice_period", [&](auto& k, auto& v) { c.lattice_period = to_double(k, v); }},
          {"potential.stirrer_height", [&](auto& k, auto& v) { c.stirrer_height = to_double(k, v); }},
          {"potential.stirrer_width", [&](auto& k, auto& v) { c.stirrer_width = to_double(k, v); }},
          {"potential.stirrer_offset", [&](auto& k, auto& v) { c.stirrer_offset = to_double(k, v); }},
          {"potential.file", [&](auto&, auto& v) { c.potential_file = v; }},
          {"init.kind", [&](auto&, auto& v) { c.init = parse_init_kind(v); }},
          {"init.file", [&](auto&, auto& v) { c.init_file = v; }},
          {"solver.method", [&](auto&, auto& v) { c.method = parse_method(v); }},
          {"solver.levels", [&](auto& k, auto& v) { c.levels = to_int(k, v); }},
          {"solver.eps0", [&](auto& k, auto& v) { g.eps0 = to_double(k, v); }},
          {"solver.max_iter", [&](auto& k, auto& v) { g.max_iter = to_int(k, v); }},
          {"solver.eta", [&](auto& k, auto& v) { g.eta = to_double(k, v); }},
          {"solver.rho1", [&](auto& k, auto& v) { g.rho1 = to_double(k, v); }},
          {"solver.delta_back", [&](auto& k, auto& v) { g.delta_back = to_double(k, v); }},
          {"solver.tau_min", [&](auto& k, auto& v) { g.tau_min = to_double(k, v); }},
          {"solver.tau_max", [&](auto& k, auto& v) { g.tau_max = to_double(k, v); }},
          {"solver.monotone", [&](auto& k, auto& v) { g.monotone = to_bool(k, v); }},
          {"solver.max_backtracks", [&](auto& k, auto& v) { g.max_backtracks = to_int(k, v); }},
          {"solver.delta_stop", [&](auto& k, auto& v) { c.params.delta_stop = to_double(k, v); }},
          {"solver.k_init", [&](auto& k, auto& v) { c.params.k_init = to_int(k, v); }},
          {"solver.k_sub", [&](auto& k, auto& v) { c.params.k_sub = to_int(k, v); }},
          {"solver.k_newton", [&](auto& k, auto& v) { c.params.k_newton = to_int(k, v); }},
          {"newton.eta1", [&](auto& k, auto& v) { c.params.eta1 = to_double(k, v); }},
          {"newton.eta2", [&](auto& k, auto& v) { c.params.eta2 = to_double(k, v); }},
          {"newton.gamma1", [&](auto& k, auto& v) { c.params.gamma1 = to_double(k, v); }},
          {"newton.gamma2", [&](auto& k, auto& v) { c.params.gamma2 = to_double(k, v); }},
          {"newton.delta0", [&](auto& k, auto& v) { c.params.delta0 = to_double(k, v); }},
          {"probe.directions", [&](auto& k, auto& v) { c.probe_directions = to_int(k, v); }},
          {"seed", [&](auto& k, auto& v) {
             const long long s = to_integer(k, v);
             if (s < 0) throw ConfigError(k + ": must be nonnegative");
             c.seed = static_cast<std::uint64_t>(s);
           }},
          {"compare.kinds", [&](auto&, auto& v) {
             c.compare_kinds.clear();
             for (const auto& w : words(v)) c.compare_kinds.push_back(parse_init_kind(w));
           }},
          {"study.n", [&](auto& k, auto& v) {
             c.study_n.clear();
             for (const auto& w : words(v)) c.study_n.push_back(to_int(k, w));
           }},
          {"study.reference_n", [&](auto& k, auto& v) { c.study_reference_n = to_int(k, v); }},
      };
  for (const auto& [key, value] : kv) {
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(key + ": unknown key");
    it->second(key, value);
  }

  if (c.dim < 1 || c.dim > 3) throw ConfigError("domain.dim: must be 1, 2 or 3");
  if (c.levels < 1) throw ConfigError("solver.levels: must be at least 1");
  for (const auto& [key, value] : kv) {
    if ((key == "domain.lower" || key == "domain.upper" || key == "grid.n" ||
         key == "potential.gamma") &&
        words(value).size() > static_cast<size_t>(c.dim)) {
      throw ConfigError(key + ": more values than domain.dim = " + std::to_string(c.dim));
    }
  }
  if (c.probe_directions < 0) throw ConfigError("probe.directions: must be nonnegative");
  for (int d = 0; d < c.dim; ++d) {
    if (c.n[d] % (1 << (c.levels - 1)) != 0) {
      throw ConfigError("grid.n: must be divisible by 2^(solver.levels - 1)");
    }
  }
  c.params.validate();
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot open config file " + path);
  std::stringstream ss;
  ss << is.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::echo() const {
  std::ostringstream os;
  auto line = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  const auto& g = params.grad;
  line("domain.dim", std::to_string(dim));
  line("domain.lower", fmt_axes(lower, dim));
  line("domain.upper", fmt_axes(upper, dim));
  line("domain.bc", bc);
  line("grid.n", fmt_axes(n, dim));
  line("problem.flavor", to_string(flavor));
  line("problem.beta", fmt(beta));
  line("problem.omega", fmt(omega));
  line("problem.field", field);
  line("potential.kind", potential_kind);
  line("potential.gamma", fmt_axes(gamma, dim));
  line("potential.lattice_amplitude", fmt(lattice_amplitude));
  line("potential.lattice_period", fmt(lattice_period));
  line("potential.stirrer_height", fmt(stirrer_height));
  line("potential.stirrer_width", fmt(stirrer_width));
  line("potential.stirrer_offset", fmt(stirrer_offset));
  if (!potential_file.empty()) line("potential.file", potential_file);
  line("init.kind", to_string(init));
  if (!init_file.empty()) line("init.file", init_file);
  line("solver.method", to_string(method));
  line("solver.levels", std::to_string(levels));
  line("solver.eps0", fmt(g.eps0));
  line("solver.max_iter", std::to_string(g.max_iter));
  line("solver.eta", fmt(g.eta));
  line("solver.rho1", fmt(g.rho1));
  line("solver.delta_back", fmt(g.delta_back));
  line("solver.tau_min", fmt(g.tau_min));
  line("solver.tau_max", fmt(g.tau_max));
  line("solver.monotone", g.monotone ? "true" : "false");
  line("solver.max_backtracks", std::to_string(g.max_backtracks));
  line("solver.delta_stop", fmt(params.delta_stop));
  line("solver.k_init", std::to_string(params.k_init));
  line("solver.k_sub", std::to_string(params.k_sub));
  line("solver.k_newton", std::to_string(params.k_newton));
  line("newton.eta1", fmt(params.eta1));
  line("newton.eta2", fmt(params.eta2));
  line("newton.gamma1", fmt(params.gamma1));
  line("newton.gamma2", fmt(params.gamma2));
  line("newton.delta0", fmt(params.delta0));
  line("probe.directions", std::to_string(probe_directions));
  line("seed", std::to_string(seed));
  if (!compare_kinds.empty()) {
    std::string s;
    for (auto k : compare_kinds) s += (s.empty() ? "" : " ") + std::string(to_string(k));
    line("compare.kinds", s);
  }
  if (!study_n.empty()) {
    std::string s;
    for (int v : study_n) s += (s.empty() ? "" : " ") + std::to_string(v);
    line("study.n", s);
  }
  if (study_reference_n > 0) line("study.reference_n", std::to_string(study_reference_n));
  return os.str();
}

Boundary RunConfig::boundary() const {
  if (bc == "dirichlet") return Boundary::Dirichlet;
  if (bc == "periodic") return Boundary::Periodic;
  return flavor == Flavor::FP ? Boundary::Periodic : Boundary::Dirichlet;
}

FieldKind RunConfig::field_kind() const {
  if (field == "real") return FieldKind::Real;
  if (field == "complex") return FieldKind::Complex;
  return flavor == Flavor::FP || omega != 0.0 ? FieldKind::Complex : FieldKind::Real;
}

Domain RunConfig::domain() const {
  Domain d;
  d.dim = dim;
  d.lower = lower;
  d.upper = upper;
  d.bc = boundary();
  return d;
}

Grid RunConfig::grid(int coarsen) const {
  std::array<int, 3> m = n;
  for (int d = 0; d < dim; ++d) m[d] = n[d] >> coarsen;
  return build_grid(domain(), m, flavor != Flavor::FD);
}

Potential RunConfig::potential(const Grid& g) const {
  if (potential_kind == "lattice") return Potential::lattice(lattice_amplitude, lattice_period, gamma);
  if (potential_kind == "stirrer") {
    return Potential::stirrer(stirrer_height, stirrer_width, stirrer_offset, gamma);
  }
  if (potential_kind == "file") {
    if (potential_file.empty()) throw ConfigError("potential.kind = file needs potential.file");
    const GridData data = read_grid_data(potential_file);
    if (!(data.grid() == g)) {
      throw ConfigError("potential.file: stored grid does not match the problem grid");
    }
    Potential p = Potential::custom(data.values.real());
    p.gamma = gamma;
    return p;
  }
  return Potential::harmonic(gamma);
}

DiscreteProblem RunConfig::problem(const Grid& g) const { return problem(g, flavor); }

DiscreteProblem RunConfig::problem(const Grid& g, Flavor f) const {
  return DiscreteProblem(g, f, potential(g), beta, omega, field_kind());
}

}  // namespace gpe
