#include "gpe/commands.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "gpe/errors.hpp"
#include "gpe/gradient.hpp"
#include "gpe/grid_io.hpp"
#include "gpe/init.hpp"
#include "gpe/newton.hpp"

namespace gpe {

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Calls f(double{}) or f(std::complex<double>{}) according to the field kind.
template <typename F>
decltype(auto) with_field(const RunConfig& cfg, F&& f) {
  if (cfg.field_kind() == FieldKind::Real) return f(double{});
  return f(std::complex<double>{});
}

// Runs job(i) for i in [0, n) on up to `threads` workers.
void parallel_for(int n, int threads, const std::function<void(int)>& job) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::exception_ptr err;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i; (i = next++) < n;) {
        try {
          job(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(err_mutex);
          if (!err) err = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (err) std::rethrow_exception(err);
}

std::filesystem::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir + ": " + ec.message());
  return dir;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  os << text;
  if (!os) throw IoError("write to " + path.string() + " failed");
}

void fill_observables(SolveReport& r, const DiscreteProblem& p, const auto& x,
                      const RunConfig& cfg) {
  const auto ev = evaluate(p, x);
  auto mr = multiplier_and_residual(x, ev.gradient);
  r.dim = p.grid().dim();
  r.energy = ev.energy;
  r.mu = chemical_potential(p, x);
  r.theta = mr.theta;
  r.residual = mr.residual.norm();
  for (int d = 0; d < r.dim; ++d) r.rms[d] = rms(p, x, d);
  r.max_density = density(p, x).maxCoeff();
  r.probe_directions = cfg.probe_directions;
  r.probe_seed = cfg.seed;
  if (cfg.probe_directions > 0) {
    r.probe_min_curvature = second_order_probe(p, x, cfg.probe_directions, cfg.seed).min_curvature;
  }
  r.config_echo = cfg.echo();
}

template <typename Scalar>
LevelReport level_report(const Grid& g, const NewtonResult<Scalar>& res) {
  LevelReport l;
  l.n = g.intervals();
  l.warm_iterations = res.warm_iterations;
  l.iterations = res.iterations;
  l.rejected = res.rejected;
  l.energy = res.energy;
  l.converged = res.converged;
  return l;
}

}  // namespace

std::string SolveReport::to_text() const {
  std::ostringstream os;
  auto line = [&](const std::string& k, const std::string& v) { os << k << " = " << v << '\n'; };
  static const char* axes[] = {"x", "y", "z"};
  line("energy", fmt(energy));
  line("chemical_potential", fmt(mu));
  for (int d = 0; d < dim; ++d) line(std::string(axes[d]) + "_rms", fmt(rms[d]));
  line("max_density", fmt(max_density));
  line("residual", fmt(residual));
  line("theta", fmt(theta));
  line("iterations", std::to_string(iterations));
  line("evaluations", std::to_string(evaluations));
  line("rejected", std::to_string(rejected));
  line("converged", converged ? "true" : "false");
  line("probe.directions", std::to_string(probe_directions));
  line("probe.seed", std::to_string(probe_seed));
  line("probe.min_curvature", fmt(probe_min_curvature));
  for (size_t i = 0; i < levels.size(); ++i) {
    const auto& l = levels[i];
    const std::string p = "level." + std::to_string(i) + ".";
    std::string n;
    for (int d = 0; d < dim; ++d) n += (d ? " " : "") + std::to_string(l.n[d]);
    line(p + "n", n);
    line(p + "warm_iterations", std::to_string(l.warm_iterations));
    line(p + "iterations", std::to_string(l.iterations));
    line(p + "rejected", std::to_string(l.rejected));
    line(p + "energy", fmt(l.energy));
    line(p + "converged", l.converged ? "true" : "false");
  }
  std::istringstream cfg(config_echo);
  for (std::string s; std::getline(cfg, s);) os << "config." << s << '\n';
  return os.str();
}

template <typename Scalar>
SolveOutput<Scalar> run_solve(const RunConfig& cfg, const TraceSink& trace) {
  if (cfg.method != Method::Cascadic && cfg.levels != 1) {
    throw ConfigError("solver.levels: only the cascadic method (or the refine command) uses more than one level");
  }
  const auto start = std::chrono::steady_clock::now();
  SolveOutput<Scalar> out;
  out.flavor = cfg.flavor;
  SolveReport& r = out.report;
  auto newton_trace = [&](const NewtonTrace& t) {
    if (trace) trace({t.level, t.k, t.energy, t.residual, t.delta, t.accepted});
  };

  if (cfg.method == Method::Gradient) {
    out.grid = cfg.grid();
    const DiscreteProblem p = cfg.problem(out.grid);
    const auto x0 = initial_state<Scalar>(cfg.init, p, cfg.init_file);
    std::function<void(const GradTrace&)> sink;
    if (trace) {
      sink = [&](const GradTrace& t) { trace({0, t.k, t.energy, t.residual, t.tau, true}); };
    }
    auto res = gradient_descent(EnergyObjective<Scalar>{&p}, x0, cfg.params.grad, sink);
    r.iterations = res.iterations;
    r.evaluations = res.evaluations;
    r.converged = res.converged;
    out.x = std::move(res.x);
    fill_observables(r, p, out.x, cfg);
  } else if (cfg.method == Method::Newton) {
    out.grid = cfg.grid();
    const DiscreteProblem p = cfg.problem(out.grid);
    const auto x0 = initial_state<Scalar>(cfg.init, p, cfg.init_file);
    auto res = newton_solve(p, x0, cfg.params, 0, std::function<void(const NewtonTrace&)>(newton_trace));
    r.iterations = res.iterations;
    r.evaluations = res.evaluations;
    r.rejected = res.rejected;
    r.converged = res.converged;
    r.levels.push_back(level_report(out.grid, res));
    out.x = std::move(res.x);
    fill_observables(r, p, out.x, cfg);
  } else {
    const Grid g0 = cfg.grid(cfg.levels - 1);
    const DiscreteProblem p0 = cfg.problem(g0);
    const auto x0 = initial_state<Scalar>(cfg.init, p0, cfg.init_file);
    auto res = cascadic_solve<Scalar>([&](const Grid& g) { return cfg.problem(g); }, g0,
                                      cfg.levels, x0, cfg.params, newton_trace);
    r.converged = true;
    for (size_t l = 0; l < res.levels.size(); ++l) {
      const auto& lv = res.levels[l];
      r.iterations += lv.iterations;
      r.evaluations += lv.evaluations;
      r.rejected += lv.rejected;
      r.converged = r.converged && lv.converged;
      r.levels.push_back(level_report(res.grids[l], lv));
    }
    out.grid = res.grids.back();
    out.x = res.levels.back().x;
    fill_observables(r, cfg.problem(out.grid), out.x, cfg);
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

template <typename Scalar>
Eigen::VectorX<Scalar> grid_function(const SolveOutput<Scalar>& out) {
  return out.x / std::sqrt(out.grid.cell_volume());
}

namespace {

template <typename Scalar>
int write_solve(const RunConfig& cfg, const CommandOptions& opts) {
  const auto dir = prepare_dir(opts.out_dir);
  std::ofstream trace_file;
  TraceSink sink;
  if (opts.trace) {
    trace_file.open(dir / "trace.csv", std::ios::binary);
    if (!trace_file) throw IoError("cannot open " + (dir / "trace.csv").string());
    trace_file << "level,k,energy,residual,step,accepted\n";
    sink = [&](const TraceRow& t) {
      trace_file << t.level << ',' << t.k << ',' << fmt(t.energy) << ',' << fmt(t.residual) << ','
                 << fmt(t.step) << ',' << (t.accepted ? 1 : 0) << '\n';
    };
  }
  SolveOutput<Scalar> out = run_solve<Scalar>(cfg, sink);
  if (trace_file.is_open()) {
    trace_file.close();
    if (!trace_file) throw IoError("write to trace.csv failed");
  }
  write_text(dir / "report.txt", out.report.to_text());
  write_text(dir / "effective.cfg", out.report.config_echo);
  write_text(dir / "timing.txt", "wall_seconds = " + fmt(out.report.wall_seconds) + "\n");
  write_grid_data((dir / "state.gpe").string(), out.grid, grid_function(out));
  return out.report.converged ? kOk : kNotConverged;
}

}  // namespace

int solve_command(const RunConfig& cfg, const CommandOptions& opts) {
  return with_field(cfg, [&](auto tag) { return write_solve<decltype(tag)>(cfg, opts); });
}

int refine_command(RunConfig cfg, const CommandOptions& opts) {
  cfg.method = Method::Cascadic;
  return solve_command(cfg, opts);
}

std::vector<CompareRow> compare_init(const RunConfig& cfg, int threads) {
  if (cfg.compare_kinds.empty()) throw ConfigError("compare.kinds: list at least one init kind");
  std::vector<CompareRow> rows(cfg.compare_kinds.size());
  parallel_for(static_cast<int>(rows.size()), threads, [&](int i) {
    RunConfig c = cfg;
    c.init = cfg.compare_kinds[i];
    c.probe_directions = 0;
    const SolveReport r = with_field(c, [&](auto tag) {
      return run_solve<decltype(tag)>(c).report;
    });
    rows[i] = {c.init, r.energy, r.mu, r.iterations, r.converged, false};
  });
  size_t best = 0;
  for (size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].energy < rows[best].energy) best = i;
  }
  rows[best].lowest = true;
  return rows;
}

int compare_init_command(const RunConfig& cfg, const CommandOptions& opts) {
  const auto dir = prepare_dir(opts.out_dir);
  const auto rows = compare_init(cfg, opts.threads);
  std::ostringstream os;
  os << "kind,energy,chemical_potential,iterations,converged,lowest\n";
  bool all = true;
  for (const auto& r : rows) {
    os << to_string(r.kind) << ',' << fmt(r.energy) << ',' << fmt(r.mu) << ',' << r.iterations
       << ',' << (r.converged ? 1 : 0) << ',' << (r.lowest ? 1 : 0) << '\n';
    all = all && r.converged;
  }
  write_text(dir / "compare.csv", os.str());
  write_text(dir / "effective.cfg", cfg.echo());
  return all ? kOk : kNotConverged;
}

double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine) {
  if (!(e_coarse > 0.0) || !(e_fine > 0.0) || !(h_coarse > h_fine)) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::log2(e_coarse / e_fine) / std::log2(h_coarse / h_fine);
}

namespace {

template <typename Scalar>
double shared_node_error(const SolveOutput<Scalar>& ref, const SolveOutput<Scalar>& coarse) {
  const Grid& gf = ref.grid;
  const Grid& gc = coarse.grid;
  const Eigen::VectorX<Scalar> pf = grid_function(ref);
  const Eigen::VectorX<Scalar> pc = grid_function(coarse);
  std::array<int, 3> ratio{1, 1, 1};
  for (int d = 0; d < gc.dim(); ++d) ratio[d] = gf.intervals(d) / gc.intervals(d);
  const bool dirichlet = gc.bc() == Boundary::Dirichlet;
  auto fine_index = [&](int d, int i) {
    return dirichlet ? (i + 1) * ratio[d] - 1 : i * ratio[d];
  };
  std::vector<std::ptrdiff_t> map(gc.size());
  const auto& n = gc.shape();
  for (int k = 0; k < n[2]; ++k) {
    for (int j = 0; j < n[1]; ++j) {
      for (int i = 0; i < n[0]; ++i) {
        map[gc.index(i, j, k)] =
            gf.index(fine_index(0, i), gc.dim() > 1 ? fine_index(1, j) : 0,
                     gc.dim() > 2 ? fine_index(2, k) : 0);
      }
    }
  }
  // unit phase maximizing Re<ref, state> over the shared nodes
  std::complex<double> s = 0.0;
  for (std::ptrdiff_t c = 0; c < gc.size(); ++c) {
    s += std::conj(std::complex<double>(pf[map[c]])) * std::complex<double>(pc[c]);
  }
  std::complex<double> phase = std::abs(s) > 0.0 ? std::conj(s) / std::abs(s) : 1.0;
  if constexpr (std::is_same_v<Scalar, double>) phase = phase.real() < 0.0 ? -1.0 : 1.0;
  double err = 0.0;
  for (std::ptrdiff_t c = 0; c < gc.size(); ++c) {
    err = std::max(err, std::abs(std::complex<double>(pf[map[c]]) -
                                 phase * std::complex<double>(pc[c])));
  }
  return err;
}

template <typename Scalar>
StudyTable run_study(const RunConfig& cfg, int threads) {
  if (cfg.study_n.empty()) throw ConfigError("study.n: list at least one mesh");
  if (cfg.study_reference_n <= 0) throw ConfigError("study.reference_n: must be set");
  for (size_t i = 0; i < cfg.study_n.size(); ++i) {
    const int n = cfg.study_n[i];
    if (n < 2 || cfg.study_reference_n % n != 0) {
      throw ConfigError("study.n: mesh " + std::to_string(n) + " does not nest in reference mesh " +
                        std::to_string(cfg.study_reference_n));
    }
    if (i > 0 && (n <= cfg.study_n[i - 1] || n % cfg.study_n[i - 1] != 0)) {
      throw ConfigError("study.n: meshes must be nested and ordered coarse to fine");
    }
  }
  auto mesh_config = [&](int n, Flavor f) {
    RunConfig c = cfg;
    c.flavor = f;
    c.n = {n, n, n};
    c.probe_directions = 0;
    if (c.method == Method::Cascadic) {
      c.method = Method::Newton;
      c.levels = 1;
    }
    return c;
  };
  const size_t m = cfg.study_n.size();
  std::vector<SolveOutput<Scalar>> sols(m + 1);
  parallel_for(static_cast<int>(m + 1), threads, [&](int i) {
    const RunConfig c = i == 0 ? mesh_config(cfg.study_reference_n, Flavor::SP)
                               : mesh_config(cfg.study_n[i - 1], cfg.flavor);
    sols[i] = run_solve<Scalar>(c);
  });
  StudyTable t;
  t.reference_energy = sols[0].report.energy;
  t.reference_mu = sols[0].report.mu;
  t.reference_converged = sols[0].report.converged;
  for (size_t i = 0; i < m; ++i) {
    const auto& s = sols[i + 1];
    StudyRow row;
    row.n = cfg.study_n[i];
    row.h = s.grid.spacing(0);
    row.max_error = shared_node_error(sols[0], s);
    row.energy_error = std::abs(s.report.energy - t.reference_energy);
    row.mu_error = std::abs(s.report.mu - t.reference_mu);
    row.converged = s.report.converged;
    t.rows.push_back(row);
  }
  return t;
}

}  // namespace

StudyTable convergence_study(const RunConfig& cfg, int threads) {
  return with_field(cfg, [&](auto tag) { return run_study<decltype(tag)>(cfg, threads); });
}

int convergence_study_command(const RunConfig& cfg, const CommandOptions& opts) {
  const auto dir = prepare_dir(opts.out_dir);
  const StudyTable t = convergence_study(cfg, opts.threads);
  std::ostringstream os;
  os << "n,h,max_error,energy_error,mu_error,order_max,order_energy,order_mu,converged\n";
  bool all = t.reference_converged;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double o[3] = {nan, nan, nan};
    if (i > 0) {
      const auto& p = t.rows[i - 1];
      o[0] = observed_order(p.max_error, r.max_error, p.h, r.h);
      o[1] = observed_order(p.energy_error, r.energy_error, p.h, r.h);
      o[2] = observed_order(p.mu_error, r.mu_error, p.h, r.h);
    }
    os << r.n << ',' << fmt(r.h) << ',' << fmt(r.max_error) << ',' << fmt(r.energy_error) << ','
       << fmt(r.mu_error) << ',' << fmt(o[0]) << ',' << fmt(o[1]) << ',' << fmt(o[2]) << ','
       << (r.converged ? 1 : 0) << '\n';
    all = all && r.converged;
  }
  write_text(dir / "study.csv", os.str());
  write_text(dir / "reference.txt", "energy = " + fmt(t.reference_energy) +
                                        "\nchemical_potential = " + fmt(t.reference_mu) + "\n");
  write_text(dir / "effective.cfg", cfg.echo());
  return all ? kOk : kNotConverged;
}

template SolveOutput<double> run_solve(const RunConfig&, const TraceSink&);
template SolveOutput<std::complex<double>> run_solve(const RunConfig&, const TraceSink&);
template Eigen::VectorXd grid_function(const SolveOutput<double>&);
template Eigen::VectorXcd grid_function(const SolveOutput<std::complex<double>>&);

}  // namespace gpe
