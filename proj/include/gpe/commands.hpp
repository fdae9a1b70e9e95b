#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "gpe/config.hpp"
#include "gpe/grid.hpp"
#include "gpe/problem.hpp"

namespace gpe {

/// Exit codes of the command-line front end.
enum ExitCode : int { kOk = 0, kConfigError = 2, kNotConverged = 3, kIoError = 4 };

struct LevelReport {
  std::array<int, 3> n{1, 1, 1};
  int warm_iterations = 0;
  int iterations = 0;
  int rejected = 0;
  double energy = 0.0;
  bool converged = false;
};

struct SolveReport {
  int dim = 1;
  double energy = 0.0;
  double mu = 0.0;
  std::array<double, 3> rms{0.0, 0.0, 0.0};
  double max_density = 0.0;
  double residual = 0.0;
  double theta = 0.0;
  int iterations = 0;  // gradient steps or outer Newton iterations (all levels)
  int evaluations = 0;
  int rejected = 0;
  bool converged = false;
  double probe_min_curvature = 0.0;
  int probe_directions = 0;
  std::uint64_t probe_seed = 0;
  double wall_seconds = 0.0;  // not part of to_text()
  std::vector<LevelReport> levels;
  std::string config_echo;

  /// Deterministic `key = value` text; scalars at 17 significant digits.
  std::string to_text() const;
};

/// One trace line: gradient steps carry tau in `step`, Newton steps delta.
struct TraceRow {
  int level = 0;
  int k = 0;
  double energy = 0.0;
  double residual = 0.0;
  double step = 0.0;
  bool accepted = true;
};
using TraceSink = std::function<void(const TraceRow&)>;

template <typename Scalar>
struct SolveOutput {
  SolveReport report;
  Grid grid;
  Flavor flavor = Flavor::SP;
  Eigen::VectorX<Scalar> x;  // unified scaling on `grid`
};

/// Runs the configured solver. `cfg.init` seeds the coarsest level.
template <typename Scalar>
SolveOutput<Scalar> run_solve(const RunConfig& cfg, const TraceSink& trace = {});

/// State on `grid` as a grid function phi = X / sqrt(h).
template <typename Scalar>
Eigen::VectorX<Scalar> grid_function(const SolveOutput<Scalar>& out);

struct CommandOptions {
  std::string out_dir = ".";
  bool trace = false;
  int threads = 1;
};

// Each command writes its artifacts into opts.out_dir and returns an exit
// code; configuration and I/O problems surface as ConfigError / IoError.

int solve_command(const RunConfig& cfg, const CommandOptions& opts);
/// solve with solver.method forced to cascadic
int refine_command(RunConfig cfg, const CommandOptions& opts);

struct CompareRow {
  InitKind kind;
  double energy = 0.0;
  double mu = 0.0;
  int iterations = 0;
  bool converged = false;
  bool lowest = false;
};
std::vector<CompareRow> compare_init(const RunConfig& cfg, int threads);
int compare_init_command(const RunConfig& cfg, const CommandOptions& opts);

struct StudyRow {
  int n = 0;
  double h = 0.0;
  double max_error = 0.0;
  double energy_error = 0.0;
  double mu_error = 0.0;
  bool converged = false;
};
struct StudyTable {
  double reference_energy = 0.0;
  double reference_mu = 0.0;
  bool reference_converged = false;
  std::vector<StudyRow> rows;
};
/// Reference ground state by SP on study.reference_n, then the configured
/// flavor on every study.n mesh, compared at shared nodes after phase
/// alignment. Throws ConfigError unless every mesh nests in the reference.
StudyTable convergence_study(const RunConfig& cfg, int threads);
int convergence_study_command(const RunConfig& cfg, const CommandOptions& opts);

/// log2(e_coarse / e_fine) / log2(h_coarse / h_fine); NaN when undefined.
double observed_order(double e_coarse, double e_fine, double h_coarse, double h_fine);

}  // namespace gpe
