#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "rbws/bench.hpp"
#include "rbws/warmstart.hpp"

namespace rbws {

struct MethodEntry {
  MethodId id = MethodId::mgcg;
  std::vector<int> rb_dims;  // ignored for mgcg
};

struct ExperimentConfig {
  std::string problem = "example-1";
  int grid_levels = 3;
  Index base_cells = 4;  // coarsest grid cells per axis
  int train_size = 70;
  int test_size = 20;
  std::uint64_t seed = 1;
  std::vector<MethodEntry> methods{{MethodId::mgcg, {}}};
  std::vector<double> deltas{1e-16};
  int max_iterations = 40;
  int msrb_spaces = 8;
  double training_tolerance = 1e-12;  // relative residual of high-fidelity training solves
  ErrorSnapshotSource msrb_source = ErrorSnapshotSource::iteration_residual;
  std::string output_dir;

  // Throws ConfigError.
  void validate() const;
  int max_rb_dim(MethodId id) const;
  MsrbTrainOptions msrb_options(int rb_dimension) const;
};

ExperimentConfig config_from_json_text(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json_text(const ExperimentConfig& cfg);
// Hash of every setting that affects numeric output (the output directory is excluded).
std::string config_hash(const ExperimentConfig& cfg);

// Problem, mesh and parameter sets derived from a config.
struct Workspace {
  ProblemSpec spec;
  std::shared_ptr<const MeshHierarchy> mesh;
  std::shared_ptr<const FemProblem> problem;
  std::vector<ParamPoint> train;
  std::vector<ParamPoint> test;

  static Workspace create(const ExperimentConfig& cfg);
  MgcgSolver training_solver(const ExperimentConfig& cfg) const;
};

struct MethodRun {
  MethodConfig method;
  std::vector<SolveReport> reports;
  double t_off = 0.0;
  double mean_t_on = 0.0;
  double mean_iterations = 0.0;
  int max_iterations = 0;
  int unconverged = 0;
  double bep = kInfinity;
  bool has_bep = false;
};

struct SweepReport {
  std::string config_hash;
  std::vector<MethodRun> runs;
  std::shared_ptr<const L1rocModel> l1roc;                      // largest trained model
  std::map<int, std::shared_ptr<const MsrbHierarchy>> msrb;     // by N
};

using ProgressFn = std::function<void(const std::string&)>;

// Samples, trains (timing t_off), sweeps the test set (timing t_on) and, when
// cfg.output_dir is set, writes models, r_ave CSVs and the summaries. Stage
// failures are rethrown with the stage name and parameter.
SweepReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress = {});

void write_reports(const ExperimentConfig& cfg, const SweepReport& report, const std::filesystem::path& dir);
std::string summary_table(const SweepReport& report);

}  // namespace rbws
