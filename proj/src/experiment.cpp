#include "rbws/experiment.hpp"

#include <chrono>
#include <fstream>

#include <nlohmann/json.hpp>

#include "rbws/model_io.hpp"
#include "rbws/simd.hpp"

namespace rbws {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string describe(const ParamPoint& mu) {
  std::string s = "(";
  for (std::size_t i = 0; i < mu.values.size(); ++i) s += (i ? ", " : "") + format_double(mu.values[i]);
  return s + ")";
}

[[noreturn]] void rethrow_stage(const std::string& stage, const ParamPoint* mu) {
  const std::string where = stage + (mu ? " at mu = " + describe(*mu) : std::string());
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  } catch (const std::exception& e) {
    throw OperatorError(where + ": " + e.what());
  }
}

void say(const ProgressFn& progress, const std::string& msg) {
  if (progress) progress(msg);
}

}  // namespace

Workspace Workspace::create(const ExperimentConfig& cfg) {
  cfg.validate();
  ProblemSpec spec = ProblemSpec::from_name(cfg.problem);
  auto mesh = std::make_shared<const MeshHierarchy>(build_hierarchy(cfg.grid_levels, cfg.base_cells, spec.boundary()));
  auto problem = std::make_shared<const FemProblem>(spec, mesh);
  const int p = static_cast<int>(spec.parameter_dimension());
  // Distinct streams for the two designs.
  auto train = lhs_sample(p, cfg.train_size, spec.box(), cfg.seed);
  auto test = lhs_sample(p, cfg.test_size, spec.box(), cfg.seed + 0x9e3779b97f4a7c15ULL);
  return Workspace{std::move(spec), std::move(mesh), std::move(problem), std::move(train), std::move(test)};
}

MgcgSolver Workspace::training_solver(const ExperimentConfig& cfg) const {
  return MgcgSolver(mesh, SolveOptions{cfg.training_tolerance, 500});
}

SweepReport run_experiment(const ExperimentConfig& cfg, const ProgressFn& progress) {
  cfg.validate();
  const Workspace ws = Workspace::create(cfg);
  const MgcgSolver hf = ws.training_solver(cfg);
  SweepReport out;
  out.config_hash = config_hash(cfg);

  // Offline stage. Each N is trained on its own so t_off(N) is measured
  // directly; greedy models are nested, so the largest one serves all N.
  std::map<int, double> l1roc_time, msrb_time;
  for (const auto& m : cfg.methods) {
    for (int n : m.rb_dims) {
      if (m.id == MethodId::rbi_mgcg && !l1roc_time.count(n)) {
        say(progress, "training L1ROC N=" + std::to_string(n));
        const auto t0 = Clock::now();
        L1rocModel model;
        try {
          model = l1roc_offline(*ws.problem, ws.train, L1rocOptions{n, cfg.seed}, hf);
        } catch (...) {
          rethrow_stage("L1ROC training (N=" + std::to_string(n) + ")", nullptr);
        }
        l1roc_time[n] = seconds_since(t0);
        if (!out.l1roc || model.dimension() > out.l1roc->dimension()) {
          out.l1roc = std::make_shared<const L1rocModel>(std::move(model));
        }
      }
      if (m.id == MethodId::rbi_msrbcg && !msrb_time.count(n)) {
        say(progress, "training POD/MSRB N=" + std::to_string(n));
        const auto t0 = Clock::now();
        try {
          const MsrbTrainOptions opt = cfg.msrb_options(n);
          out.msrb[n] = std::make_shared<const MsrbHierarchy>(msrb_train(*ws.problem, ws.train, opt, hf));
        } catch (...) {
          rethrow_stage("MSRB training (N=" + std::to_string(n) + ")", nullptr);
        }
        msrb_time[n] = seconds_since(t0);
      }
    }
  }

  // Online sweep.
  for (double delta : cfg.deltas) {
    for (const auto& m : cfg.methods) {
      const std::vector<int> dims = m.id == MethodId::mgcg ? std::vector<int>{0} : m.rb_dims;
      for (int n : dims) {
        MethodRun run;
        run.method = MethodConfig::standard(m.id, n, delta, cfg.max_iterations);
        if (m.id == MethodId::rbi_mgcg) run.t_off = l1roc_time.at(n);
        if (m.id == MethodId::rbi_msrbcg) run.t_off = msrb_time.at(n);
        out.runs.push_back(std::move(run));
      }
    }
  }
  for (std::size_t i = 0; i < ws.test.size(); ++i) {
    const ParamPoint& mu = ws.test[i];
    say(progress, "test parameter " + std::to_string(i + 1) + "/" + std::to_string(ws.test.size()));
    AssembledSystem sys;
    try {
      sys = ws.problem->assemble(mu);
    } catch (...) {
      rethrow_stage("assembly", &mu);
    }
    for (auto& run : out.runs) {
      TrainedModels models;
      models.mesh = ws.mesh;
      models.l1roc = out.l1roc;
      if (run.method.id == MethodId::rbi_msrbcg) models.msrb = out.msrb.at(run.method.rb_dimension);
      try {
        run.reports.push_back(rbi_pcg_solve(sys, run.method, models).report);
      } catch (...) {
        rethrow_stage("solve with " + run.method.label(), &mu);
      }
    }
  }

  std::map<double, const MethodRun*> baseline;
  for (auto& run : out.runs) {
    double t = 0.0, it = 0.0;
    for (const auto& r : run.reports) {
      t += r.seconds;
      it += r.iterations;
      run.max_iterations = std::max(run.max_iterations, r.iterations);
      run.unconverged += r.converged ? 0 : 1;
    }
    run.mean_t_on = t / static_cast<double>(run.reports.size());
    run.mean_iterations = it / static_cast<double>(run.reports.size());
    if (run.method.id == MethodId::mgcg) baseline[run.method.tolerance] = &run;
  }
  for (auto& run : out.runs) {
    auto base = baseline.find(run.method.tolerance);
    if (run.method.id == MethodId::mgcg || base == baseline.end()) continue;
    run.has_bep = true;
    run.bep = break_even(run.t_off, base->second->mean_t_on, run.mean_t_on);
  }

  if (!cfg.output_dir.empty()) write_reports(cfg, out, cfg.output_dir);
  return out;
}

std::string summary_table(const SweepReport& report) {
  std::string s = "method,N,delta,L,t_off,t_on,BEP\n";
  for (const auto& run : report.runs) {
    s += to_string(run.method.id) + "," + std::to_string(run.method.rb_dimension) + "," +
         format_double(run.method.tolerance) + "," + format_double(run.mean_iterations) + "," +
         format_double(run.t_off) + "," + format_double(run.mean_t_on) + "," +
         (run.has_bep ? format_double(run.bep) : std::string()) + "\n";
  }
  return s;
}

void write_reports(const ExperimentConfig& cfg, const SweepReport& report, const std::filesystem::path& dir) {
  using nlohmann::json;
  std::filesystem::create_directories(dir);
  auto write = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write '" + (dir / name).string() + "'");
    f << text;
  };

  std::map<double, std::vector<const MethodRun*>> by_delta;
  for (const auto& run : report.runs) by_delta[run.method.tolerance].push_back(&run);
  for (const auto& [delta, runs] : by_delta) {
    std::vector<std::vector<double>> curves;
    std::size_t len = 0;
    std::string csv = "k";
    for (const auto* run : runs) {
      csv += "," + run->method.label();
      curves.push_back(average_residual_curve(run->reports));
      len = std::max(len, curves.back().size());
    }
    csv += "\n";
    for (std::size_t k = 0; k < len; ++k) {
      csv += std::to_string(k);
      for (const auto& c : curves) csv += "," + format_double(c[std::min(k, c.size() - 1)]);
      csv += "\n";
    }
    write("r_ave_delta_" + format_double(delta) + ".csv", csv);
  }
  write("summary.csv", summary_table(report));

  json runs = json::array();
  for (const auto& run : report.runs) {
    json iters = json::array(), finals = json::array();
    for (const auto& r : run.reports) {
      iters.push_back(r.iterations);
      finals.push_back(format_double(r.history.back()));
    }
    json e{{"method", to_string(run.method.id)},
           {"N", run.method.rb_dimension},
           {"delta", format_double(run.method.tolerance)},
           {"L_mean", format_double(run.mean_iterations)},
           {"L_max", run.max_iterations},
           {"unconverged", run.unconverged},
           {"t_off", format_double(run.t_off)},
           {"t_on", format_double(run.mean_t_on)},
           {"iterations", iters},
           {"final_residual", finals}};
    if (run.has_bep) e["BEP"] = format_double(run.bep);
    runs.push_back(std::move(e));
  }
  const json summary{{"config_hash", report.config_hash},
                     {"config", json::parse(config_to_json_text(cfg))},
                     {"timing_protocol",
                      "t_on: per-solve mean over the test set; includes initializer, preconditioner setup and PCG "
                      "iterations; excludes assembly. t_off: all offline training including high-fidelity solves."},
                     {"isa", std::string(simd::isa_name(simd::active_isa()))},
                     {"runs", runs}};
  write("summary.json", summary.dump(2) + "\n");

  if (report.l1roc) save_model(*report.l1roc, dir / "l1roc.rbws");
  for (const auto& [n, h] : report.msrb) save_model(*h, dir / ("msrb_N" + std::to_string(n) + ".rbws"));
}

}  // namespace rbws
