// Command-line driver: train, solve, sweep, spectrum, accuracy-curve, report.
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rbws/experiment.hpp"
#include "rbws/model_io.hpp"

namespace {

using namespace rbws;

struct Overrides {
  std::string config;
  std::string problem;
  int grid_levels = 0;
  std::vector<std::string> methods;
  std::vector<int> rb_dims;
  std::vector<double> deltas;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool quiet = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON experiment config");
  cmd->add_option("--problem", o.problem, "example-1 | example-2");
  cmd->add_option("--grid-levels", o.grid_levels, "number of multigrid levels (finest has base*2^(levels-1) cells)");
  cmd->add_option("--method", o.methods, "mgcg | rbi-mgcg | rbi-msrbcg (repeatable)");
  cmd->add_option("--rb-dim", o.rb_dims, "RB dimension(s) N");
  cmd->add_option("--delta", o.deltas, "relative residual tolerance(s)");
  cmd->add_option("--seed", o.seed, "sampling seed");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_flag("--quiet", o.quiet, "suppress progress messages");
}

ExperimentConfig resolve(const Overrides& o) {
  ExperimentConfig cfg = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (!o.problem.empty()) cfg.problem = o.problem;
  if (o.grid_levels != 0) cfg.grid_levels = o.grid_levels;
  if (o.seed) cfg.seed = *o.seed;
  if (!o.out.empty()) cfg.output_dir = o.out;
  if (!o.deltas.empty()) cfg.deltas = o.deltas;
  if (!o.methods.empty()) {
    std::vector<MethodEntry> picked;
    for (const auto& name : o.methods) {
      MethodEntry e{method_from_string(name), {}};
      for (const auto& m : cfg.methods)
        if (m.id == e.id) e.rb_dims = m.rb_dims;
      picked.push_back(std::move(e));
    }
    cfg.methods = std::move(picked);
  }
  if (!o.rb_dims.empty()) {
    for (auto& m : cfg.methods)
      if (m.id != MethodId::mgcg) m.rb_dims = o.rb_dims;
  }
  for (auto& m : cfg.methods)
    if (m.id != MethodId::mgcg && m.rb_dims.empty()) m.rb_dims = {10};
  cfg.validate();
  return cfg;
}

ProgressFn progress_fn(const Overrides& o) {
  if (o.quiet) return {};
  return [](const std::string& msg) { std::cerr << "[rbws] " << msg << "\n"; };
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

int cmd_train(const Overrides& o) {
  ExperimentConfig cfg = resolve(o);
  const Workspace ws = Workspace::create(cfg);
  const MgcgSolver hf = ws.training_solver(cfg);
  const std::filesystem::path dir = cfg.output_dir.empty() ? "." : cfg.output_dir;
  std::filesystem::create_directories(dir);
  const auto say = progress_fn(o);
  for (const auto& m : cfg.methods) {
    if (m.id == MethodId::mgcg) continue;
    const int n = *std::max_element(m.rb_dims.begin(), m.rb_dims.end());
    const auto t0 = std::chrono::steady_clock::now();
    std::filesystem::path file;
    if (m.id == MethodId::rbi_mgcg) {
      if (say) say("training L1ROC N=" + std::to_string(n));
      const L1rocModel model = l1roc_offline(*ws.problem, ws.train, L1rocOptions{n, cfg.seed}, hf);
      file = dir / "l1roc.rbws";
      save_model(model, file);
    } else {
      if (say) say("training POD/MSRB N=" + std::to_string(n));
      const MsrbTrainOptions opt = cfg.msrb_options(n);
      const MsrbHierarchy h = msrb_train(*ws.problem, ws.train, opt, hf);
      file = dir / ("msrb_N" + std::to_string(n) + ".rbws");
      save_model(h, file);
    }
    const double t = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s N=%d t_off=%s -> %s\n", to_string(m.id).c_str(), n, format_double(t).c_str(),
                file.string().c_str());
  }
  return 0;
}

int cmd_solve(const Overrides& o, const std::vector<double>& mu_values, const std::string& models_dir) {
  ExperimentConfig cfg = resolve(o);
  if (cfg.methods.size() != 1) throw ConfigError("solve: give exactly one --method");
  const Workspace ws = Workspace::create(cfg);
  const ParamPoint mu = mu_values.empty() ? ws.test.front() : ParamPoint{mu_values};
  ws.spec.check(mu);
  const MethodEntry& entry = cfg.methods.front();
  const int n = entry.id == MethodId::mgcg ? 0 : entry.rb_dims.front();

  TrainedModels models;
  models.mesh = ws.mesh;
  const MgcgSolver hf = ws.training_solver(cfg);
  const std::filesystem::path dir = models_dir.empty() ? std::filesystem::path(cfg.output_dir) : std::filesystem::path(models_dir);
  if (entry.id == MethodId::rbi_mgcg) {
    const auto file = dir / "l1roc.rbws";
    models.l1roc = std::make_shared<const L1rocModel>(
        !dir.empty() && std::filesystem::exists(file) ? load_l1roc(file)
                                                      : l1roc_offline(*ws.problem, ws.train, L1rocOptions{n, cfg.seed}, hf));
  } else if (entry.id == MethodId::rbi_msrbcg) {
    const auto file = dir / ("msrb_N" + std::to_string(n) + ".rbws");
    if (!dir.empty() && std::filesystem::exists(file)) {
      models.msrb = std::make_shared<const MsrbHierarchy>(load_msrb(file));
    } else {
      const MsrbTrainOptions opt = cfg.msrb_options(n);
      models.msrb = std::make_shared<const MsrbHierarchy>(msrb_train(*ws.problem, ws.train, opt, hf));
    }
  }
  const AssembledSystem sys = ws.problem->assemble(mu);
  const MethodConfig method = MethodConfig::standard(entry.id, n, cfg.deltas.front(), cfg.max_iterations);
  const SolveResult res = rbi_pcg_solve(sys, method, models);
  std::printf("method %s\nmu", method.label().c_str());
  for (double v : mu.values) std::printf(" %s", format_double(v).c_str());
  std::printf("\nk,relative_residual\n");
  for (std::size_t k = 0; k < res.report.history.size(); ++k) {
    std::printf("%zu,%s\n", k, format_double(res.report.history[k]).c_str());
  }
  std::printf("iterations %d\nconverged %s\ntrue_residual %s\nseconds %s\n", res.report.iterations,
              res.report.converged ? "yes" : "no", format_double(res.report.true_residual).c_str(),
              format_double(res.report.seconds).c_str());
  return 0;
}

int cmd_sweep(const Overrides& o) {
  ExperimentConfig cfg = resolve(o);
  const SweepReport report = run_experiment(cfg, progress_fn(o));
  std::printf("config %s\n%s", report.config_hash.c_str(), summary_table(report).c_str());
  if (!cfg.output_dir.empty()) std::printf("outputs written to %s\n", cfg.output_dir.c_str());
  return 0;
}

int cmd_spectrum(const Overrides& o) {
  ExperimentConfig cfg = resolve(o);
  const int n = o.rb_dims.empty() ? 10 : o.rb_dims.front();
  const Workspace ws = Workspace::create(cfg);
  const MsrbTrainOptions opt = cfg.msrb_options(n);
  const MsrbHierarchy h = msrb_train(*ws.problem, ws.train, opt, ws.training_solver(cfg));
  std::string csv = "k,index,relative_eigenvalue\n";
  std::printf("k,count_above_1e-10\n");
  for (std::size_t k = 0; k < h.residual_spectra.size(); ++k) {
    const auto& s = h.residual_spectra[k];
    std::printf("%zu,%d\n", k + 1, count_above(s, 1e-10));
    for (std::size_t i = 0; i < s.size(); ++i) {
      csv += std::to_string(k + 1) + "," + std::to_string(i) + "," + format_double(s[i]) + "\n";
    }
  }
  if (!cfg.output_dir.empty()) write_text(std::filesystem::path(cfg.output_dir) / "spectrum.csv", csv);
  return 0;
}

int cmd_accuracy(const Overrides& o) {
  ExperimentConfig cfg = resolve(o);
  const int n = o.rb_dims.empty() ? cfg.max_rb_dim(MethodId::rbi_mgcg) : o.rb_dims.front();
  if (n < 1) throw ConfigError("accuracy-curve: give --rb-dim");
  const Workspace ws = Workspace::create(cfg);
  const L1rocModel model = l1roc_offline(*ws.problem, ws.train, L1rocOptions{n, cfg.seed}, ws.training_solver(cfg));
  std::vector<int> dims(static_cast<std::size_t>(model.dimension()) + 1);
  for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = static_cast<int>(i);
  const auto curve = rb_accuracy_curve(model, *ws.problem, ws.test, dims);
  std::string csv = "N,r_N\n";
  for (const auto& pt : curve) csv += std::to_string(pt.n) + "," + format_double(pt.r) + "\n";
  std::printf("%s", csv.c_str());
  if (!cfg.output_dir.empty()) write_text(std::filesystem::path(cfg.output_dir) / "accuracy_curve.csv", csv);
  return 0;
}

int cmd_report(const Overrides& o, const std::string& path_arg) {
  std::filesystem::path path = path_arg.empty() ? std::filesystem::path(o.out.empty() ? "." : o.out) : std::filesystem::path(path_arg);
  if (std::filesystem::is_directory(path)) path /= "summary.json";
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path.string() + "': " + e.what());
  }
  std::printf("config %s\n", j.value("config_hash", std::string("?")).c_str());
  std::printf("%-12s %4s %8s %8s %12s %12s %12s\n", "method", "N", "delta", "L", "t_off", "t_on", "BEP");
  for (const auto& r : j.at("runs")) {
    char bep[32] = "-";
    if (r.contains("BEP")) std::snprintf(bep, sizeof bep, "%.4g", parse_double(r.at("BEP").get<std::string>()));
    std::printf("%-12s %4d %8.0e %8.2f %12.4g %12.4g %12s\n", r.at("method").get<std::string>().c_str(),
                r.at("N").get<int>(), parse_double(r.at("delta").get<std::string>()),
                parse_double(r.at("L_mean").get<std::string>()), parse_double(r.at("t_off").get<std::string>()),
                parse_double(r.at("t_on").get<std::string>()),
                bep);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Reduced-basis warm-started iterative solvers"};
  app.require_subcommand(1);
  Overrides o;
  std::vector<double> mu;
  std::string models_dir, report_path;

  auto* train = app.add_subcommand("train", "train the RB models a config needs and save them");
  auto* solve = app.add_subcommand("solve", "solve one parameter instance and print the residual history");
  auto* sweep = app.add_subcommand("sweep", "run the full experiment and write CSV/JSON reports");
  auto* spectrum = app.add_subcommand("spectrum", "relative spectra of the MSRB residual collections");
  auto* accuracy = app.add_subcommand("accuracy-curve", "r_N of the L1ROC model over the test set");
  auto* report = app.add_subcommand("report", "print a summary written by sweep");
  for (auto* c : {train, solve, sweep, spectrum, accuracy, report}) add_common(c, o);
  solve->add_option("--mu", mu, "parameter values (default: first test sample)")->delimiter(',');
  solve->add_option("--models", models_dir, "directory holding trained models");
  report->add_option("path", report_path, "summary.json or the directory containing it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*train) return cmd_train(o);
    if (*solve) return cmd_solve(o, mu, models_dir);
    if (*sweep) return cmd_sweep(o);
    if (*spectrum) return cmd_spectrum(o);
    if (*accuracy) return cmd_accuracy(o);
    if (*report) return cmd_report(o, report_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const DomainError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solver failure: %s\n", e.what());
    return 2;
  }
  return 0;
}
