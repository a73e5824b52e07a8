#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rbws/experiment.hpp"
#include "rbws/model_io.hpp"

namespace rbws {

using nlohmann::json;

void ExperimentConfig::validate() const {
  (void)ProblemSpec::from_name(problem);
  if (grid_levels < 2) throw ConfigError("grid.levels must be >= 2");
  if (base_cells < 2) throw ConfigError("grid.base_cells must be >= 2");
  if (train_size < 1 || test_size < 1) throw ConfigError("train_size and test_size must be >= 1");
  if (methods.empty()) throw ConfigError("no methods configured");
  if (deltas.empty()) throw ConfigError("no tolerances configured");
  for (double d : deltas) {
    if (!(d > 0.0 && d <= 1.0)) throw ConfigError("delta must lie in (0, 1]");
  }
  if (max_iterations < 0) throw ConfigError("max_iterations must be >= 0");
  if (msrb_spaces < 1) throw ConfigError("msrb_spaces must be >= 1");
  if (!(training_tolerance > 0.0 && training_tolerance < 1.0)) throw ConfigError("training_tolerance must lie in (0, 1)");
  for (const auto& m : methods) {
    if (m.id == MethodId::mgcg) continue;
    if (m.rb_dims.empty()) throw ConfigError(to_string(m.id) + ": rb_dims is empty");
    for (int n : m.rb_dims) {
      if (n < 1) throw ConfigError(to_string(m.id) + ": rb_dims entries must be >= 1");
      if (m.id == MethodId::rbi_mgcg && n > train_size) {
        throw ConfigError("rbi-mgcg: N = " + std::to_string(n) + " exceeds the training set size");
      }
    }
  }
}

int ExperimentConfig::max_rb_dim(MethodId id) const {
  int n = 0;
  for (const auto& m : methods)
    if (m.id == id)
      for (int d : m.rb_dims) n = std::max(n, d);
  return n;
}

MsrbTrainOptions ExperimentConfig::msrb_options(int rb_dimension) const {
  MsrbTrainOptions opt;
  opt.rb_dimension = rb_dimension;
  opt.max_spaces = msrb_spaces;
  opt.solve_tolerance = std::max(1e-9, training_tolerance);
  opt.source = msrb_source;
  return opt;
}

namespace {

const char* source_name(ErrorSnapshotSource s) {
  return s == ErrorSnapshotSource::iteration_residual ? "iteration" : "half-step";
}

ErrorSnapshotSource source_from_name(const std::string& name) {
  if (name == "iteration") return ErrorSnapshotSource::iteration_residual;
  if (name == "half-step") return ErrorSnapshotSource::half_step_residual;
  throw ConfigError("msrb_error_rhs must be 'iteration' or 'half-step'");
}

json to_json(const ExperimentConfig& cfg, bool with_output) {
  json methods = json::array();
  for (const auto& m : cfg.methods) {
    json e{{"id", to_string(m.id)}};
    if (m.id != MethodId::mgcg) e["rb_dims"] = m.rb_dims;
    methods.push_back(std::move(e));
  }
  json deltas = json::array();
  for (double d : cfg.deltas) deltas.push_back(format_double(d));
  json j{{"problem", cfg.problem},
         {"grid", {{"levels", cfg.grid_levels}, {"base_cells", cfg.base_cells}}},
         {"train_size", cfg.train_size},
         {"test_size", cfg.test_size},
         {"seed", cfg.seed},
         {"methods", methods},
         {"deltas", deltas},
         {"max_iterations", cfg.max_iterations},
         {"msrb_spaces", cfg.msrb_spaces},
         {"training_tolerance", format_double(cfg.training_tolerance)},
         {"msrb_error_rhs", source_name(cfg.msrb_source)}};
  if (with_output) j["output_dir"] = cfg.output_dir;
  return j;
}

double number_or_string(const json& v) {
  return v.is_string() ? parse_double(v.get<std::string>()) : v.get<double>();
}

}  // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
  ExperimentConfig cfg;
  try {
    const json j = json::parse(text);
    if (!j.is_object()) throw ConfigError("config root must be an object");
    static const char* known[] = {"problem", "grid", "train_size", "test_size", "seed", "methods", "deltas",
                                  "max_iterations", "msrb_spaces", "training_tolerance", "msrb_error_rhs",
                                  "output_dir"};
    for (const auto& [key, _] : j.items()) {
      if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
    if (j.contains("problem")) cfg.problem = j["problem"].get<std::string>();
    if (j.contains("grid")) {
      const json& g = j["grid"];
      if (g.contains("levels")) cfg.grid_levels = g["levels"].get<int>();
      if (g.contains("base_cells")) cfg.base_cells = g["base_cells"].get<Index>();
    }
    if (j.contains("train_size")) cfg.train_size = j["train_size"].get<int>();
    if (j.contains("test_size")) cfg.test_size = j["test_size"].get<int>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("methods")) {
      cfg.methods.clear();
      for (const auto& m : j["methods"]) {
        MethodEntry e;
        e.id = method_from_string(m.is_string() ? m.get<std::string>() : m.at("id").get<std::string>());
        if (m.is_object() && m.contains("rb_dims")) e.rb_dims = m["rb_dims"].get<std::vector<int>>();
        cfg.methods.push_back(std::move(e));
      }
    }
    if (j.contains("deltas")) {
      cfg.deltas.clear();
      for (const auto& d : j["deltas"]) cfg.deltas.push_back(number_or_string(d));
    }
    if (j.contains("max_iterations")) cfg.max_iterations = j["max_iterations"].get<int>();
    if (j.contains("msrb_spaces")) cfg.msrb_spaces = j["msrb_spaces"].get<int>();
    if (j.contains("training_tolerance")) cfg.training_tolerance = number_or_string(j["training_tolerance"]);
    if (j.contains("msrb_error_rhs")) cfg.msrb_source = source_from_name(j["msrb_error_rhs"].get<std::string>());
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return config_from_json_text(ss.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) { return to_json(cfg, true).dump(2); }

std::string config_hash(const ExperimentConfig& cfg) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(to_json(cfg, false).dump())));
  return buf;
}

}  // namespace rbws
