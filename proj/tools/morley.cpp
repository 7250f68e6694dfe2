// morley: solve, convergence study and lemma verification for the
// rectangular Morley element on tensor box meshes.
//
// Exit codes: 0 ok, 1 a verification check failed, 2 invalid configuration,
// 3 the linear solver did not converge.

#include <chrono>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "morley/error_analysis.hpp"
#include "morley/lemma_verify.hpp"
#include "morley/mesh_spec.hpp"

namespace {

using nlohmann::json;
using namespace morley;

enum ExitCode { kOk = 0, kVerifyFailed = 1, kInvalidConfig = 2, kNotConverged = 3 };

struct RunConfig {
  std::string command;
  int dim = 2;
  std::string mesh = "uniform:8";
  std::optional<json> mesh_doc;  // overrides `mesh` when read from a config file
  std::string problem = "sinsin";
  int levels = 5;
  int quad = 5;
  double tol = 1e-12;
  int max_iter = 0;
  std::string output;  // solve/verify JSON, study JSON mirror
  std::string csv;     // study CSV
  std::uint64_t seed = kDefaultSeed;
  std::vector<int> dims{2, 3};
  int trials = 100;
  std::string inject_fault;
};

json to_json(const RunConfig& c) {
  json j{{"command", c.command}, {"dim", c.dim},       {"problem", c.problem}, {"levels", c.levels},
         {"quad", c.quad},       {"tol", c.tol},       {"max_iter", c.max_iter}, {"seed", c.seed},
         {"dims", c.dims},       {"trials", c.trials}, {"output", c.output},   {"csv", c.csv}};
  if (c.mesh_doc) j["mesh"] = *c.mesh_doc;
  else j["mesh"] = c.mesh;
  return j;
}

void merge(RunConfig& c, const json& j) {
  if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "command") continue;
    else if (key == "dim") c.dim = value.get<int>();
    else if (key == "mesh") {
      if (value.is_string()) c.mesh = value.get<std::string>();
      else c.mesh_doc = value;
    } else if (key == "problem") c.problem = value.get<std::string>();
    else if (key == "levels") c.levels = value.get<int>();
    else if (key == "quad") c.quad = value.get<int>();
    else if (key == "tol") c.tol = value.get<double>();
    else if (key == "max_iter") c.max_iter = value.get<int>();
    else if (key == "seed") c.seed = value.get<std::uint64_t>();
    else if (key == "dims") c.dims = value.get<std::vector<int>>();
    else if (key == "trials") c.trials = value.get<int>();
    else if (key == "output") c.output = value.get<std::string>();
    else if (key == "csv") c.csv = value.get<std::string>();
    else throw std::invalid_argument("unknown config key '" + key + "'");
  }
}

MeshSpec mesh_of(const RunConfig& c) {
  if (c.mesh_doc) {
    auto spec = mesh_spec_from_json(*c.mesh_doc);
    if (spec.dim != c.dim) throw std::invalid_argument("mesh dimension differs from dim");
    return spec;
  }
  return parse_mesh_arg(c.mesh, c.dim);
}

SolveOptions solve_options(const RunConfig& c) {
  if (c.quad < 1) throw std::invalid_argument("quad must be at least 1");
  if (!(c.tol > 0.0)) throw std::invalid_argument("tol must be positive");
  if (c.max_iter < 0) throw std::invalid_argument("max-iter must be nonnegative");
  return {c.quad, c.tol, c.max_iter};
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << text;
}

ManufacturedProblem homogeneous_problem(const RunConfig& c) {
  auto p = make_problem(c.problem, c.dim);
  if (!p.homogeneous) throw std::invalid_argument("problem '" + c.problem + "' has nonzero boundary values");
  return p;
}

int cmd_solve(const RunConfig& c) {
  if (c.dim < 2) throw std::invalid_argument("dim must be at least 2");
  const auto problem = homogeneous_problem(c);
  const auto options = solve_options(c);
  const TensorMesh mesh = mesh_of(c).build();
  const auto sol = solve_problem(mesh, problem, options);
  json out;
  out["config"] = to_json(c);
  out["ndof"] = sol.ndof;
  out["h"] = mesh_size(mesh);
  out["err_l2"] = l2_error(sol.uh, problem.u, options.quad_points);
  out["err_h1"] = broken_h1_error(sol.uh, problem.u, options.quad_points);
  out["solver"] = {{"iterations", sol.report.iterations},
                   {"relative_residual", sol.report.relative_residual},
                   {"converged", sol.report.converged}};
  emit(c.output, out.dump(2) + "\n");
  if (!sol.report.converged) {
    std::cerr << "solver did not converge\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_study(const RunConfig& c) {
  if (c.dim < 2) throw std::invalid_argument("dim must be at least 2");
  if (c.levels < 2) throw std::invalid_argument("levels must be at least 2");
  const auto problem = homogeneous_problem(c);
  const auto options = solve_options(c);
  const MeshSpec spec = mesh_of(c);

  const auto start = std::chrono::steady_clock::now();
  const auto records = run_study(problem, spec, c.levels, options);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream csv;
  write_csv(csv, records);
  emit(c.csv, csv.str());
  if (!c.output.empty()) {
    json mirror;
    mirror["config"] = to_json(c);
    mirror["mesh_family"] = to_string(spec.family);
    mirror["mesh"] = morley::to_json(spec);
    mirror["problem"] = problem.name;
    mirror["quad"] = options.quad_points;
    mirror["tol"] = options.tol;
    mirror["wall_time_s"] = wall;
    mirror["records"] = json::array();
    for (const auto& r : records) mirror["records"].push_back(morley::to_json(r));
    emit(c.output, mirror.dump(2) + "\n");
  }
  for (const auto& r : records)
    if (!r.converged) {
      std::cerr << "solver did not converge at level " << r.level << "\n";
      return kNotConverged;
    }
  return kOk;
}

int cmd_verify(const RunConfig& c) {
  VerifyOptions options;
  options.dims = c.dims;
  options.trials = c.trials;
  options.seed = c.seed;
  if (!c.inject_fault.empty()) {
    if (c.inject_fault != "face-sign") throw std::invalid_argument("unknown fault '" + c.inject_fault + "'");
    options.flip_face_signs = true;
  }
  const auto reports = run_verification(options);
  json out;
  out["config"] = to_json(c);
  out["reports"] = json::array();
  bool pass = true;
  for (const auto& r : reports) {
    out["reports"].push_back(morley::to_json(r));
    pass = pass && r.pass;
    if (!r.pass) std::cerr << "FAIL " << r.lemma << " d=" << r.dim << " residual " << r.max_residual << "\n";
  }
  out["pass"] = pass;
  emit(c.output, out.dump(2) + "\n");
  return pass ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rectangular Morley element solver and verification harness"};
  app.require_subcommand(1);

  RunConfig flags;
  std::string config_path;

  auto* solve = app.add_subcommand("solve", "Solve one problem on one mesh");
  auto* study = app.add_subcommand("study", "Convergence study over refinement levels");
  auto* verify = app.add_subcommand("verify", "Numerical checks of the element and space lemmas");

  std::vector<CLI::Option*> given;
  for (auto* sub : {solve, study}) {
    given.push_back(sub->add_option("--dim", flags.dim, "Space dimension (>= 2)"));
    given.push_back(sub->add_option("--mesh", flags.mesh,
                                    "uniform:N | divisional:split=0.3,counts=a:b | pattern:1-4,level=L | file:<path>"));
    given.push_back(sub->add_option("--problem", flags.problem, "bubble | sinsin | zero | linear"));
    given.push_back(sub->add_option("--quad", flags.quad, "Quadrature points per axis for loads and errors"));
    given.push_back(sub->add_option("--tol", flags.tol, "Relative residual tolerance"));
    given.push_back(sub->add_option("--max-iter", flags.max_iter, "Iteration cap (0: automatic)"));
    sub->add_option("--config", config_path, "RunConfig JSON; explicit flags take precedence");
  }
  given.push_back(solve->add_option("--output,-o", flags.output, "JSON result path (default stdout)"));
  given.push_back(study->add_option("--levels", flags.levels, "Number of refinement levels"));
  given.push_back(study->add_option("--csv", flags.csv, "CSV path (default stdout)"));
  given.push_back(study->add_option("--json", flags.output, "JSON mirror path"));

  given.push_back(verify->add_option("--dims", flags.dims, "Dimensions to check")->delimiter(','));
  given.push_back(verify->add_option("--trials", flags.trials, "Random trials per check"));
  given.push_back(verify->add_option("--seed", flags.seed, "Random seed"));
  given.push_back(verify->add_option("--output,-o", flags.output, "JSON report path (default stdout)"));
  verify->add_option("--config", config_path, "RunConfig JSON; explicit flags take precedence");
  verify->add_option("--inject-fault", flags.inject_fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInvalidConfig;
  }

  try {
    RunConfig config;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw std::invalid_argument("cannot open config '" + config_path + "'");
      merge(config, json::parse(in));
    }
    // Explicit flags win over the config file.
    const RunConfig defaults;
    for (auto* opt : given) {
      if (opt->count() == 0) continue;
      const auto name = opt->get_name();
      if (name == "--dim") config.dim = flags.dim;
      else if (name == "--mesh") config.mesh = flags.mesh, config.mesh_doc.reset();
      else if (name == "--problem") config.problem = flags.problem;
      else if (name == "--quad") config.quad = flags.quad;
      else if (name == "--tol") config.tol = flags.tol;
      else if (name == "--max-iter") config.max_iter = flags.max_iter;
      else if (name == "--output" || name == "--json") config.output = flags.output;
      else if (name == "--levels") config.levels = flags.levels;
      else if (name == "--csv") config.csv = flags.csv;
      else if (name == "--dims") config.dims = flags.dims;
      else if (name == "--trials") config.trials = flags.trials;
      else if (name == "--seed") config.seed = flags.seed;
    }
    config.inject_fault = flags.inject_fault;

    if (solve->parsed()) {
      config.command = "solve";
      return cmd_solve(config);
    }
    if (study->parsed()) {
      config.command = "study";
      return cmd_study(config);
    }
    config.command = "verify";
    return cmd_verify(config);
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
  } catch (const std::out_of_range& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInvalidConfig;
  }
  return kInvalidConfig;
}
