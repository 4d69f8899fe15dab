#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "cusp/bound_engine.hpp"
#include "cusp/eigensolver.hpp"
#include "cusp/mesh.hpp"
#include "cusp/param_core.hpp"
#include "cusp/run_io.hpp"

namespace {

using cusp::RunConfig;
using nlohmann::json;

constexpr int kExitInvalid = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitNonconverged = 4;
constexpr int kExitSweepEmpty = 5;

int exit_code_for(const cusp::Error& e) {
  const std::string& c = e.code();
  if (c == "EmptyWindow" || c == "EmptyFeasibleSet" || c == "InfeasibleParams")
    return kExitInfeasible;
  if (c == "MaxIterations" || c == "NonconvergedInner" ||
      c == "CollapsedIterate" || c == "QuadratureNonconvergence" ||
      c == "AscentFailed")
    return kExitNonconverged;
  return kExitInvalid;
}

void print_error(const cusp::Error& e) {
  std::cerr << "error [" << e.code() << "]: " << e.what() << "\n";
  if (const auto* ve = dynamic_cast<const cusp::ValidationError*>(&e)) {
    for (const auto& v : ve->violations()) {
      std::cerr << "  violation: " << v.message << " (value "
                << cusp::format_g17(v.value) << ", admissible "
                << v.admissible.str() << ")\n";
    }
  }
}

int thread_cap() {
  int cap = static_cast<int>(std::thread::hardware_concurrency());
  if (cap < 1) cap = 1;
  if (const char* env = std::getenv("CUSP_SPECTRA_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) cap = std::min(cap, v);
  }
  return cap;
}

// CLI overrides collected as an optional per flag; applied onto the config
// JSON so that parse_run_config does all validation uniformly.
struct Overrides {
  std::optional<double> gamma1, p, q, alpha, kappa, slack, tol, b_value;
  std::optional<int> mesh_n, max_iters, b_ref_n, seed;
  std::optional<std::string> b_strategy, out_dir;
};

void add_common_options(CLI::App* cmd, std::string& config_path,
                        Overrides& ov) {
  cmd->add_option("--config", config_path, "JSON run config file");
  auto opt_d = [&](const char* name, std::optional<double>& slot,
                   const char* help) {
    cmd->add_option_function<double>(
        name, [&slot](double v) { slot = v; }, help);
  };
  auto opt_i = [&](const char* name, std::optional<int>& slot,
                   const char* help) {
    cmd->add_option_function<int>(name, [&slot](int v) { slot = v; }, help);
  };
  opt_d("--gamma1", ov.gamma1, "cusp exponent gamma_1 >= 1");
  opt_d("--p", ov.p, "gradient exponent p");
  opt_d("--q", ov.q, "norm exponent q");
  opt_d("--alpha", ov.alpha, "weight exponent alpha");
  opt_i("--N", ov.mesh_n, "mesh refinement level");
  opt_d("--kappa", ov.kappa, "mesh grading exponent (<0: automatic)");
  opt_d("--slack", ov.slack, "verify slack (<0: automatic)");
  opt_d("--tol", ov.tol, "solver tolerance on mu");
  opt_i("--max-iters", ov.max_iters, "outer iteration cap");
  opt_i("--seed", ov.seed, "random seed");
  cmd->add_option_function<std::string>(
      "--b-strategy", [&ov](std::string v) { ov.b_strategy = std::move(v); },
      "B provider: user | payne_weinberger | numeric_lower");
  opt_d("--b-value", ov.b_value, "user-supplied B constant");
  opt_i("--b-ref-n", ov.b_ref_n, "reference mesh level for numeric B");
  cmd->add_option_function<std::string>(
      "--out", [&ov](std::string v) { ov.out_dir = std::move(v); },
      "output directory");
}

RunConfig build_config(const std::string& command,
                       const std::string& config_path, const Overrides& ov) {
  json j = json::object();
  if (!config_path.empty()) {
    std::ifstream is(config_path);
    if (!is) {
      throw cusp::Error("InvalidConfig", "cannot read config " + config_path);
    }
    try {
      is >> j;
    } catch (const json::exception& e) {
      throw cusp::Error("InvalidConfig",
                        "config parse failure: " + std::string(e.what()));
    }
  }
  j["command"] = command;
  if (ov.gamma1) j["domain"]["gamma1"] = *ov.gamma1;
  if (ov.p) j["problem"]["p"] = *ov.p;
  if (ov.q) j["problem"]["q"] = *ov.q;
  if (ov.alpha) j["problem"]["alpha"] = *ov.alpha;
  if (ov.mesh_n) j["mesh"]["N"] = *ov.mesh_n;
  if (ov.kappa) j["mesh"]["kappa"] = *ov.kappa;
  if (ov.slack) j["slack"] = *ov.slack;
  if (ov.tol) j["solver"]["tol"] = *ov.tol;
  if (ov.max_iters) j["solver"]["max_iters"] = *ov.max_iters;
  if (ov.seed) j["solver"]["seed"] = *ov.seed;
  if (ov.b_strategy) j["bound"]["b_strategy"] = *ov.b_strategy;
  if (ov.b_value) j["bound"]["b_value"] = *ov.b_value;
  if (ov.b_ref_n) j["bound"]["b_ref_n"] = *ov.b_ref_n;
  if (ov.out_dir) j["out"] = *ov.out_dir;
  return cusp::parse_run_config(j);
}

void write_outputs(const RunConfig& cfg, const std::string& result_name,
                   const std::string& result_content,
                   std::vector<std::string> extra_files = {}) {
  cusp::atomic_write_file(cfg.out_dir + "/" + result_name, result_content);
  std::vector<std::string> files = {result_name};
  for (auto& f : extra_files) files.push_back(std::move(f));
  cusp::atomic_write_file(
      cfg.out_dir + "/manifest.json",
      cusp::dump_json_g17(cusp::make_manifest(cfg, files)));
}

cusp::BoundReport compute_bound(const RunConfig& cfg,
                                const cusp::DomainSpec& spec) {
  if (cfg.b_strategy == "payne_weinberger") {
    // Direct convex-domain route: the domain itself must be the Lipschitz
    // reference triangle and the eigenvalue the classical Neumann one.
    if (spec.gamma1() != 1.0 || cfg.p != 2.0 || cfg.q != 2.0 ||
        cfg.alpha != 0.0) {
      throw cusp::Error("StrategyDomainMismatch",
                        "payne_weinberger requires gamma1=1, p=q=2, alpha=0");
    }
    cusp::BoundReport report;
    report.params = {1.0, 2.0, 2.0};
    const double d = std::sqrt(2.0);  // diameter of the reference triangle
    report.k_ps = 1.0;
    report.m_rq = 1.0;
    report.b_rs = d / M_PI;
    report.inv_lambda_bound = report.b_rs * report.b_rs;
    report.lambda_lower_bound = 1.0 / report.inv_lambda_bound;
    report.certified = true;
    report.provenance = "B: Payne-Weinberger d/pi, convex domain, direct";
    return report;
  }
  // The transfer machinery needs the A_p weight range plus p < alpha + gamma
  // (so p* is finite); window emptiness is diagnosed separately downstream.
  cusp::ValidatedProblem problem =
      cusp::validate_solver_problem(spec, cfg.p, cfg.q, cfg.alpha);
  if (!(cfg.p < cfg.alpha + spec.gamma)) {
    std::vector<cusp::Violation> v = {
        {cusp::ViolationCode::POutOfRange, {1.0, cfg.alpha + spec.gamma},
         cfg.p, "requires p < alpha + gamma"}};
    throw cusp::ValidationError(std::move(v),
                                "invalid (p, q, alpha): requires p < alpha + "
                                "gamma for the analytic bound");
  }
  cusp::BoundProviderFn provider;
  if (cfg.b_strategy == "user") {
    provider = cusp::constant_b_model(
        {cusp::BStrategy::user, cfg.b_value, false});
  } else {
    cusp::NumericBConfig nb;
    nb.ref_mesh_n = cfg.b_ref_n;
    nb.seed = cfg.solver.seed;
    provider = cusp::numeric_b_model(cfg.b_ref_n, nb);
  }
  return cusp::optimize_bound(problem, spec, provider, cfg.search);
}

cusp::EigenResult compute_solve(const RunConfig& cfg,
                                const cusp::DiscreteProblem& dp) {
  cusp::GridFunction u0 = cusp::random_function(dp, cfg.solver.seed);
  u0 = cusp::project_constraint(dp, u0, dp.problem().q);
  if (dp.problem().q == 2.0) {
    return cusp::inverse_iteration(dp, u0, cfg.solver);
  }
  return cusp::rayleigh_descent(dp, u0, cfg.solver);
}

int cmd_bound(const RunConfig& cfg) {
  const cusp::DomainSpec spec = cusp::DomainSpec::cusp2d(cfg.gamma1);
  const cusp::BoundReport report = compute_bound(cfg, spec);
  write_outputs(cfg, "result.json",
                cusp::dump_json_g17(cusp::bound_report_to_json(report)));
  std::cout << "1/lambda <= " << cusp::format_g17(report.inv_lambda_bound)
            << "  (lambda >= " << cusp::format_g17(report.lambda_lower_bound)
            << ")\n"
            << "  at a=" << cusp::format_g17(report.params.a)
            << " s=" << cusp::format_g17(report.params.s)
            << " r=" << cusp::format_g17(report.params.r) << "\n"
            << "  K=" << cusp::format_g17(report.k_ps)
            << " M=" << cusp::format_g17(report.m_rq)
            << " B=" << cusp::format_g17(report.b_rs)
            << " certified=" << (report.certified ? "true" : "false") << "\n"
            << "  " << report.provenance << "\n";
  return 0;
}

std::string eigenfunction_text(const cusp::GradedMesh& mesh,
                               const cusp::GridFunction& u) {
  std::ostringstream os;
  os << "# x1 x2 u\n";
  for (size_t i = 0; i < mesh.vertices.size(); ++i) {
    os << cusp::format_g17(mesh.vertices[i][0]) << " "
       << cusp::format_g17(mesh.vertices[i][1]) << " "
       << cusp::format_g17(u.values[static_cast<int>(i)]) << "\n";
  }
  return os.str();
}

int cmd_solve(const RunConfig& cfg) {
  const cusp::DomainSpec spec = cusp::DomainSpec::cusp2d(cfg.gamma1);
  const cusp::ValidatedProblem problem =
      cusp::validate_solver_problem(spec, cfg.p, cfg.q, cfg.alpha);
  const cusp::GradedMesh mesh =
      cusp::build_cusp_mesh(cfg.gamma1, cfg.mesh_n, cfg.effective_kappa());
  const cusp::DiscreteProblem dp(mesh, problem);
  const cusp::EigenResult result = compute_solve(cfg, dp);

  std::ostringstream mesh_text;
  cusp::write_mesh(mesh, mesh_text);
  cusp::atomic_write_file(cfg.out_dir + "/mesh.txt", mesh_text.str());
  cusp::atomic_write_file(cfg.out_dir + "/eigenfunction.txt",
                          eigenfunction_text(mesh, result.u));
  write_outputs(cfg, "result.json",
                cusp::dump_json_g17(cusp::eigen_result_to_json(result, cfg)),
                {"eigenfunction.txt", "mesh.txt"});
  std::cout << "lambda = " << cusp::format_g17(result.lambda) << "  ("
            << result.iterations << " iterations, residual "
            << cusp::format_g17(result.residual) << ")\n";
  return 0;
}

int cmd_verify(const RunConfig& cfg) {
  const cusp::DomainSpec spec = cusp::DomainSpec::cusp2d(cfg.gamma1);
  const cusp::ValidatedProblem problem =
      cusp::validate_solver_problem(spec, cfg.p, cfg.q, cfg.alpha);
  const cusp::GradedMesh mesh =
      cusp::build_cusp_mesh(cfg.gamma1, cfg.mesh_n, cfg.effective_kappa());
  const cusp::DiscreteProblem dp(mesh, problem);
  const cusp::EigenResult result = compute_solve(cfg, dp);
  const cusp::BoundReport bound = compute_bound(cfg, spec);

  const double slack =
      cfg.slack >= 0.0 ? cfg.slack : (bound.certified ? 0.0 : 0.1);
  const double ratio = result.lambda * bound.inv_lambda_bound;
  const bool holds = ratio >= 1.0 - slack;

  json j;
  j["lambda_numeric"] = result.lambda;
  j["lambda_lower_bound"] = bound.lambda_lower_bound;
  j["inv_lambda_bound"] = bound.inv_lambda_bound;
  j["ratio"] = ratio;
  j["slack"] = slack;
  j["certified"] = bound.certified;
  j["holds"] = holds;
  if (!bound.certified) {
    j["note"] = "non-certified B estimate; informational only";
  }
  j["bound"] = cusp::bound_report_to_json(bound);
  j["solve"] = cusp::eigen_result_to_json(result, cfg);
  write_outputs(cfg, "result.json", cusp::dump_json_g17(j));
  std::cout << "ratio = lambda * inv_bound = " << cusp::format_g17(ratio)
            << "  holds=" << (holds ? "true" : "false")
            << " (slack " << cusp::format_g17(slack) << ", "
            << (bound.certified ? "certified"
                                : "non-certified B estimate; informational only")
            << ")\n";
  return 0;
}

struct SweepRow {
  double gamma1, p, q, alpha;
  std::string line;
  bool infeasible = false;
};

int cmd_sweep(const RunConfig& cfg) {
  auto grid = [](const std::vector<double>& g, double scalar) {
    return g.empty() ? std::vector<double>{scalar} : g;
  };
  const auto g1s = grid(cfg.sweep_gamma1, cfg.gamma1);
  const auto ps = grid(cfg.sweep_p, cfg.p);
  const auto qs = grid(cfg.sweep_q, cfg.q);
  const auto als = grid(cfg.sweep_alpha, cfg.alpha);

  std::vector<SweepRow> rows;
  for (double g1 : g1s)
    for (double p : ps)
      for (double q : qs)
        for (double alpha : als) rows.push_back({g1, p, q, alpha, "", false});

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= rows.size()) return;
      SweepRow& row = rows[i];
      RunConfig point = cfg;
      point.gamma1 = row.gamma1;
      point.p = row.p;
      point.q = row.q;
      point.alpha = row.alpha;
      std::string status = "ok";
      double lambda = std::nan("");
      double inv_bound = std::nan("");
      double ratio = std::nan("");
      bool certified = false;
      try {
        const cusp::DomainSpec spec = cusp::DomainSpec::cusp2d(point.gamma1);
        const cusp::ValidatedProblem problem =
            cusp::validate_solver_problem(spec, point.p, point.q, point.alpha);
        const cusp::BoundReport bound = compute_bound(point, spec);
        inv_bound = bound.inv_lambda_bound;
        certified = bound.certified;
        const cusp::GradedMesh mesh = cusp::build_cusp_mesh(
            point.gamma1, point.mesh_n, point.effective_kappa());
        const cusp::DiscreteProblem dp(mesh, problem);
        const cusp::EigenResult result = compute_solve(point, dp);
        lambda = result.lambda;
        ratio = lambda * inv_bound;
      } catch (const cusp::Error& e) {
        status =
            exit_code_for(e) == kExitNonconverged ? "nonconverged" : "infeasible";
        row.infeasible = (status == "infeasible");
      }
      std::ostringstream os;
      os << cusp::format_g17(row.gamma1) << "," << cusp::format_g17(row.p)
         << "," << cusp::format_g17(row.q) << ","
         << cusp::format_g17(row.alpha) << "," << point.mesh_n << ","
         << cusp::format_g17(lambda) << "," << cusp::format_g17(inv_bound)
         << "," << cusp::format_g17(ratio) << ","
         << (certified ? "true" : "false") << "," << status;
      row.line = os.str();
    }
  };

  const int workers =
      std::min(thread_cap(), static_cast<int>(rows.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  std::ostringstream csv;
  csv << "gamma1,p,q,alpha,N,lambda,inv_lambda_bound,ratio,certified,status\n";
  bool any_ok = false;
  for (const auto& row : rows) {
    csv << row.line << "\n";
    if (!row.infeasible) any_ok = true;
  }
  write_outputs(cfg, "result.csv", csv.str());
  std::cout << rows.size() << " rows -> " << cfg.out_dir << "/result.csv\n";
  if (!any_ok) {
    std::cerr << "error [EmptyFeasibleSet]: every sweep point infeasible\n";
    return kExitSweepEmpty;
  }
  return 0;
}

int cmd_mesh_info(const RunConfig& cfg) {
  if (!(cfg.gamma1 >= 1.0)) {
    throw cusp::Error("InvalidConfig", "gamma1 must be >= 1");
  }
  const cusp::GradedMesh mesh =
      cusp::build_cusp_mesh(cfg.gamma1, cfg.mesh_n, cfg.effective_kappa());
  const cusp::MeshQuality quality = cusp::mesh_quality(mesh);
  json j;
  j["vertices"] = mesh.vertices.size();
  j["triangles"] = mesh.triangles.size();
  j["gamma1"] = mesh.gamma1;
  j["kappa"] = mesh.kappa;
  j["N"] = mesh.levels;
  j["total_area"] = mesh.total_area();
  j["domain_area"] = mesh.domain_area();
  j["area_gap"] = mesh.area_gap();
  j["diameter"] = mesh.diameter();
  j["quality"] = {{"min_angle_deg", quality.min_angle_deg},
                  {"max_aspect", quality.max_aspect},
                  {"h_min", quality.h_min},
                  {"h_max", quality.h_max}};
  std::ostringstream mesh_text;
  cusp::write_mesh(mesh, mesh_text);
  cusp::atomic_write_file(cfg.out_dir + "/mesh.txt", mesh_text.str());
  write_outputs(cfg, "result.json", cusp::dump_json_g17(j), {"mesh.txt"});
  std::cout << mesh.vertices.size() << " vertices, " << mesh.triangles.size()
            << " triangles, area " << cusp::format_g17(mesh.total_area())
            << " (gap " << cusp::format_g17(mesh.area_gap()) << ")\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"first Neumann (p,q)-eigenvalue on cusp domains: numeric "
               "solve and analytic bound"};
  app.require_subcommand(1);

  std::string config_path;
  Overrides ov;
  const char* names[] = {"bound", "solve", "verify", "sweep", "mesh-info"};
  for (const char* name : names) {
    add_common_options(app.add_subcommand(name), config_path, ov);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    const RunConfig cfg = build_config(command, config_path, ov);
    if (command == "bound") return cmd_bound(cfg);
    if (command == "solve") return cmd_solve(cfg);
    if (command == "verify") return cmd_verify(cfg);
    if (command == "sweep") return cmd_sweep(cfg);
    return cmd_mesh_info(cfg);
  } catch (const cusp::Error& e) {
    print_error(e);
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
}
