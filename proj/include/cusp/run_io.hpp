#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "cusp/bound_engine.hpp"
#include "cusp/eigensolver.hpp"

namespace cusp {

// One batch-run configuration: domain, problem, mesh, tolerances, bound
// search, B-provider choice, output directory. Unknown keys are rejected.
struct RunConfig {
  std::string command;  // bound | solve | verify | sweep | mesh-info
  double gamma1 = 1.0;
  double p = 2.0;
  double q = 2.0;
  double alpha = 0.0;
  int mesh_n = 32;
  double kappa = -1.0;  // < 0 means default_kappa(gamma1)
  SolverConfig solver;
  SearchConfig search;
  std::string b_strategy = "numeric_lower";
  double b_value = 1.0;
  int b_ref_n = 8;
  double slack = -1.0;  // < 0 means auto: 0 if B certified, else 0.1
  // sweep grids; empty means the scalar value above
  std::vector<double> sweep_gamma1, sweep_p, sweep_q, sweep_alpha;
  std::string out_dir = "out";

  double effective_kappa() const {
    return kappa < 0.0 ? default_kappa(gamma1) : kappa;
  }
};

RunConfig parse_run_config(const nlohmann::json& j);
nlohmann::json run_config_to_json(const RunConfig& cfg);

// FNV-1a over the canonical config dump; manifests change iff configs do.
std::string config_hash(const RunConfig& cfg);

nlohmann::json eigen_result_to_json(const EigenResult& result,
                                    const RunConfig& cfg);
nlohmann::json bound_report_to_json(const BoundReport& report);

nlohmann::json make_manifest(const RunConfig& cfg,
                             const std::vector<std::string>& result_files);

// Write-to-temp then atomic rename; no partial files on failure.
void atomic_write_file(const std::string& path, const std::string& content);

std::string format_g17(double v);

// JSON dump with every double rendered at 17 significant digits.
std::string dump_json_g17(const nlohmann::json& j, int indent = 2);

}  // namespace cusp
