#include "cusp/run_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace cusp {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      throw Error("InvalidConfig",
                  "unknown key \"" + it.key() + "\" in " + where);
    }
  }
}

double get_num(const json& obj, const std::string& key, double fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number()) {
    throw Error("InvalidConfig", "key \"" + key + "\" must be a number");
  }
  return obj[key].get<double>();
}

int get_int(const json& obj, const std::string& key, int fallback) {
  if (!obj.contains(key)) return fallback;
  if (!obj[key].is_number_integer()) {
    throw Error("InvalidConfig", "key \"" + key + "\" must be an integer");
  }
  return obj[key].get<int>();
}

std::vector<double> get_grid(const json& obj, const std::string& key) {
  std::vector<double> out;
  if (!obj.contains(key)) return out;
  if (!obj[key].is_array()) {
    throw Error("InvalidConfig", "key \"" + key + "\" must be an array");
  }
  for (const auto& v : obj[key]) {
    if (!v.is_number()) {
      throw Error("InvalidConfig", "grid \"" + key + "\" must hold numbers");
    }
    out.push_back(v.get<double>());
  }
  return out;
}

void check_positive(double v, const std::string& name) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw Error("InvalidConfig", name + " must be positive and finite");
  }
}

}  // namespace

RunConfig parse_run_config(const json& j) {
  if (!j.is_object()) {
    throw Error("InvalidConfig", "config root must be a JSON object");
  }
  reject_unknown(j,
                 {"command", "domain", "problem", "mesh", "solver", "search",
                  "bound", "slack", "sweep", "out"},
                 "config root");
  RunConfig cfg;
  if (j.contains("command")) cfg.command = j["command"].get<std::string>();
  if (j.contains("out")) cfg.out_dir = j["out"].get<std::string>();
  cfg.slack = get_num(j, "slack", cfg.slack);

  if (j.contains("domain")) {
    const json& d = j["domain"];
    reject_unknown(d, {"gamma1", "n"}, "domain");
    cfg.gamma1 = get_num(d, "gamma1", cfg.gamma1);
    if (get_int(d, "n", 2) != 2) {
      throw Error("InvalidConfig", "only n = 2 is supported");
    }
  }
  if (j.contains("problem")) {
    const json& pr = j["problem"];
    reject_unknown(pr, {"p", "q", "alpha"}, "problem");
    cfg.p = get_num(pr, "p", cfg.p);
    cfg.q = get_num(pr, "q", cfg.q);
    cfg.alpha = get_num(pr, "alpha", cfg.alpha);
  }
  if (j.contains("mesh")) {
    const json& m = j["mesh"];
    reject_unknown(m, {"N", "kappa"}, "mesh");
    cfg.mesh_n = get_int(m, "N", cfg.mesh_n);
    cfg.kappa = get_num(m, "kappa", cfg.kappa);
    if (cfg.mesh_n < 1) throw Error("InvalidConfig", "mesh N must be >= 1");
  }
  if (j.contains("solver")) {
    const json& s = j["solver"];
    reject_unknown(s,
                   {"tol", "weak_tol", "kkt_tol", "max_iters",
                    "inner_max_iters", "eps_min", "eps_rho", "seed"},
                   "solver");
    cfg.solver.tol = get_num(s, "tol", cfg.solver.tol);
    cfg.solver.weak_tol = get_num(s, "weak_tol", cfg.solver.weak_tol);
    cfg.solver.kkt_tol = get_num(s, "kkt_tol", cfg.solver.kkt_tol);
    cfg.solver.max_iters = get_int(s, "max_iters", cfg.solver.max_iters);
    cfg.solver.inner_max_iters =
        get_int(s, "inner_max_iters", cfg.solver.inner_max_iters);
    cfg.solver.eps_min = get_num(s, "eps_min", cfg.solver.eps_min);
    cfg.solver.eps_rho = get_num(s, "eps_rho", cfg.solver.eps_rho);
    cfg.solver.seed = static_cast<unsigned>(
        get_int(s, "seed", static_cast<int>(cfg.solver.seed)));
    check_positive(cfg.solver.tol, "solver.tol");
    check_positive(cfg.solver.weak_tol, "solver.weak_tol");
    check_positive(cfg.solver.kkt_tol, "solver.kkt_tol");
    if (cfg.solver.max_iters < 1 || cfg.solver.inner_max_iters < 1) {
      throw Error("InvalidConfig", "iteration caps must be >= 1");
    }
  }
  if (j.contains("search")) {
    const json& s = j["search"];
    reject_unknown(
        s, {"na", "ns", "nr", "golden_passes", "param_tol", "boundary_pad"},
        "search");
    cfg.search.na = get_int(s, "na", cfg.search.na);
    cfg.search.ns = get_int(s, "ns", cfg.search.ns);
    cfg.search.nr = get_int(s, "nr", cfg.search.nr);
    cfg.search.golden_passes =
        get_int(s, "golden_passes", cfg.search.golden_passes);
    cfg.search.param_tol = get_num(s, "param_tol", cfg.search.param_tol);
    cfg.search.boundary_pad =
        get_num(s, "boundary_pad", cfg.search.boundary_pad);
    if (cfg.search.na < 2 || cfg.search.ns < 2 || cfg.search.nr < 2) {
      throw Error("InvalidConfig", "search grid sizes must be >= 2");
    }
    check_positive(cfg.search.param_tol, "search.param_tol");
  }
  if (j.contains("bound")) {
    const json& b = j["bound"];
    reject_unknown(b, {"b_strategy", "b_value", "b_ref_n"}, "bound");
    if (b.contains("b_strategy")) {
      cfg.b_strategy = b["b_strategy"].get<std::string>();
    }
    cfg.b_value = get_num(b, "b_value", cfg.b_value);
    cfg.b_ref_n = get_int(b, "b_ref_n", cfg.b_ref_n);
    if (cfg.b_strategy != "user" && cfg.b_strategy != "payne_weinberger" &&
        cfg.b_strategy != "numeric_lower") {
      throw Error("InvalidConfig",
                  "bound.b_strategy must be one of user, payne_weinberger, "
                  "numeric_lower");
    }
    if (cfg.b_ref_n < 1) throw Error("InvalidConfig", "bound.b_ref_n >= 1");
    check_positive(cfg.b_value, "bound.b_value");
  }
  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    reject_unknown(s, {"gamma1", "p", "q", "alpha"}, "sweep");
    cfg.sweep_gamma1 = get_grid(s, "gamma1");
    cfg.sweep_p = get_grid(s, "p");
    cfg.sweep_q = get_grid(s, "q");
    cfg.sweep_alpha = get_grid(s, "alpha");
  }
  return cfg;
}

json run_config_to_json(const RunConfig& cfg) {
  json j;
  j["command"] = cfg.command;
  j["domain"] = {{"gamma1", cfg.gamma1}, {"n", 2}};
  j["problem"] = {{"p", cfg.p}, {"q", cfg.q}, {"alpha", cfg.alpha}};
  j["mesh"] = {{"N", cfg.mesh_n}, {"kappa", cfg.kappa}};
  j["solver"] = {{"tol", cfg.solver.tol},
                 {"weak_tol", cfg.solver.weak_tol},
                 {"kkt_tol", cfg.solver.kkt_tol},
                 {"max_iters", cfg.solver.max_iters},
                 {"inner_max_iters", cfg.solver.inner_max_iters},
                 {"eps_min", cfg.solver.eps_min},
                 {"eps_rho", cfg.solver.eps_rho},
                 {"seed", static_cast<int>(cfg.solver.seed)}};
  j["search"] = {{"na", cfg.search.na},
                 {"ns", cfg.search.ns},
                 {"nr", cfg.search.nr},
                 {"golden_passes", cfg.search.golden_passes},
                 {"param_tol", cfg.search.param_tol},
                 {"boundary_pad", cfg.search.boundary_pad}};
  j["bound"] = {{"b_strategy", cfg.b_strategy},
                {"b_value", cfg.b_value},
                {"b_ref_n", cfg.b_ref_n}};
  j["slack"] = cfg.slack;
  j["sweep"] = {{"gamma1", cfg.sweep_gamma1},
                {"p", cfg.sweep_p},
                {"q", cfg.sweep_q},
                {"alpha", cfg.sweep_alpha}};
  j["out"] = cfg.out_dir;
  return j;
}

std::string format_g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void dump_g17_rec(const json& j, std::ostream& os, int indent, int depth) {
  const std::string pad(static_cast<size_t>(depth + 1) * indent, ' ');
  const std::string padc(static_cast<size_t>(depth) * indent, ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad << json(it.key()).dump() << ": ";
        dump_g17_rec(it.value(), os, indent, depth + 1);
      }
      os << "\n" << padc << "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      os << "[\n";
      bool first = true;
      for (const auto& v : j) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        dump_g17_rec(v, os, indent, depth + 1);
      }
      os << "\n" << padc << "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
      } else {
        os << format_g17(v);
      }
      return;
    }
    default:
      os << j.dump();
      return;
  }
}

}  // namespace

std::string dump_json_g17(const json& j, int indent) {
  std::ostringstream os;
  dump_g17_rec(j, os, indent, 0);
  os << "\n";
  return os.str();
}

std::string config_hash(const RunConfig& cfg) {
  const std::string s = dump_json_g17(run_config_to_json(cfg));
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

json eigen_result_to_json(const EigenResult& result, const RunConfig& cfg) {
  json j;
  j["lambda"] = result.lambda;
  j["iterations"] = result.iterations;
  j["mu_trace"] = result.mu_trace;
  j["x_norm_trace"] = result.x_norm_trace;
  j["residual"] = result.residual;
  j["constraint_residual"] = result.constraint_residual;
  j["mesh"] = {{"gamma1", cfg.gamma1},
               {"N", cfg.mesh_n},
               {"kappa", cfg.effective_kappa()}};
  j["problem"] = {{"p", cfg.p}, {"q", cfg.q}, {"alpha", cfg.alpha}};
  return j;
}

json bound_report_to_json(const BoundReport& report) {
  json j;
  j["a"] = report.params.a;
  j["s"] = report.params.s;
  j["r"] = report.params.r;
  j["k_ps"] = report.k_ps;
  j["m_rq"] = report.m_rq;
  j["b_rs"] = report.b_rs;
  j["inv_lambda_bound"] = report.inv_lambda_bound;
  j["lambda_lower_bound"] = report.lambda_lower_bound;
  j["certified"] = report.certified;
  j["provenance"] = report.provenance;
  return j;
}

json make_manifest(const RunConfig& cfg,
                   const std::vector<std::string>& result_files) {
  json j;
  j["tool"] = "cusp-spectra";
  j["version"] = "0.1.0";
  std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ",
                std::gmtime(&now));
  j["generated_at"] = stamp;
  j["input_hash"] = config_hash(cfg);
  j["config"] = run_config_to_json(cfg);
  j["results"] = result_files;
  return j;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw Error("IoError", "cannot open " + tmp.string());
    os << content;
    os.flush();
    if (!os) throw Error("IoError", "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("IoError", "rename failed for " + target.string());
  }
}

}  // namespace cusp
