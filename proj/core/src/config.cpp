#include "nanoplate/config.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "nanoplate/error.hpp"

namespace nanoplate {

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::InvalidConfig, where + ": " + what);
}

void check_keys(const YAML::Node& node, const std::string& where, const std::set<std::string>& allowed) {
  if (!node) return;
  if (!node.IsMap()) bad(where, "expected a mapping");
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) bad(where, "unknown key '" + key + "'");
  }
}

template <class T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& where) {
  if (!node || !node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception& e) {
    bad(where + "." + key, "wrong type (" + std::string(e.what()) + ")");
  }
}

Point read_point(const YAML::Node& node, const std::string& where) {
  if (!node.IsSequence() || node.size() != 2) bad(where, "expected [x, y]");
  return {node[0].as<double>(), node[1].as<double>()};
}

FieldPtr read_field(const YAML::Node& node, const std::string& where, const std::string& base_dir) {
  if (node.IsScalar()) return make_field(node.as<std::string>());
  if (node.IsMap() && node["grid"]) {
    std::filesystem::path p = node["grid"].as<std::string>();
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    return GridField::load(p.string());
  }
  bad(where, "expected a number, an expression in x and y, or {grid: path}");
}

}  // namespace

ExperimentConfig parse_experiment_config(const std::string& text, const std::string& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config is not valid YAML: ") + e.what());
  }
  ExperimentConfig cfg = default_experiment();
  if (!root || root.IsNull()) return cfg;
  try {
    check_keys(root, "config",
               {"domain", "material", "load", "discretization", "kappa", "inverse", "sweep", "ucp", "norms", "output"});

    const auto dom = root["domain"];
    check_keys(dom, "domain", {"Lx", "Ly", "rho0", "M1"});
    read(dom, "Lx", cfg.domain.Lx, "domain");
    read(dom, "Ly", cfg.domain.Ly, "domain");
    read(dom, "rho0", cfg.domain.rho0, "domain");
    read(dom, "M1", cfg.domain.M1, "domain");
    cfg.material.rho0 = cfg.domain.rho0;

    const auto mat = root["material"];
    check_keys(mat, "material", {"t", "l0", "l1", "l2", "alpha0", "gamma0", "mu", "lambda"});
    read(mat, "t", cfg.material.t, "material");
    read(mat, "l0", cfg.material.l0, "material");
    read(mat, "l1", cfg.material.l1, "material");
    read(mat, "l2", cfg.material.l2, "material");
    read(mat, "alpha0", cfg.material.alpha0, "material");
    read(mat, "gamma0", cfg.material.gamma0, "material");
    if (mat && mat["mu"]) cfg.material.mu = read_field(mat["mu"], "material.mu", base_dir);
    if (mat && mat["lambda"]) cfg.material.lambda = read_field(mat["lambda"], "material.lambda", base_dir);

    const auto load = root["load"];
    check_keys(load, "load", {"P0", "f_bar", "d"});
    if (load && load["P0"]) cfg.load.P0 = read_point(load["P0"], "load.P0");
    read(load, "f_bar", cfg.load.f_bar, "load");
    read(load, "d", cfg.load.d, "load");

    const auto disc = root["discretization"];
    check_keys(disc, "discretization", {"degree", "spans", "coef_coarsening", "solver", "threads"});
    read(disc, "degree", cfg.degree, "discretization");
    read(disc, "spans", cfg.spans, "discretization");
    read(disc, "coef_coarsening", cfg.coef_coarsening, "discretization");
    read(disc, "threads", cfg.threads, "discretization");
    if (disc && disc["solver"]) {
      const auto name = disc["solver"].as<std::string>();
      if (name == "direct") {
        cfg.solve.method = LinearSolver::Direct;
      } else if (name == "cg") {
        cfg.solve.method = LinearSolver::ConjugateGradient;
      } else {
        bad("discretization.solver", "expected 'direct' or 'cg'");
      }
    }

    const auto kap = root["kappa"];
    check_keys(kap, "kappa", {"family", "base", "amplitude", "center", "width", "modes", "seed", "expression", "max_draws"});
    if (kap && kap["family"]) cfg.kappa.kind = kappa_family_kind(kap["family"].as<std::string>());
    read(kap, "base", cfg.kappa.base, "kappa");
    read(kap, "amplitude", cfg.kappa.amplitude, "kappa");
    if (kap && kap["center"]) cfg.kappa.center = read_point(kap["center"], "kappa.center");
    read(kap, "width", cfg.kappa.width, "kappa");
    read(kap, "modes", cfg.kappa.modes, "kappa");
    read(kap, "seed", cfg.kappa.seed, "kappa");
    read(kap, "expression", cfg.kappa.expression, "kappa");
    read(kap, "max_draws", cfg.kappa.max_draws, "kappa");

    const auto inv = root["inverse"];
    check_keys(inv, "inverse", {"sigma", "s", "kbar", "alphas", "sample_grid", "include_P0", "mask_threshold"});
    read(inv, "sigma", cfg.sigma, "inverse");
    read(inv, "s", cfg.s, "inverse");
    read(inv, "kbar", cfg.kbar, "inverse");
    read(inv, "alphas", cfg.alphas, "inverse");
    read(inv, "sample_grid", cfg.sample_grid, "inverse");
    read(inv, "include_P0", cfg.include_P0, "inverse");
    read(inv, "mask_threshold", cfg.mask_threshold, "inverse");

    const auto sw = root["sweep"];
    check_keys(sw, "sweep", {"epsilons", "seeds", "shifts"});
    read(sw, "epsilons", cfg.epsilons, "sweep");
    read(sw, "seeds", cfg.seeds, "sweep");
    read(sw, "shifts", cfg.shifts, "sweep");

    const auto uc = root["ucp"];
    check_keys(uc, "ucp", {"enabled", "tau", "margin_factor", "grid", "p", "etas", "disc_cells", "disc_order"});
    read(uc, "enabled", cfg.run_ucp, "ucp");
    read(uc, "tau", cfg.ucp.tau, "ucp");
    read(uc, "margin_factor", cfg.ucp.margin_factor, "ucp");
    read(uc, "grid", cfg.ucp.grid, "ucp");
    read(uc, "p", cfg.ucp.p, "ucp");
    read(uc, "etas", cfg.ucp.etas, "ucp");
    read(uc, "disc_cells", cfg.ucp.disc_cells, "ucp");
    read(uc, "disc_order", cfg.ucp.disc_order, "ucp");

    const auto nm = root["norms"];
    check_keys(nm, "norms", {"volume_cells", "volume_order", "pair_cells", "pair_order", "cutoff", "cutoff_angles"});
    read(nm, "volume_cells", cfg.norms.volume_cells, "norms");
    read(nm, "volume_order", cfg.norms.volume_order, "norms");
    read(nm, "pair_cells", cfg.norms.pair_cells, "norms");
    read(nm, "pair_order", cfg.norms.pair_order, "norms");
    read(nm, "cutoff", cfg.norms.cutoff, "norms");
    read(nm, "cutoff_angles", cfg.norms.cutoff_angles, "norms");
    cfg.norms.rho0 = cfg.domain.rho0;
    cfg.ucp.rho0 = cfg.domain.rho0;
    cfg.ucp.norms = cfg.norms;

    const auto out = root["output"];
    check_keys(out, "output", {"dir"});
    read(out, "dir", cfg.output_dir, "output");
  } catch (const YAML::Exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  NANOPLATE_THROW_IF(!is, ErrorCode::InvalidConfig, "cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  const auto dir = std::filesystem::path(path).parent_path();
  return parse_experiment_config(ss.str(), dir.empty() ? "." : dir.string());
}

}  // namespace nanoplate
