#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nanoplate/config.hpp"
#include "nanoplate/container.hpp"
#include "nanoplate/error.hpp"
#include "nanoplate/harness.hpp"
#include "nanoplate/inverse.hpp"
#include "nanoplate/material.hpp"
#include "nanoplate/norms.hpp"
#include "nanoplate/solver.hpp"
#include "nanoplate/ucp.hpp"

namespace nanoplate {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string dump_solution;
  double epsilon = 0.0;
  int threads = 0;
};

ExperimentConfig load(const Options& o) {
  ExperimentConfig cfg = o.config.empty() ? default_experiment() : load_experiment_config(o.config);
  if (o.seed) {
    cfg.seeds = {*o.seed, *o.seed + 1, *o.seed + 2};
    cfg.kappa.seed = *o.seed;
  }
  if (o.threads > 0) cfg.threads = o.threads;
  if (!o.out.empty()) cfg.output_dir = o.out;
  return cfg;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  NANOPLATE_THROW_IF(!os, ErrorCode::Io, "cannot write '" + path.string() + "'");
  os << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path prepare_out(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  NANOPLATE_THROW_IF(ec, ErrorCode::Io, "cannot create output directory '" + dir + "': " + ec.message());
  return fs::path(dir);
}

FieldPtr truth(const Experiment& ex) { return ex.config().kappa.make(ex.config().domain); }

int run_solve(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load(o);
  const fs::path dir = prepare_out(cfg.output_dir);
  const Experiment ex(cfg);
  const FieldPtr kappa = truth(ex);
  const SparseMatrix M = assemble_kappa_mass(*ex.space(), *kappa);
  const Eigen::VectorXd F = point_load_vector(*ex.space(), cfg.load.P0, cfg.load.f(cfg.domain.rho0), cfg.load.d);
  SolveReport rep;
  const Deflection w = solve_direct(ex.space(), ex.stiffness(), M, F,
                                    {kappa->describe(), material_hash(cfg.material), cfg.load.f(cfg.domain.rho0), cfg.load.P0},
                                    cfg.solve, &rep);
  const Eigen::VectorXd& c = w.coefficients();
  const double energy = c.dot(ex.stiffness() * c + M * c);
  const double work = cfg.load.f(cfg.domain.rho0) * w.value(cfg.load.P0);
  const LoadNeighborhood nb = check_load_neighborhood(w, cfg.load);

  Container box;
  box.put("K", ex.stiffness());
  box.put("M", M);
  box.put("F", F);
  box.put("w", c);
  box.write((dir / "system.bin").string());
  write_deflection(w, o.dump_solution.empty() ? (dir / "solution.bin").string() : o.dump_solution);

  const json report = {
      {"dofs", ex.space()->num_active()},
      {"energy", energy},
      {"load_work", work},
      {"energy_identity_defect", std::abs(energy - work) / std::abs(work)},
      {"relative_residual", rep.relative_residual},
      {"w_P0", nb.w_P0},
      {"sigma_bar_emp", nb.sigma_bar_emp},
      {"load_neighborhood_ok", nb.ok},
      {"kappa", kappa->describe()},
      {"material_hash", w.meta().material_hash},
  };
  write_json(dir / "energy.json", report);
  out << report.dump(2) << '\n';
  return kExitOk;
}

int run_reconstruct(const Options& o, std::ostream& out, std::ostream& err) {
  const ExperimentConfig cfg = load(o);
  const fs::path dir = prepare_out(cfg.output_dir);
  const Experiment ex(cfg);
  const FieldPtr kappa = truth(ex);
  const Deflection w1 = ex.solve(*kappa);
  const std::uint64_t seed = o.seed.value_or(cfg.seeds.front());

  Measurement m = sample_field(w1, sample_grid(cfg.domain, cfg.sample_grid));
  m.sigma = cfg.sigma;
  add_noise(m, o.epsilon, cfg.domain.rho0, cfg.load.f_bar, case_seed(seed, o.epsilon));
  write_measurement_csv(m, (dir / "measurement.csv").string());

  const SweepRecord rec = reconstruct_case(ex, *kappa, w1, o.epsilon, seed);
  if (rec.degenerate) {
    write_json(dir / "reconstruction.json", {{"case", rec.to_json()}});
    err << "error: " << rec.note << '\n';
    return kExitNumeric;
  }
  // Rebuild the chosen reconstruction for the kappa grid.
  const Deflection wm = perturbed_measurement(ex, w1, o.epsilon, seed);
  ReconstructionOptions ro;
  ro.sigma = cfg.sigma;
  ro.include_P0 = cfg.include_P0;
  ro.exclusion_radius = 0.5 * check_load_neighborhood(w1, cfg.load).sigma_bar_emp;
  ro.kbar = cfg.kbar;
  ro.mask_threshold = cfg.mask_threshold;
  const ReconstructionResult res = reconstruct_kappa(wm, cfg.load, cfg.material, ex.coef_space(), rec.alpha, ro);
  write_field_grid_csv(*res.kappa, cfg.domain, 41, (dir / "kappa_hat.csv").string());
  json diag = res.to_json();
  diag["case"] = rec.to_json();
  write_json(dir / "reconstruction.json", diag);
  out << rec.to_json().dump(2) << '\n';
  return kExitOk;
}

int run_sweep(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load(o);
  const fs::path dir = prepare_out(cfg.output_dir);
  const StabilityReport report = stability_sweep(cfg);
  write_json(dir / "stability_report.json", report.to_json());
  std::string csv = "epsilon,seed,error,relative_error,alpha,noise_level,residual,mask_fraction,sigma,degenerate\n";
  for (const auto& r : report.records) {
    std::ostringstream row;
    row.precision(17);
    row << r.epsilon << ',' << r.seed << ',' << r.error << ',' << r.relative_error << ',' << r.alpha << ','
        << r.noise_level << ',' << r.residual << ',' << r.mask_fraction << ',' << r.sigma << ','
        << (r.degenerate ? 1 : 0) << '\n';
    csv += row.str();
  }
  write_text(dir / "sweep.csv", csv);
  write_text(dir / "sweep.svg", sweep_plot_svg(report));
  out << json{{"slope", report.fit.slope},
              {"slope_in_range", report.slope_in_range},
              {"monotone", report.monotone},
              {"key_estimate_pass", report.key.pass}}
             .dump(2)
      << '\n';
  return kExitOk;
}

int run_ucp(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load(o);
  const fs::path dir = prepare_out(cfg.output_dir);
  const Experiment ex(cfg);
  const Deflection w = ex.solve(*truth(ex));
  const LoadNeighborhood nb = check_load_neighborhood(w, cfg.load);
  const Region U = Region::rect_minus_disc(cfg.domain.rect(), cfg.load.P0, nb.sigma_bar_emp);
  UCProbeConfig uc = cfg.ucp;
  uc.threads = cfg.threads;
  const UCReport rep = run_uc_checks(w, U, uc);
  write_json(dir / "ucp.json", rep.to_json());
  write_text(dir / "ucp.csv", rep.to_csv());
  out << json{{"propagation_constant", rep.propagation.constant},
              {"ap_constant", rep.ap_value()},
              {"frequency_ratio", rep.frequency_ratio}}
             .dump(2)
      << '\n';
  return kExitOk;
}

int run_norms(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load(o);
  const fs::path dir = prepare_out(cfg.output_dir);
  const Experiment ex(cfg);
  const Deflection w = ex.solve(*truth(ex));
  NormConfig nc = cfg.norms;
  nc.threads = cfg.threads;
  const Region omega = Region::rectangle(cfg.domain.rect());
  const Region inner = ex.interior();
  const LoadNeighborhood nb = check_load_neighborhood(w, cfg.load);
  const Region ring = Region::annulus(cfg.load.P0, nb.sigma_bar_emp, 2.0 * nb.sigma_bar_emp);
  json recs = json::array();
  recs.push_back(norm_record("L2", omega, l2_norm(w, omega, nc), nc));
  for (int k = 1; k <= 3; ++k) recs.push_back(norm_record("H" + std::to_string(k), omega, hk_norm(w, k, omega, nc), nc));
  recs.push_back(norm_record("L2", inner, l2_norm(w, inner, nc), nc));
  recs.push_back(norm_record("seminorm_s0.5", inner, fractional_seminorm(w, 0.5, inner, nc), nc));
  recs.push_back(norm_record("frequency_ratio", ring, frequency_ratio(w, ring, nc), nc));
  const InterpolationDiagnostic id = interpolation_diagnostic(w, cfg.s, inner, nc);
  json report = {{"records", recs},
                 {"interpolation",
                  {{"available", id.available}, {"reason", id.reason}, {"log_C", id.log_C}}}};
  write_json(dir / "norms.json", report);
  out << report.dump(2) << '\n';
  return kExitOk;
}

int run_material_check(const Options& o, std::ostream& out) {
  const ExperimentConfig cfg = load(o);
  const fs::path dir = prepare_out(cfg.output_dir);
  json pts = json::array();
  double xi_p = std::numeric_limits<double>::infinity();
  double xi_q = xi_p;
  const int n = 5;
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const Point x{cfg.domain.Lx * i / (n - 1), cfg.domain.Ly * j / (n - 1)};
      cfg.material.check_point(x);
      const DerivedCoefficients d = derived_coefficients(cfg.material, x);
      const ConvexityConstants c = verify_convexity(build_tensors(cfg.material, x), cfg.material);
      xi_p = std::min(xi_p, c.xi_P);
      xi_q = std::min(xi_q, c.xi_Q);
      pts.push_back({{"x", {x.x, x.y}},
                     {"E", d.E},
                     {"nu", d.nu},
                     {"B", d.B_stiff},
                     {"a", {d.scale.a0, d.scale.a1, d.scale.a2}},
                     {"b", {d.scale.b0, d.scale.b1}},
                     {"xi_P", c.xi_P},
                     {"xi_Q", c.xi_Q}});
    }
  const json report = {{"points", pts}, {"xi_P_min", xi_p}, {"xi_Q_min", xi_q}, {"convex", xi_p > 0 && xi_q > 0}};
  write_json(dir / "material.json", report);
  out << json{{"xi_P_min", xi_p}, {"xi_Q_min", xi_q}}.dump(2) << '\n';
  return kExitOk;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strain-gradient nanoplate laboratory: direct solves, foundation reconstruction, stability sweeps"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "YAML experiment description");
    sub->add_option("--out", o.out, "output directory (default: output.dir of the config)");
    sub->add_option("--seed", o.seed, "override the configured seeds");
    sub->add_option("--threads", o.threads, "worker threads (0 keeps the configured value)");
  };
  CLI::App* solve = app.add_subcommand("solve", "solve the point-load problem and report the energy identity");
  common(solve);
  solve->add_option("--dump-solution", o.dump_solution, "write the deflection container to this path");
  CLI::App* recon = app.add_subcommand("reconstruct", "reconstruct the foundation modulus from synthetic data");
  common(recon);
  recon->add_option("--epsilon", o.epsilon, "normalized noise level")->check(CLI::NonNegativeNumber);
  CLI::App* sweep = app.add_subcommand("sweep", "run the noise-level stability sweep");
  common(sweep);
  CLI::App* ucp = app.add_subcommand("ucp", "unique-continuation surrogates on the default case");
  common(ucp);
  CLI::App* norms = app.add_subcommand("norms", "norm suite of the deflection");
  common(norms);
  CLI::App* mat = app.add_subcommand("material-check", "tensor coefficients and convexity constants");
  common(mat);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*solve) return run_solve(o, out);
    if (*recon) return run_reconstruct(o, out, err);
    if (*sweep) return run_sweep(o, out);
    if (*ucp) return run_ucp(o, out);
    if (*norms) return run_norms(o, out);
    if (*mat) return run_material_check(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.is_numeric() ? kExitNumeric : kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitUsage;
}

}  // namespace nanoplate
