// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "nanoplate/discretization.hpp"
#include "nanoplate/harness.hpp"
#include "nanoplate/inverse.hpp"
#include "nanoplate/material.hpp"
#include "nanoplate/norms.hpp"
#include "nanoplate/solver.hpp"
#include "nanoplate/ucp.hpp"
#include "support.hpp"

namespace nanoplate {
namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double kd(int i, int j) { return i == j ? 1.0 : 0.0; }

struct Draw {
  MaterialParams params;
  double mu, lambda;
};

Draw random_material(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.5, 3.0), len(0.02, 0.3);
  Draw d;
  d.mu = u(rng);
  d.lambda = std::uniform_real_distribution<double>(-0.5 * d.mu, 3.0)(rng);
  d.params = testing::material(d.mu, d.lambda);
  d.params.t = len(rng);
  d.params.l0 = len(rng);
  d.params.l1 = len(rng);
  d.params.l2 = len(rng);
  d.params.gamma0 = std::min(0.5, 2 * d.mu + 3 * d.lambda);
  return d;
}

// Contractions of the library tensors against the literal delta formulas on
// symmetric arguments, plus invariance of the Q energy under the split.
Outcome tensor_oracles() {
  std::mt19937_64 rng(101);
  std::normal_distribution<double> n;
  std::uniform_real_distribution<double> frac(-1.0, 2.0);
  double worst = 0.0, worst_split = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const Draw d = random_material(rng);
    const MaterialParams& p = d.params;
    const TensorTriple T = build_tensors(p, {0.5, 0.5});
    const double E = d.mu * (2 * d.mu + 3 * d.lambda) / (d.mu + d.lambda);
    const double nu = d.lambda / (2 * (d.mu + d.lambda));
    const double B = p.t * p.t * p.t * E / (12 * (1 - nu * nu));
    const double a0 = 2 * d.mu * p.t * p.l0 * p.l0;
    const double a1 = 2.0 / 15.0 * d.mu * p.t * p.l1 * p.l1;
    const double a2 = d.mu * p.t * p.l2 * p.l2;
    const double t3 = p.t * p.t * p.t / 12.0;
    const double b0 = 2 * d.mu * t3 * p.l0 * p.l0;
    const double b1 = 0.4 * d.mu * t3 * p.l1 * p.l1;

    const Tensor2 A = hessian_tensor(n(rng), n(rng), n(rng));
    const Tensor2 PA = apply_rank4(T.P + T.Ph, A);
    for (int al = 0; al < 2; ++al)
      for (int be = 0; be < 2; ++be) {
        double want = 0.0;
        for (int ga = 0; ga < 2; ++ga)
          for (int de = 0; de < 2; ++de)
            want += (B * ((1 - nu) * kd(al, ga) * kd(be, de) + nu * kd(al, be) * kd(ga, de)) +
                     (2 * a2 + 5 * a1) * kd(al, ga) * kd(be, de) + (a0 - a1 - a2) * kd(al, be) * kd(ga, de)) *
                    A(ga, de);
        worst = std::max(worst, std::fabs(PA(al, be) - want) / (std::fabs(want) + B + a0 + a1 + a2));
      }

    const Tensor3 G = third_gradient_tensor(n(rng), n(rng), n(rng), n(rng));
    const Tensor3 QG = apply_rank6(T.Q, G);
    const double q8 = 1.5 * b1, q9 = 0.5 * b1;
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int k = 0; k < 2; ++k) {
          double want = 0.0;
          for (int l = 0; l < 2; ++l)
            for (int m = 0; m < 2; ++m)
              for (int nn = 0; nn < 2; ++nn) {
                const double q =
                    (b0 - 3 * b1) / 3 * kd(i, j) * kd(k, nn) * kd(l, m) +
                    (b0 - 3 * b1) / 6 *
                        (kd(i, k) * (kd(j, l) * kd(m, nn) + kd(j, m) * kd(l, nn)) +
                         kd(j, k) * (kd(i, l) * kd(m, nn) + kd(i, m) * kd(l, nn))) +
                    q8 * kd(k, nn) * (kd(i, l) * kd(j, m) + kd(i, m) * kd(j, l)) +
                    q9 * (kd(j, nn) * (kd(i, l) * kd(k, m) + kd(i, m) * kd(k, l)) +
                          kd(i, nn) * (kd(j, l) * kd(k, m) + kd(j, m) * kd(k, l)));
                want += q * G(l, m, nn);
              }
          worst = std::max(worst, std::fabs(QG(i, j, k) - want) / (std::fabs(want) + b0 + b1));
        }

    const double alt_q8 = frac(rng) * 2.5 * b1;
    const TensorTriple alt = build_tensors(p, {0.5, 0.5}, QSplit{alt_q8, (2.5 * b1 - alt_q8) / 2.0});
    const double e0 = inner(QG, G), e1 = inner(apply_rank6(alt.Q, G), G);
    worst_split = std::max(worst_split, std::fabs(e0 - e1) / std::fabs(e0));
  }
  return {worst <= 1e-13 && worst_split <= 1e-12,
          fmt("100 draws: max contraction defect %.2e, Q-split energy defect %.2e", worst, worst_split)};
}

Outcome convexity() {
  std::mt19937_64 rng(202);
  double lo_p = std::numeric_limits<double>::infinity(), lo_q = lo_p;
  for (int trial = 0; trial < 20; ++trial) {
    const Draw d = random_material(rng);
    const ConvexityConstants c = verify_convexity(build_tensors(d.params, {0.5, 0.5}), d.params);
    lo_p = std::min(lo_p, c.xi_P);
    lo_q = std::min(lo_q, c.xi_Q);
  }
  return {lo_p > 0 && lo_q > 0, fmt("20 draws: min xi_P %.3e, min xi_Q %.3e", lo_p, lo_q)};
}

Outcome manufactured() {
  const double e16 = testing::mms_error(16), e32 = testing::mms_error(32);
  const double order = std::log2(e16 / e32);
  return {order >= 3.0, fmt("interior L2 error %.3e (16^2) -> %.3e (32^2), order %.2f", e16, e32, order)};
}

Outcome energy_identity() {
  const ExperimentConfig cfg = default_experiment();
  const Experiment ex(cfg);
  const FieldPtr kappa = cfg.kappa.make(cfg.domain);
  const Deflection w = ex.solve(*kappa);
  const SparseMatrix M = assemble_kappa_mass(*ex.space(), *kappa);
  const Eigen::VectorXd& c = w.coefficients();
  const double energy = c.dot(ex.stiffness() * c + M * c);
  const double work = cfg.load.f(cfg.domain.rho0) * w.value(cfg.load.P0);
  const double defect = testing::relative(energy, work);
  return {defect <= 1e-8, fmt("w.(K+M)w %.10e vs f w(P0) %.10e, relative defect %.2e", energy, work, defect)};
}

Outcome symmetry() {
  const SpacePtr s = build_space(PlateDomain{}, 5, 32, 32);
  const Deflection w = solve_plate(s, testing::material(), ConstantField(2.0), LoadCase{});
  double defect = 0.0, scale = 0.0;
  for (int j = 0; j <= 40; ++j)
    for (int i = 0; i <= 40; ++i) {
      const double x = i / 40.0, y = j / 40.0, v = w.value({x, y});
      scale = std::max(scale, std::fabs(v));
      for (Point q : {Point{y, x}, Point{1 - x, y}, Point{x, 1 - y}, Point{1 - x, 1 - y}, Point{1 - y, 1 - x}})
        defect = std::max(defect, std::fabs(w.value(q) - v));
    }
  return {defect <= 1e-10 * scale, fmt("max dihedral defect %.2e relative to max|w|", defect / scale)};
}

Outcome load_neighborhood() {
  std::ostringstream os;
  bool ok = true;
  const SpacePtr s = build_space(PlateDomain{}, 5, 32, 32);
  for (double d : {0.2, 0.3, 0.4}) {
    LoadCase load;
    load.d = d;
    const Deflection w = solve_plate(s, testing::material(), ConstantField(2.0), load);
    const LoadNeighborhood nb = check_load_neighborhood(w, load);
    // Independent ring sampling of the disc the check reports.
    double lowest = std::numeric_limits<double>::infinity();
    for (int r = 1; r <= 40; ++r)
      for (int a = 0; a < 180; ++a) {
        const double rad = nb.sigma_bar_emp * r / 40.0, th = 2 * std::numbers::pi * a / 180.0;
        lowest = std::min(lowest, w.value({load.P0.x + rad * std::cos(th), load.P0.y + rad * std::sin(th)}));
      }
    ok = ok && nb.ok && nb.w_P0 > 0 && nb.sigma_bar_emp > 0 && lowest >= 0.5 * nb.w_P0 * (1 - 1e-9);
    if (d > 0.2) os << "; ";
    os << fmt("d=%.1f: w(P0) %.4f, radius %.4f, min/w(P0) %.3f", d, nb.w_P0, nb.sigma_bar_emp, lowest / nb.w_P0);
  }
  return {ok, os.str()};
}

Outcome closed_loop() {
  const ExperimentConfig cfg = default_experiment();
  const Experiment ex(cfg);
  const FieldPtr smooth = cfg.kappa.make(cfg.domain);
  const auto in_span = project_coefficient(*smooth, ex.coef_space());
  const Region inner = interior_region(cfg.domain, cfg.sigma * cfg.domain.rho0);
  auto error = [&](const ScalarField& truth) {
    const Deflection w = ex.solve(truth);
    ReconstructionOptions ro;
    ro.sigma = cfg.sigma;
    ro.kbar = cfg.kbar;
    ro.exclusion_radius = 0.5 * check_load_neighborhood(w, cfg.load).sigma_bar_emp;
    const ReconstructionResult r = reconstruct_kappa(w, cfg.load, cfg.material, ex.coef_space(), 1e-12, ro);
    const LinearCombinationField diff(1.0, r.kappa, -1.0,
                                      std::shared_ptr<const ScalarField>(&truth, [](const ScalarField*) {}));
    return l2_norm(diff, inner) / l2_norm(truth, inner);
  };
  const double a = error(*in_span), b = error(*smooth);
  return {a <= 1e-6 && b <= 1e-2, fmt("relative interior error: in span %.2e, smooth bump %.2e", a, b)};
}

StabilityReport single_thread_sweep() {
  ExperimentConfig cfg = default_experiment();
  cfg.threads = 1;
  return stability_sweep(cfg);
}

Outcome stability(const StabilityReport& r) {
  std::ostringstream os;
  os << fmt("slope %.3f, mean errors", r.fit.slope);
  for (std::size_t i = 0; i < r.level_error.size(); ++i) os << fmt(" %.3g@%.0e", r.level_error[i], r.level_epsilon[i]);
  os << (r.monotone ? " (monotone)" : " (not monotone)");
  os << fmt("; key estimate slope %.3f vs required %.4f", r.key.fitted_slope, r.key.required_slope);
  return {r.slope_in_range && r.monotone && r.key.pass, os.str()};
}

// Drift is checked across two successive refinements, 16 -> 32 -> 64 spans.
Outcome uc_surrogates() {
  const UCReport r16 = testing::uc_default_case(16), r32 = testing::uc_default_case(32),
                 r64 = testing::uc_default_case(64);
  double dp = 0.0, da = 0.0;
  for (const auto& [a, b] : {std::pair{&r16, &r32}, std::pair{&r32, &r64}}) {
    dp = std::max(dp, testing::relative(a->propagation.constant, b->propagation.constant));
    da = std::max(da, testing::relative(a->ap_value(), b->ap_value()));
  }
  std::ostringstream os;
  os << fmt("propagation %.4e (max drift %.1e), A_2 %.4f (max drift %.1e), floor sensitivity", r64.propagation.constant,
            dp, r64.ap_value(), da);
  for (const ApConstant& ap : r64.ap) os << fmt(" %.4f@%.0e", ap.value, ap.eta);
  os << fmt(", frequency ratio %.3f", r64.frequency_ratio);
  const bool positive = r16.propagation.constant > 0 && r32.propagation.constant > 0 && r64.propagation.constant > 0;
  const bool finite = std::isfinite(r16.ap_value()) && std::isfinite(r32.ap_value()) && std::isfinite(r64.ap_value());
  return {positive && finite && dp < 0.1 && da < 0.1, os.str()};
}

Outcome norm_suite() {
  const Region square = Region::rectangle({0.0, 0.0, 1.0, 1.0});
  const double got = fractional_seminorm(*testing::sin_pi_x(), 0.5, square);
  const double mc = testing::monte_carlo_seminorm(*testing::sin_pi_x(), 0.5, square, 4'000'000, 2024);
  const double rel = testing::relative(got, mc);
  double unit = 0.0;
  for (double rho0 : {0.5, 1.0, 2.0}) {
    NormConfig cfg;
    cfg.rho0 = rho0;
    const Region omega = Region::rectangle({0.0, 0.0, rho0, rho0});
    const ConstantField one(1.0);
    unit = std::max(unit, std::fabs(l2_norm(one, omega, cfg) - 1.0));
    for (int k = 1; k <= 3; ++k) unit = std::max(unit, std::fabs(hk_norm(one, k, omega, cfg) - 1.0));
  }
  return {rel <= 0.05 && unit <= 1e-13,
          fmt("[sin(pi x)]_1/2 quadrature %.5f vs Monte Carlo %.5f (%.2f%%); unit-function defect %.1e", got, mc,
              100 * rel, unit)};
}

Outcome determinism(const StabilityReport& first) {
  const std::string a = first.to_json().dump(2);
  const std::string b = single_thread_sweep().to_json().dump(2);
  return {a == b, fmt("two single-threaded sweeps: %zu-byte reports %s", a.size(), a == b ? "identical" : "differ")};
}

}  // namespace
}  // namespace nanoplate

int main() {
  using namespace nanoplate;
  int failures = 0;
  // budget: allowed runtime in seconds, 0 for none.
  auto run = [&](int id, const char* name, double budget, const std::function<Outcome()>& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (budget > 0 && secs > budget) {
      o.pass = false;
      o.detail += fmt(" [over the %.0f s budget]", budget);
    }
    if (!o.pass) ++failures;
    std::printf("%s %2d %-27s %6.1fs  %s\n", o.pass ? "PASS" : "FAIL", id, name, secs, o.detail.c_str());
    std::fflush(stdout);
  };
  StabilityReport sweep;
  bool have_sweep = false;
  run(1, "tensor-oracle-equivalence", 5, tensor_oracles);
  run(2, "convexity", 5, convexity);
  run(3, "manufactured-solution", 60, manufactured);
  run(4, "energy-identity", 30, energy_identity);
  run(5, "symmetry", 0, symmetry);
  run(6, "load-neighborhood", 0, load_neighborhood);
  run(7, "closed-loop-reconstruction", 120, closed_loop);
  run(8, "stability-sweep", 600, [&] {
    sweep = single_thread_sweep();
    have_sweep = true;
    return stability(sweep);
  });
  run(9, "uc-surrogates", 300, uc_surrogates);
  run(10, "norm-suite", 0, norm_suite);
  run(11, "determinism", 0, [&] {
    if (!have_sweep) return Outcome{false, "first sweep did not complete"};
    return determinism(sweep);
  });
  std::printf("%d of 11 criteria passed\n", 11 - failures);
  return failures == 0 ? 0 : 1;
}
