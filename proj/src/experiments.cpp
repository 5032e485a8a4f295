#include "hydrolim/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <sstream>

#include "hydrolim/clt.hpp"
#include "hydrolim/dynamics.hpp"
#include "hydrolim/free_energy.hpp"
#include "hydrolim/lsi.hpp"
#include "hydrolim/pde.hpp"

namespace hydrolim {

bool ExperimentReport::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names{"gram-scan",  "convexity-scan", "cramer-scan",
                                              "free-energy", "lsi-bound",     "splinetest",
                                              "simulate",    "pde",           "hydro-compare"};
  return names;
}

namespace {

// ---------------------------------------------------------------------------
// Configuration access with type checking.

class Config {
 public:
  Config(const Json& j, std::set<std::string> allowed) : j_(j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    allowed.insert({"experiment", "potential", "seed", "output", "tolerances", "description"});
    for (const auto& [key, value] : j.items())
      if (!allowed.count(key)) throw ConfigError("unknown config key '" + key + "'");
    if (j.contains("tolerances") && !j["tolerances"].is_object())
      throw ConfigError("'tolerances' must be an object");
  }

  const Json& raw() const { return j_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  double num(const std::string& key, double def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number()) throw ConfigError("'" + key + "' must be a number");
    return j_[key].get<double>();
  }
  int integer(const std::string& key, int def, int min = 1) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_number_integer()) throw ConfigError("'" + key + "' must be an integer");
    const int v = j_[key].get<int>();
    if (v < min) throw ConfigError("'" + key + "' must be >= " + std::to_string(min));
    return v;
  }
  std::vector<int> ints(const std::string& key, std::vector<int> def, int min = 1) const {
    if (!j_.contains(key)) return def;
    const Json& a = j_[key];
    if (a.is_number_integer()) {
      def = {a.get<int>()};
    } else if (a.is_array()) {
      def.clear();
      for (const auto& v : a) {
        if (!v.is_number_integer()) throw ConfigError("'" + key + "' must hold integers");
        def.push_back(v.get<int>());
      }
    } else {
      throw ConfigError("'" + key + "' must be an integer or an array of integers");
    }
    if (def.empty()) throw ConfigError("'" + key + "' must be nonempty");
    for (int v : def)
      if (v < min) throw ConfigError("'" + key + "' entries must be >= " + std::to_string(min));
    return def;
  }
  std::vector<double> nums(const std::string& key, std::vector<double> def) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_array()) throw ConfigError("'" + key + "' must be an array of numbers");
    def.clear();
    for (const auto& v : j_[key]) {
      if (!v.is_number()) throw ConfigError("'" + key + "' must hold numbers");
      def.push_back(v.get<double>());
    }
    return def;
  }
  std::string str(const std::string& key, const std::string& def,
                  const std::vector<std::string>& choices) const {
    if (!j_.contains(key)) return def;
    if (!j_[key].is_string()) throw ConfigError("'" + key + "' must be a string");
    const std::string v = j_[key].get<std::string>();
    if (std::find(choices.begin(), choices.end(), v) == choices.end()) {
      std::string msg = "'" + key + "' must be one of:";
      for (const auto& c : choices) msg += " " + c;
      throw ConfigError(msg);
    }
    return v;
  }
  double tol(const std::string& key, double def) const {
    if (!j_.contains("tolerances") || !j_["tolerances"].contains(key)) return def;
    const Json& v = j_["tolerances"][key];
    if (!v.is_number() || v.get<double>() <= 0.0)
      throw ConfigError("tolerance '" + key + "' must be a positive number");
    return v.get<double>();
  }
  std::uint64_t seed() const {
    if (!j_.contains("seed")) return 1;
    const Json& s = j_["seed"];
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("'seed' must be a nonnegative integer");
    return j_["seed"].get<std::uint64_t>();
  }
  SingleSitePotential potential() const {
    return parse_potential(j_.contains("potential") ? j_["potential"] : Json());
  }
  Profile profile(const std::string& key, const Json& def) const {
    return parse_profile(j_.contains(key) ? j_[key] : def);
  }

 private:
  const Json& j_;
};

Json default_sine(double amplitude, double phase = 0.0) {
  return Json{{"mean", 0.0}, {"amplitude", amplitude}, {"mode", 1}, {"phase", phase}};
}

// ---------------------------------------------------------------------------
// Report helpers.

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

void check_less(ExperimentReport& r, const std::string& name, double value, double bound) {
  r.checks.push_back({name, value, "< " + fmt(bound), value < bound});
}

void check_greater(ExperimentReport& r, const std::string& name, double value, double bound) {
  r.checks.push_back({name, value, "> " + fmt(bound), value > bound});
}

void check_near(ExperimentReport& r, const std::string& name, double value, double target,
                double tol) {
  r.checks.push_back({name, value, fmt(target) + " +- " + fmt(tol),
                      std::abs(value - target) <= tol});
}

void check_flag(ExperimentReport& r, const std::string& name, bool ok, const std::string& rule) {
  r.checks.push_back({name, ok ? 1.0 : 0.0, rule, ok});
}

const ScalingFit& add_fit(ExperimentReport& r, const std::string& name,
                          const std::vector<double>& x, const std::vector<double>& y) {
  return r.fits[name] = fit_slope(x, y);
}

bool strictly_decreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i)
    if (!(v[i] < v[i - 1])) return false;
  return true;
}

std::vector<double> as_double(const std::vector<int>& v) { return {v.begin(), v.end()}; }

// ---------------------------------------------------------------------------
// Experiments.

ExperimentReport gram_scan(const Config& c) {
  const auto Ls = c.ints("L", {1, 2}, 0);
  const auto Js = c.ints("J", {4, 8, 16, 32, 64});
  const auto Ks = c.ints("K", {8, 16, 32, 64});
  const int M = c.integer("M", 4);
  const double slope_tol = c.tol("slope", 0.1), exact_tol = c.tol("exact", 1e-14);

  ExperimentReport r;
  r.verifies = "The Gram matrix of block-averaged Legendre polynomials deviates from the "
               "identity by O(1/J^2), exactly 1/J^2 for L = 1; the spline projection satisfies "
               "|P N P^t - id| = O(1/K^2).";
  Table gram{"gram", {"L", "J", "deviation", "inverse_J_squared"}, {}};
  Table pnpt{"pnpt", {"L", "M", "K", "deviation"}, {}};
  for (int L : Ls) {
    std::vector<double> dev;
    double worst_abs = 0.0;
    for (int J : Js) {
      const double d = gram_qjqt(J, L).deviation;
      dev.push_back(d);
      gram.rows.push_back({double(L), double(J), d, 1.0 / (double(J) * J)});
      worst_abs = std::max(worst_abs, std::abs(d - 1.0 / (double(J) * J)));
    }
    std::vector<double> pdev;
    for (int K : Ks) {
      pdev.push_back(pnpt_deviation(M, K, L));
      pnpt.rows.push_back({double(L), double(M), double(K), pdev.back()});
    }
    const std::string tag = "L" + std::to_string(L);
    if (L == 0) {
      check_less(r, "gram_" + tag + "_identity", *std::max_element(dev.begin(), dev.end()), 1e-14);
      check_less(r, "pnpt_" + tag + "_identity", *std::max_element(pdev.begin(), pdev.end()),
                 1e-13);
      continue;
    }
    if (L == 1) check_less(r, "gram_L1_exact_inverse_square", worst_abs, exact_tol);
    if (Js.size() >= 3)
      check_near(r, "gram_" + tag + "_slope", add_fit(r, "gram_" + tag, as_double(Js), dev).slope,
                 -2.0, slope_tol);
    if (Ks.size() >= 3)
      check_near(r, "pnpt_" + tag + "_slope",
                 add_fit(r, "pnpt_" + tag, as_double(Ks), pdev).slope, -2.0, slope_tol);
  }
  r.tables = {gram, pnpt};
  return r;
}

ExperimentReport convexity_scan_experiment(const Config& c) {
  auto pot = c.potential();
  const auto Js = c.ints("J", {32, 64});
  const auto Ls = c.ints("L", {1}, 0);
  const double radius = c.num("radius", 3.0);
  const int steps = c.integer("steps", 5, 2);
  const double band = c.tol("band_ratio", 2.0), schur_tol = c.tol("schur", 1e-6);
  if (c.has("spline") && !c.raw()["spline"].is_object())
    throw ConfigError("'spline' must be an object");

  ExperimentReport r;
  r.verifies = "The coarse-grained block free energy psi_J is uniformly strictly convex for "
               "large blocks, and so is the spline-projected energy bar H on a grid of "
               "spline coefficients.";
  Table certs{"certificates", {"J", "L", "lambda", "Lambda", "points"}, {}};
  for (int L : Ls) {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (int J : Js) {
      ConvexityCertificate cert = convexity_scan(pot, J, L, radius, steps);
      certs.rows.push_back({double(J), double(L), cert.lambda, cert.Lambda, double(cert.points)});
      const std::string tag = "J" + std::to_string(J) + "_L" + std::to_string(L);
      check_greater(r, "lambda_" + tag, cert.lambda, 0.0);
      lo = std::min(lo, cert.lambda);
      hi = std::max(hi, cert.Lambda);
    }
    // One band [lambda, Lambda] for all J: the extremes stay within a fixed ratio.
    check_less(r, "band_ratio_L" + std::to_string(L), hi / lo, band);
  }
  r.tables.push_back(certs);

  if (c.has("spline")) {
    const Json& s = c.raw()["spline"];
    for (const auto& [key, v] : s.items())
      if (key != "M" && key != "K" && key != "L" && key != "grid")
        throw ConfigError("unknown key 'spline." + key + "'");
    const int M = s.value("M", 2), K = s.value("K", 16), L = s.value("L", 1);
    std::vector<double> grid = s.value("grid", std::vector<double>{-1.0, 0.0, 1.0});
    if (M < 1 || K < 1 || L < 0 || grid.empty()) throw ConfigError("invalid 'spline' block");
    SplineEnergy se(pot, K * M, M, L);
    Table hess{"spline_hessian", {}, {}};
    for (int j = 0; j < M; ++j) hess.columns.push_back("y" + std::to_string(j + 1));
    hess.columns.insert(hess.columns.end(), {"eig_min", "eig_max"});
    const long total = static_cast<long>(std::pow(grid.size(), M));
    double emin = std::numeric_limits<double>::infinity(), schur = 0.0;
    for (long idx = 0; idx < total; ++idx) {
      Eigen::VectorXd y(M);
      long rem = idx;
      for (int j = 0; j < M; ++j) {
        y(j) = grid[rem % grid.size()];
        rem /= static_cast<long>(grid.size());
      }
      SplineEnergyEval e = se.evaluate(y, 2);
      Eigen::VectorXd ev = se.l2_eigenvalues(e.eval.hessian);
      emin = std::min(emin, ev.minCoeff());
      if (pot.is_gaussian())
        schur = std::max(schur, (e.eval.hessian - se.gaussian_schur_hessian()).norm());
      std::vector<double> row(y.data(), y.data() + M);
      row.push_back(ev.minCoeff());
      row.push_back(ev.maxCoeff());
      hess.rows.push_back(row);
    }
    check_greater(r, "spline_hessian_min_eigenvalue", emin, 0.0);
    if (pot.is_gaussian()) check_less(r, "spline_hessian_gaussian_schur", schur, schur_tol);
    r.tables.push_back(hess);
  }
  return r;
}

ExperimentReport cramer_scan(const Config& c) {
  auto pot = c.potential();
  const auto Js = c.ints("J", {8, 16, 32, 64});
  const auto Ls = c.ints("L", {0, 1, 2}, 0);
  const auto Jd = c.ints("direct_J", {3, 4, 5, 6}, 2);
  const double beta0 = c.num("beta", 0.3);
  const double slope_tol = c.tol("slope", 0.2), direct_tol = c.tol("direct", 1e-4);

  ExperimentReport r;
  r.verifies = "Local Cramer theorem: the canonical block free energy psi_J and its "
               "grand-canonical counterpart bar psi_J differ by O(1/J); the Fourier-inversion "
               "pipeline agrees with direct integration over the fibre.";
  Table gap{"gap", {"L", "J", "grand_canonical", "canonical", "gap"}, {}};
  for (int L : Ls) {
    std::vector<double> g;
    for (int J : Js) {
      BlockFreeEnergy b(pot, J, L);
      Eigen::VectorXd beta = Eigen::VectorXd::Constant(L + 1, beta0);
      const double gc = b.legendre(beta, 0).eval.value;
      const double can = b.canonical(beta, 0).value;
      g.push_back(std::abs(gc - can));
      gap.rows.push_back({double(L), double(J), gc, can, g.back()});
    }
    if (Js.size() >= 3)
      check_near(r, "gap_slope_L" + std::to_string(L),
                 add_fit(r, "gap_L" + std::to_string(L), as_double(Js), g).slope, -1.0,
                 slope_tol);
  }
  Table direct{"direct", {"J", "cramer", "direct", "difference"}, {}};
  double worst = 0.0;
  for (int J : Jd) {
    BlockFreeEnergy b(pot, J, 0);
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, beta0);
    const double a = b.canonical(beta, 0).value, d = b.canonical_direct(beta).value;
    worst = std::max(worst, std::abs(a - d));
    direct.rows.push_back({double(J), a, d, std::abs(a - d)});
  }
  check_less(r, "cramer_vs_direct_L0", worst, direct_tol);
  r.tables = {gap, direct};
  return r;
}

ExperimentReport free_energy_experiment(const Config& c) {
  auto pot = c.potential();
  const double cf_tol = c.tol("closed_form", 1e-6), slope_tol = c.tol("slope", 0.3);
  const auto Js = c.ints("J", {4, 8, 16});
  const double beta0 = c.num("beta", 0.0);
  if (c.has("gradient") && !c.raw()["gradient"].is_object())
    throw ConfigError("'gradient' must be an object");

  ExperimentReport r;
  r.verifies = "Single-site and block free energies: Legendre duality of psi* and phi, "
               "closed forms in the Gaussian case, and convergence of the spline free-energy "
               "gradient to the macroscopic gradient phi'(zeta).";
  Table single{"single_site", {"m", "sigma", "phi", "log_mgf", "duality_residual"}, {}};
  double duality = 0.0;
  for (double m : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const double s = pot.tilt_for_mean(m);
    const double res = pot.phi(m) + pot.log_mgf(s) - s * m;
    duality = std::max(duality, std::abs(res));
    single.rows.push_back({m, s, pot.phi(m), pot.log_mgf(s), res});
  }
  check_less(r, "legendre_duality", duality, 1e-9);
  r.tables.push_back(single);

  Table blocks{"block", {"J", "grand_canonical", "canonical", "gap"}, {}};
  double gauss_gap = 0.0;
  for (int J : Js) {
    BlockFreeEnergy b(pot, J, 0);
    Eigen::VectorXd beta = Eigen::VectorXd::Constant(1, beta0);
    const double gc = b.legendre(beta, 0).eval.value, can = b.canonical(beta, 0).value;
    blocks.rows.push_back({double(J), gc, can, gc - can});
    gauss_gap = std::max(gauss_gap, std::abs(gc - can + std::log(2 * M_PI) / (2.0 * J)));
  }
  r.tables.push_back(blocks);

  if (pot.is_gaussian()) {
    const double half_log = 0.5 * std::log(2 * M_PI);
    check_less(r, "gaussian_log_mgf_at_zero", std::abs(pot.log_mgf(0.0) - half_log), cf_tol);
    double phi_err = 0.0, h_err = 0.0;
    for (double m : {-1.0, 0.0, 0.7}) {
      phi_err = std::max(phi_err, std::abs(pot.phi(m) - (0.5 * m * m - half_log)));
      for (double z : {-0.4, 0.1, 0.5})
        h_err = std::max(h_err, std::abs(pot.char_fn(m, z) - std::exp(-0.5 * z * z)));
    }
    check_less(r, "gaussian_phi", phi_err, cf_tol);
    check_less(r, "gaussian_h", h_err, cf_tol);
    double dens = 0.0;
    for (int J : Js)
      dens = std::max(dens, std::abs(clt_density(pot, Eigen::VectorXd::Zero(1), J, 0, 0).value -
                                     1.0 / std::sqrt(2 * M_PI)));
    check_less(r, "gaussian_clt_density_at_zero", dens, cf_tol);
    check_less(r, "gaussian_cramer_gap", gauss_gap, cf_tol);
  }

  if (c.has("gradient")) {
    const Json& g = c.raw()["gradient"];
    for (const auto& [key, v] : g.items())
      if (key != "K" && key != "M" && key != "L" && key != "profile")
        throw ConfigError("unknown key 'gradient." + key + "'");
    const std::vector<int> Ks = g.value("K", std::vector<int>{8, 16, 32});
    const int M = g.value("M", 2), L = g.value("L", 1);
    Profile zeta = parse_profile(g.value("profile", default_sine(0.5, M_PI / 2)));
    Table grad{"gradient", {"K", "projected", "embedded", "lattice", "floor"}, {}};
    std::vector<double> proj, lat;
    for (int K : Ks) {
      GradientConvergence gc = gradient_convergence_check(pot, zeta, K, M, L);
      proj.push_back(gc.projected);
      lat.push_back(gc.lattice);
      grad.rows.push_back({double(K), gc.projected, gc.embedded, gc.lattice, gc.floor});
    }
    r.tables.push_back(grad);
    check_flag(r, "gradient_projected_decreasing", strictly_decreasing(proj), "strictly decreasing");
    if (Ks.size() >= 3) {
      check_near(r, "gradient_projected_slope",
                 add_fit(r, "gradient_projected", as_double(Ks), proj).slope, -1.0, slope_tol);
      add_fit(r, "gradient_lattice", as_double(Ks), lat);
    }
  }
  return r;
}

ExperimentReport lsi_bound(const Config& c) {
  auto pot = c.potential();
  const int J = c.integer("J", 4), L = c.integer("L", 1, 0);
  const auto Rs = c.ints("R", {2, 4, 8});
  const auto Ms = c.ints("M", {2, 3, 5});
  const double radius = c.num("radius", 3.0);
  const int steps = c.integer("steps", 3, 2);
  const double inv_tol = c.tol("invariance", 1e-12), g_tol = c.tol("gaussian", 1e-12);

  ExperimentReport r;
  r.verifies = "Two-scale criterion and the conditional LSI chain: a positive LSI constant for "
               "the measure conditioned on the spline projection, uniform in the system size.";
  double combine_err = 0.0;
  for (double a : {0.1, 0.5, 1.0, 3.0})
    for (double b : {0.2, 1.0, 2.5}) combine_err = std::max(combine_err, std::abs(two_scale_combine(a, b, 0.0) - std::min(a, b)));
  r.checks.push_back({"combine_kappa_zero_is_min", combine_err, "== 0", combine_err == 0.0});

  ConvexityCertificate cert = convexity_scan(pot, J, L, radius, steps);
  Table chain{"chain",
              {"R", "M", "K", "N", "lambda", "rho1", "rho2", "kappa", "rho_dg", "kappa2",
               "rho_final"},
              {}};
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0, dg = 0.0;
  for (int R : Rs)
    for (int M : Ms) {
      const int K = R * J, N = K * M;
      LsiChain ch = conditional_lsi_pipeline(pot, N, M, K, L, J, cert);
      chain.rows.push_back({double(R), double(M), double(K), double(N), ch.lambda, ch.rho1,
                            ch.rho2, ch.kappa, ch.rho_dg, ch.kappa2, ch.rho_final});
      lo = std::min(lo, ch.rho_final);
      hi = std::max(hi, ch.rho_final);
      dg = ch.rho_dg;
    }
  check_greater(r, "rho_positive", lo, 0.0);
  check_less(r, "rho_invariance", (hi - lo) / hi, inv_tol);
  if (pot.is_gaussian())
    check_less(r, "gaussian_rho_dg", std::abs(dg - 0.5 * (3.0 - std::sqrt(5.0))), g_tol);
  r.notes["certificate"] = {{"J", cert.J}, {"L", cert.L}, {"lambda", cert.lambda},
                            {"Lambda", cert.Lambda}, {"points", cert.points}};
  r.tables.push_back(chain);
  return r;
}

ExperimentReport splinetest(const Config& c) {
  const auto Ms = c.ints("M", {4, 8, 16, 32});
  const int L = c.integer("L", 2, 2);
  const int factor = c.integer("modes_factor", 3);
  Profile zeta = c.profile("profile", default_sine(1.0));
  const double slope_tol = c.tol("slope", 0.1), sob_tol = c.tol("sobolev_slope", 0.05);
  if (L != 2) throw ConfigError("splinetest: interpolation is defined for L = 2 only");

  ExperimentReport r;
  r.verifies = "Spline approximation: |zeta - P zeta| <= |zeta - I zeta| <= (C/M) |zeta|_{H^1} "
               "with a sharp 1/M rate, and inverse Sobolev ratios growing like M.";
  Table t{"approximation",
          {"M", "worst_projection", "worst_interpolation", "profile_projection",
           "profile_interpolation", "h1_over_l2", "h2_over_h1"},
          {}};
  std::vector<double> wp, wi, pp, pi, s1, s2;
  bool best = true;
  for (int M : Ms) {
    SplineSpace sp(M, L);
    // Worst ratio over H^1-normalised Fourier modes sin(2 pi k theta).
    double p = 0.0, q = 0.0;
    for (int k = 1; k <= factor * M; ++k) {
      Profile f = [k](double th) { return std::sin(2 * M_PI * k * th); };
      const double h1 = 2 * M_PI * k / std::sqrt(2.0);
      p = std::max(p, sp.l2_distance(f, sp.project(f)) / h1);
      q = std::max(q, sp.l2_distance(f, sp.interpolate(f)) / h1);
    }
    const double ep = sp.l2_distance(zeta, sp.project(zeta));
    const double ei = sp.l2_distance(zeta, sp.interpolate(zeta));
    best = best && ep <= ei * (1.0 + 1e-12);
    InverseSobolev is = inverse_sobolev_constants(M, L);
    wp.push_back(p);
    wi.push_back(q);
    pp.push_back(ep);
    pi.push_back(ei);
    s1.push_back(is.h1_over_l2);
    s2.push_back(is.h2_over_h1);
    t.rows.push_back({double(M), p, q, ep, ei, is.h1_over_l2, is.h2_over_h1});
  }
  check_flag(r, "projection_is_best_approximation", best, "|zeta - P zeta| <= |zeta - I zeta|");
  if (Ms.size() >= 3) {
    const auto x = as_double(Ms);
    check_near(r, "worst_projection_slope", add_fit(r, "worst_projection", x, wp).slope, -1.0,
               slope_tol);
    check_near(r, "worst_interpolation_slope", add_fit(r, "worst_interpolation", x, wi).slope,
               -1.0, slope_tol);
    check_near(r, "inverse_sobolev_h1_slope", add_fit(r, "h1_over_l2", x, s1).slope, 1.0, sob_tol);
    check_near(r, "inverse_sobolev_h2_slope", add_fit(r, "h2_over_h1", x, s2).slope, 1.0, sob_tol);
    if (*std::min_element(pp.begin(), pp.end()) > 0.0) add_fit(r, "profile_projection", x, pp);
    if (*std::min_element(pi.begin(), pi.end()) > 0.0) add_fit(r, "profile_interpolation", x, pi);
  }
  r.tables.push_back(t);
  return r;
}

SdeScheme parse_sde_scheme(const Config& c) {
  return c.str("scheme", "exponential", {"exponential", "explicit"}) == "explicit"
             ? SdeScheme::ExplicitEM
             : SdeScheme::ExponentialEM;
}

PdeScheme parse_pde_scheme(const Config& c, const std::string& key) {
  return c.str(key, "semi-implicit", {"explicit", "semi-implicit"}) == "explicit"
             ? PdeScheme::ExplicitFD
             : PdeScheme::SemiImplicit;
}

ExperimentReport simulate(const Config& c) {
  auto pot = c.potential();
  SdeConfig cfg;
  cfg.N = c.integer("N", 64, 2);
  cfg.T = c.num("T", 0.05);
  cfg.dt = c.num("dt", 0.0);
  cfg.ensemble_size = c.integer("ensemble", 16);
  cfg.seed = c.seed();
  cfg.scheme = parse_sde_scheme(c);
  cfg.initial = c.str("initial", "tilted", {"tilted", "deterministic"}) == "deterministic"
                    ? InitialKind::Deterministic
                    : InitialKind::TiltedProduct;
  cfg.profile = c.profile("profile", default_sine(0.5));
  cfg.sample_times = c.nums("sample_times", {0.0, cfg.T});
  if (cfg.T < 0.0) throw ConfigError("'T' must be nonnegative");
  const double drift_tol = c.tol("mean_drift", 1e-12);

  ExperimentReport r;
  r.verifies = "Conservative Kawasaki dynamics dX = -A grad H dt + sqrt(2A) dB conserves the "
               "mean exactly and relaxes fluctuations in H^{-1}.";
  EnsembleStats st = run_ensemble(pot, cfg);
  Table ens{"ensemble", {"t", "mean_h_minus_one_sq", "std_error"}, {}};
  for (std::size_t s = 0; s < st.times.size(); ++s)
    ens.rows.push_back({st.times[s], st.mean[s], st.std_error[s]});

  // States of trajectory 0 at the sample times, from the same random stream.
  Table traj{"trajectory", {"t"}, {}};
  for (int j = 0; j < cfg.N; ++j) traj.columns.push_back("x" + std::to_string(j));
  KawasakiSimulator sim(pot, cfg.N);
  Rng rng = trajectory_rng(cfg.seed, 0);
  Eigen::VectorXd x = sim.sample_initial(cfg.initial, cfg.profile, rng).x;
  double prev = 0.0;
  for (double t : st.times) {
    const double gap = t - prev;
    const long n = gap > 0.0 ? static_cast<long>(std::ceil(gap / st.dt - 1e-9)) : 0;
    for (long k = 0; k < n; ++k) {
      if (cfg.scheme == SdeScheme::ExplicitEM) sim.step_explicit(x, gap / n, rng);
      else sim.step_exponential(x, gap / n, rng);
    }
    std::vector<double> row{t};
    row.insert(row.end(), x.data(), x.data() + cfg.N);
    traj.rows.push_back(row);
    prev = t;
  }
  check_less(r, "mean_drift", st.max_mean_drift, drift_tol);
  r.notes["dt"] = st.dt;
  r.notes["steps"] = st.steps;
  r.notes["entropy_per_site"] = std::isfinite(st.entropy_per_site) ? Json(st.entropy_per_site)
                                                                   : Json("inf");
  r.tables = {ens, traj};
  return r;
}

ExperimentReport pde_experiment(const Config& c) {
  auto pot = c.potential();
  PdeConfig cfg;
  cfg.G = c.integer("G", 256, 3);
  cfg.T = c.num("T", 0.01);
  cfg.dt = c.num("dt", 0.0);
  cfg.scheme = parse_pde_scheme(c, "scheme");
  cfg.offset = c.num("offset", 0.0);
  const Json pj = c.has("profile") ? c.raw()["profile"] : default_sine(1.0);
  cfg.initial = parse_profile(pj);
  cfg.sample_times = c.nums("sample_times", {0.0, cfg.T});
  const double mass_tol = c.tol("mass", 1e-10), exact_tol = c.tol("exact", 1e-3);

  ExperimentReport r;
  r.verifies = "The hydrodynamic equation d zeta/dt = d^2/dtheta^2 phi'(zeta) on the torus: "
               "mass conservation, decay of the macroscopic energy, the maximum principle and "
               "the Gaussian heat-kernel solution.";
  PdeSolution sol = solve_hydrodynamic(pot, cfg);
  Table prof{"profiles", {"t", "theta", "zeta"}, {}};
  std::vector<double> energy;
  bool maxp = true;
  const double lo = sol.profiles[0].minCoeff(), hi = sol.profiles[0].maxCoeff();
  for (std::size_t s = 0; s < sol.times.size(); ++s) {
    for (int i = 0; i < cfg.G; ++i) prof.rows.push_back({sol.times[s], sol.theta(i), sol.profiles[s](i)});
    energy.push_back(discrete_macro_energy(pot, sol.profiles[s]));
    maxp = maxp && sol.profiles[s].minCoeff() >= lo - 1e-12 && sol.profiles[s].maxCoeff() <= hi + 1e-12;
  }
  check_less(r, "mass_drift", sol.max_mass_drift, mass_tol);
  bool dissip = true;
  for (std::size_t s = 1; s < energy.size(); ++s) dissip = dissip && energy[s] <= energy[s - 1] + 1e-14;
  check_flag(r, "energy_nonincreasing", dissip, "nonincreasing");
  check_flag(r, "maximum_principle", maxp, "min/max within the initial range");
  if (pot.is_gaussian()) {
    // Single Fourier mode: amplitude decays as exp(-4 pi^2 k^2 t).
    const double mean = pj.value("mean", 0.0), amp = pj.value("amplitude", 1.0),
                 phase = pj.value("phase", 0.0);
    const int k = pj.value("mode", 1);
    double err = 0.0;
    for (std::size_t s = 0; s < sol.times.size(); ++s) {
      const double decay = std::exp(-4 * M_PI * M_PI * k * k * sol.times[s]);
      for (int i = 0; i < cfg.G; ++i)
        err = std::max(err, std::abs(sol.profiles[s](i) -
                                     (mean + decay * amp * std::sin(2 * M_PI * k * sol.theta(i) + phase))));
    }
    check_less(r, "gaussian_heat_decay", err, exact_tol);
  }
  r.notes["dt"] = sol.dt;
  r.notes["steps"] = sol.steps;
  r.notes["sup_phi2"] = sol.sup_phi2;
  r.tables.push_back(prof);
  return r;
}

ExperimentReport hydro_compare(const Config& c) {
  auto pot = c.potential();
  const auto Ns = c.ints("N", {64, 256, 1024}, 2);
  const double T = c.num("T", 0.05);
  const int ensemble = c.integer("ensemble", 256);
  const int G = c.integer("G", 1024, 3);
  const double pde_dt = c.num("pde_dt", 1e-5);
  Profile zeta0 = c.profile("profile", default_sine(0.5));
  // Samples are recentred into the mean-zero hyperplane, so the profile must be too.
  if (c.has("profile") && c.raw()["profile"].value("mean", 0.0) != 0.0)
    throw ConfigError("hydro-compare: the profile must have mean zero");
  std::vector<double> times = c.nums("sample_times", {0.0, 0.01, 0.025, T});
  std::sort(times.begin(), times.end());
  if (times.empty() || std::abs(times.back() - T) > 1e-15)
    throw ConfigError("'sample_times' must end at T");
  for (int N : Ns)
    if (G % N != 0) throw ConfigError("'G' must be a multiple of every N");
  const double drift_tol = c.tol("mean_drift", 1e-12);

  ExperimentReport r;
  r.verifies = "Quantitative hydrodynamic limit: E |X_N(t) - zeta(t)|^2_{H^-1} decreases as N "
               "grows, with zeta the solution of the hydrodynamic equation.";
  PdeConfig pc;
  pc.G = G;
  pc.dt = pde_dt;
  pc.T = T;
  pc.scheme = parse_pde_scheme(c, "pde_scheme");
  pc.offset = 0.5;
  pc.initial = zeta0;
  pc.sample_times = times;
  PdeSolution sol = solve_hydrodynamic(pot, pc);
  ReferenceSolution ref = [&](double t) {
    std::size_t best = 0;
    for (std::size_t s = 1; s < sol.times.size(); ++s)
      if (std::abs(sol.times[s] - t) < std::abs(sol.times[best] - t)) best = s;
    return sol.profiles[best];
  };

  Table tab{"error", {"N", "t", "mean_h_minus_one_sq", "std_error"}, {}};
  std::vector<double> final_err;
  double drift = 0.0, entropy = 0.0;
  for (int N : Ns) {
    SdeConfig cfg;
    cfg.N = N;
    cfg.T = T;
    cfg.dt = c.num("dt", 0.0);
    cfg.ensemble_size = ensemble;
    cfg.seed = c.seed();
    cfg.scheme = parse_sde_scheme(c);
    cfg.profile = zeta0;
    cfg.sample_times = times;
    EnsembleStats st = run_ensemble(pot, cfg, ref);
    for (std::size_t s = 0; s < st.times.size(); ++s)
      tab.rows.push_back({double(N), st.times[s], st.mean[s], st.std_error[s]});
    final_err.push_back(st.mean.back());
    drift = std::max(drift, st.max_mean_drift);
    entropy = st.entropy_per_site;
  }
  check_flag(r, "error_strictly_decreasing_in_N", strictly_decreasing(final_err),
             "strictly decreasing at t = T");
  check_less(r, "mean_drift", drift, drift_tol);
  if (Ns.size() >= 3) add_fit(r, "error_vs_N", as_double(Ns), final_err);
  r.notes["reference_exponent"] = -2.0 / 3.0;
  r.notes["pde_mass_drift"] = sol.max_mass_drift;
  r.notes["entropy_per_site"] = entropy;
  r.tables.push_back(tab);
  return r;
}

using Runner = ExperimentReport (*)(const Config&);

struct Entry {
  Runner run;
  std::set<std::string> keys;
};

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> reg{
      {"gram-scan", {gram_scan, {"L", "J", "K", "M"}}},
      {"convexity-scan", {convexity_scan_experiment, {"J", "L", "radius", "steps", "spline"}}},
      {"cramer-scan", {cramer_scan, {"J", "L", "direct_J", "beta"}}},
      {"free-energy", {free_energy_experiment, {"J", "beta", "gradient"}}},
      {"lsi-bound", {lsi_bound, {"J", "L", "R", "M", "radius", "steps"}}},
      {"splinetest", {splinetest, {"M", "L", "modes_factor", "profile"}}},
      {"simulate",
       {simulate,
        {"N", "T", "dt", "ensemble", "scheme", "initial", "profile", "sample_times"}}},
      {"pde", {pde_experiment, {"G", "T", "dt", "scheme", "offset", "profile", "sample_times"}}},
      {"hydro-compare",
       {hydro_compare,
        {"N", "T", "dt", "ensemble", "G", "pde_dt", "profile", "sample_times", "scheme",
         "pde_scheme"}}},
  };
  return reg;
}

}  // namespace

SingleSitePotential parse_potential(const Json& desc) {
  if (desc.is_null()) return SingleSitePotential(Perturbation{Cosine{0.1, 1.0}});
  if (!desc.is_object()) throw ConfigError("'potential' must be an object");
  for (const auto& [key, v] : desc.items())
    if (key != "a" && key != "perturbation") throw ConfigError("unknown key 'potential." + key + "'");
  Perturbation p = Zero{};
  if (desc.contains("perturbation")) {
    const Json& q = desc["perturbation"];
    if (!q.is_object() || !q.contains("family") || !q["family"].is_string())
      throw ConfigError("'potential.perturbation' needs a string 'family'");
    const std::string fam = q["family"];
    auto number = [&](const char* key, double def) {
      if (!q.contains(key)) return def;
      if (!q[key].is_number()) throw ConfigError(std::string("perturbation '") + key + "' must be a number");
      return q[key].get<double>();
    };
    std::set<std::string> keys;
    if (fam == "zero") {
      p = Zero{};
    } else if (fam == "cosine") {
      p = Cosine{number("amplitude", 0.1), number("frequency", 1.0)};
      keys = {"amplitude", "frequency"};
    } else if (fam == "bounded_bump") {
      BoundedBump b{number("amplitude", 0.1), number("width", 1.0), number("center", 0.0)};
      if (!(b.width > 0.0)) throw ConfigError("bounded_bump width must be positive");
      p = b;
      keys = {"amplitude", "width", "center"};
    } else {
      throw ConfigError("unknown perturbation family '" + fam +
                        "' (valid: zero, cosine, bounded_bump)");
    }
    for (const auto& [key, v] : q.items())
      if (key != "family" && !keys.count(key))
        throw ConfigError("unknown key 'perturbation." + key + "' for family " + fam);
  }
  if (!desc.contains("a") || (desc["a"].is_string() && desc["a"] == "auto"))
    return SingleSitePotential(p);
  if (!desc["a"].is_number()) throw ConfigError("'potential.a' must be \"auto\" or a number");
  return SingleSitePotential(p, desc["a"].get<double>());
}

Profile parse_profile(const Json& desc) {
  if (!desc.is_object()) throw ConfigError("profile must be an object");
  for (const auto& [key, v] : desc.items()) {
    if (key != "mean" && key != "amplitude" && key != "mode" && key != "phase")
      throw ConfigError("unknown profile key '" + key + "'");
    if (!v.is_number()) throw ConfigError("profile '" + key + "' must be a number");
  }
  if (desc.contains("mode") && !desc["mode"].is_number_integer())
    throw ConfigError("profile 'mode' must be an integer");
  const double mean = desc.value("mean", 0.0), amp = desc.value("amplitude", 1.0),
               phase = desc.value("phase", 0.0);
  const int k = desc.value("mode", 1);
  return [=](double t) { return mean + amp * std::sin(2 * M_PI * k * t + phase); };
}

ExperimentReport run_experiment(const std::string& name, const Json& config) {
  const auto& reg = registry();
  auto it = reg.find(name);
  if (it == reg.end()) {
    std::string msg = "unknown experiment '" + name + "'; valid names:";
    for (const auto& n : experiment_names()) msg += " " + n;
    throw ConfigError(msg);
  }
  if (config.is_object() && config.contains("experiment") &&
      config["experiment"] != Json(name))
    throw ConfigError("config names a different experiment");
  Config cfg(config, it->second.keys);
  cfg.potential();
  const auto t0 = std::chrono::steady_clock::now();
  ExperimentReport r = it->second.run(cfg);
  r.experiment = name;
  r.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string format_csv(const Table& table) {
  std::ostringstream os;
  for (std::size_t i = 0; i < table.columns.size(); ++i)
    os << (i ? "," : "") << table.columns[i];
  os << '\n';
  char buf[40];
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", row[i]);
      os << (i ? "," : "") << buf;
    }
    os << '\n';
  }
  return os.str();
}

std::vector<std::filesystem::path> write_report(const ExperimentReport& report,
                                                const Json& config,
                                                const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<std::filesystem::path> files;
  Json summary;
  summary["schema_version"] = kSummarySchemaVersion;
  summary["experiment"] = report.experiment;
  summary["verifies"] = report.verifies;
  summary["passed"] = report.passed();
  summary["config"] = config;
  summary["runtime_seconds"] = report.runtime_seconds;
  const std::time_t now = std::time(nullptr);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
  summary["timestamp"] = stamp;
  summary["checks"] = Json::array();
  for (const auto& ch : report.checks)
    summary["checks"].push_back(
        {{"name", ch.name}, {"value", ch.value}, {"target", ch.target}, {"pass", ch.pass}});
  summary["fits"] = Json::object();
  for (const auto& [name, f] : report.fits)
    summary["fits"][name] = {{"x", f.x},
                             {"y", f.y},
                             {"slope", f.slope},
                             {"intercept", f.intercept},
                             {"r_squared", f.r_squared}};
  summary["notes"] = report.notes;
  summary["files"] = Json::array();
  for (const auto& t : report.tables) {
    const auto path = dir / (report.experiment + "_" + t.name + ".csv");
    std::ofstream(path) << format_csv(t);
    files.push_back(path);
    summary["files"].push_back(path.filename().string());
  }
  const auto spath = dir / (report.experiment + "_summary.json");
  std::ofstream(spath) << summary.dump(2) << '\n';
  files.push_back(spath);
  return files;
}

}  // namespace hydrolim
