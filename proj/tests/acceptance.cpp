#include <chrono>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "hydrolim/experiments.hpp"

using namespace hydrolim;

namespace {

Json load(const std::string& stem) {
  std::ifstream in(std::string(HYDROLIM_CONFIG_DIR) + "/" + stem + ".json");
  if (!in) throw std::runtime_error("missing config " + stem);
  return Json::parse(in);
}

struct Criterion {
  int id;
  std::string title;
  double limit_seconds;
  std::vector<std::string> configs;
};

void print_fit(const ExperimentReport& r, const std::string& name) {
  auto it = r.fits.find(name);
  if (it == r.fits.end()) return;
  std::printf("    fit %-22s slope %+.4f  R^2 %.4f  y:", name.c_str(), it->second.slope,
              it->second.r_squared);
  for (double y : it->second.y) std::printf(" %.4g", y);
  std::printf("\n");
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Gaussian closed-form suite", 10.0, {"free-energy-gaussian"}},
      {2, "Operator scaling of Q1 J Q1^t and P N P^t", 30.0, {"gram-scan"}},
      {3, "Local Cramer gap and direct fibre quadrature", 600.0, {"cramer-scan"}},
      {4, "Convexity of psi_J and of the spline energy", 1200.0,
       {"convexity-scan", "convexity-scan-gaussian"}},
      {5, "Gradient convergence in K at fixed M", 1200.0, {"free-energy-gradient"}},
      {6, "Spline approximation and inverse Sobolev rates", 60.0, {"splinetest"}},
      {7, "LSI pipeline", 1.0, {"lsi-bound", "lsi-bound-gaussian"}},
      {8, "Dynamics and PDE", 1800.0, {"pde", "pde-cosine", "hydro-compare"}},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    bool ok = true;
    double seconds = 0.0;
    std::vector<ExperimentReport> reports;
    std::string error;
    try {
      for (const auto& stem : c.configs) {
        Json cfg = load(stem);
        reports.push_back(run_experiment(cfg.at("experiment").get<std::string>(), cfg));
        seconds += reports.back().runtime_seconds;
        ok = ok && reports.back().passed();
      }
    } catch (const std::exception& e) {
      ok = false;
      error = e.what();
    }
    const bool in_time = seconds <= c.limit_seconds;
    ok = ok && in_time;
    if (!ok) ++failed;
    std::printf("%s criterion %d: %s (%.2f s, limit %.0f s)\n", ok ? "PASS" : "FAIL", c.id,
                c.title.c_str(), seconds, c.limit_seconds);
    if (!error.empty()) std::printf("    error: %s\n", error.c_str());
    if (!in_time) std::printf("    runtime limit exceeded\n");
    for (const auto& r : reports)
      for (const auto& ch : r.checks)
        std::printf("    %s %s/%s = %.6g (%s)\n", ch.pass ? "ok  " : "FAIL", r.experiment.c_str(),
                    ch.name.c_str(), ch.value, ch.target.c_str());
    if (c.id == 5 && !reports.empty()) {
      const ExperimentReport& r = reports[0];
      print_fit(r, "gradient_projected");
      print_fit(r, "gradient_lattice");
      for (const auto& t : r.tables)
        if (t.name == "gradient")
          for (const auto& row : t.rows)
            std::printf("    K=%-3g projected %.4e  embedded %.4e  lattice %.4e  floor %.4e\n",
                        row[0], row[1], row[2], row[3], row[4]);
    }
    if (c.id == 8 && reports.size() == 3) print_fit(reports[2], "error_vs_N");
    std::fflush(stdout);
  }
  std::printf("%s: %d of %zu criteria passed\n", failed ? "FAIL" : "PASS",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed ? 1 : 0;
}
