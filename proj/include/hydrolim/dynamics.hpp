#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "hydrolim/coarse_grain.hpp"
#include "hydrolim/lattice.hpp"
#include "hydrolim/potential.hpp"

namespace hydrolim {

using Rng = std::mt19937_64;

/// Independent stream for trajectory `index` of an ensemble seeded by `seed`.
Rng trajectory_rng(std::uint64_t seed, std::uint64_t index);

enum class InitialKind { TiltedProduct, Deterministic };
enum class SdeScheme { ExplicitEM, ExponentialEM };

struct SdeConfig {
  int N = 64;
  double dt = 0.0;           ///< 0 selects the default for the scheme
  double T = 0.05;
  int ensemble_size = 1;
  std::uint64_t seed = 1;
  InitialKind initial = InitialKind::TiltedProduct;
  Profile profile = [](double) { return 0.0; };
  SdeScheme scheme = SdeScheme::ExponentialEM;
  std::vector<double> sample_times;  ///< empty means {0, T}
};

/// 0.25 / (lambda_max(A) (1 + c2_bound)).
double explicit_stability_dt(const SingleSitePotential& pot, int N);

/**
 * Stepper for dX = -A grad H(X) dt + sqrt(2A) dB on the periodic chain.
 *
 * The explicit scheme is plain Euler-Maruyama with spectrally applied noise.
 * The exponential scheme integrates the linear part -A X exactly mode by
 * mode and treats the bounded remainder A (a + delta psi'(X)) explicitly, so
 * its step is not tied to the N^{-2} stiffness of A.
 */
class KawasakiSimulator {
 public:
  KawasakiSimulator(SingleSitePotential pot, int N);

  int N() const { return N_; }
  const SingleSitePotential& potential() const { return pot_; }

  /// x <- x - A grad H(x) dt + sqrt(dt) sqrt(2A) xi.
  void step_explicit(Eigen::VectorXd& x, double dt, Rng& rng);
  /// Same with a prescribed standard normal vector xi.
  void step_explicit(Eigen::VectorXd& x, double dt, const Eigen::VectorXd& xi);
  void step_exponential(Eigen::VectorXd& x, double dt, Rng& rng);

  struct Initial {
    Eigen::VectorXd x;
    double entropy_per_site = 0.0;  ///< Ent(nu | mu^N) / N before recentring
  };
  /// Sites j = 0..N-1 sit at cell midpoints (j + 1/2)/N.  The sample is
  /// shifted to mean zero.
  Initial sample_initial(InitialKind kind, const Profile& profile, Rng& rng) const;

  /// Draw from the tilted single-site measure with mean m.
  double sample_tilted(double m, Rng& rng) const;

 private:
  void check_finite(const Eigen::VectorXd& x) const;

  SingleSitePotential pot_;
  int N_;
  KawasakiOperator op_;
  double inf_delta_;
  CVector spec_, noise_;
};

/// Free-function form of one explicit Euler-Maruyama step.
void kawasaki_step(KawasakiSimulator& sim, Eigen::VectorXd& x, double dt, Rng& rng);

/// Profile zeta(t, .) sampled on G cell midpoints, G a multiple of N.
using ReferenceSolution = std::function<Eigen::VectorXd(double t)>;

struct EnsembleStats {
  std::vector<double> times;
  std::vector<double> mean;      ///< E |X(t) - zeta(t)|^2_{H^-1}
  std::vector<double> std_error; ///< standard error of the mean
  double max_mean_drift = 0.0;   ///< max_t |mean X(t) - mean X(0)| over all trajectories
  double dt = 0.0;
  long steps = 0;
  double entropy_per_site = 0.0; ///< averaged over trajectories
};

/// Runs the ensemble and compares each trajectory with the reference in H^{-1}.
/// With an empty reference the distance to zero is reported.
EnsembleStats run_ensemble(const SingleSitePotential& pot, const SdeConfig& cfg,
                           const ReferenceSolution& reference = {});

}  // namespace hydrolim
