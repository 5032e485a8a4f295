#include "hydrolim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <variant>

#include "hydrolim/lsi.hpp"

namespace hydrolim {

namespace {

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double inf_perturbation(const Perturbation& p) {
  return std::visit(
      [](const auto& q) -> double {
        using T = std::decay_t<decltype(q)>;
        if constexpr (std::is_same_v<T, Cosine>) return -std::abs(q.amplitude);
        else if constexpr (std::is_same_v<T, BoundedBump>) return std::min(0.0, q.amplitude);
        else return 0.0;
      },
      p);
}

/// Compensated running sum.
struct Kahan {
  double sum = 0.0, c = 0.0;
  void add(double v) {
    const double y = v - c;
    const double t = sum + y;
    c = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

Rng trajectory_rng(std::uint64_t seed, std::uint64_t index) {
  return Rng(splitmix64(splitmix64(seed) ^ splitmix64(index + 0x632be59bd9b4e019ULL)));
}

double explicit_stability_dt(const SingleSitePotential& pot, int N) {
  return 0.25 / (eigenvalues_A(N).maxCoeff() * (1.0 + pot.c2_bound()));
}

KawasakiSimulator::KawasakiSimulator(SingleSitePotential pot, int N)
    : pot_(std::move(pot)), N_(N), op_(N), inf_delta_(inf_perturbation(pot_.perturbation())),
      spec_(N), noise_(N) {
  if (N < 2) throw std::invalid_argument("KawasakiSimulator: need N >= 2");
}

void KawasakiSimulator::check_finite(const Eigen::VectorXd& x) const {
  if (!x.allFinite()) throw std::runtime_error("KawasakiSimulator: non-finite state");
}

void KawasakiSimulator::step_explicit(Eigen::VectorXd& x, double dt, const Eigen::VectorXd& xi) {
  Eigen::VectorXd drift = op_.apply(grad_hamiltonian(pot_, x));
  Eigen::VectorXd noise = op_.apply_sqrt_2A(xi);
  x += -dt * drift + std::sqrt(dt) * noise;
  check_finite(x);
}

void KawasakiSimulator::step_explicit(Eigen::VectorXd& x, double dt, Rng& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd xi(N_);
  for (int i = 0; i < N_; ++i) xi(i) = nd(rng);
  step_explicit(x, dt, xi);
}

void KawasakiSimulator::step_exponential(Eigen::VectorXd& x, double dt, Rng& rng) {
  std::normal_distribution<double> nd;
  const Eigen::VectorXd& lam = op_.eigenvalues();
  Eigen::VectorXd f(N_);
  for (int i = 0; i < N_; ++i) f(i) = pot_.derivative(x(i)) - x(i);
  Fft& fft = op_.fft();
  fft.forward(x, spec_);
  fft.forward(f, noise_);
  // Hermitian noise with the law of the DFT of N iid standard normals.
  const double half = std::sqrt(0.5 * N_);
  for (int k = 1; 2 * k < N_; ++k) {
    const double e = std::exp(-lam(k) * dt);
    const double s = std::sqrt(-std::expm1(-2.0 * lam(k) * dt));
    const std::complex<double> eta(half * nd(rng), half * nd(rng));
    spec_[k] = e * spec_[k] + std::expm1(-lam(k) * dt) * noise_[k] + s * eta;
    spec_[N_ - k] = std::conj(spec_[k]);
  }
  if (N_ % 2 == 0) {
    const int k = N_ / 2;
    const double e = std::exp(-lam(k) * dt);
    const double s = std::sqrt(-std::expm1(-2.0 * lam(k) * dt));
    spec_[k] = e * spec_[k].real() + std::expm1(-lam(k) * dt) * noise_[k].real() +
               s * std::sqrt(static_cast<double>(N_)) * nd(rng);
  }
  spec_[0] = std::complex<double>(spec_[0].real(), 0.0);
  fft.inverse(spec_, x);
  check_finite(x);
}

double KawasakiSimulator::sample_tilted(double m, Rng& rng) const {
  const double s = pot_.tilt_for_mean(m);
  const double centre = s - pot_.a();
  std::normal_distribution<double> nd(centre, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int it = 0; it < 100000; ++it) {
    const double z = nd(rng);
    if (u(rng) < std::exp(-(pot_.delta(z) - inf_delta_))) return z;
  }
  throw std::runtime_error("sample_tilted: rejection sampler exceeded its iteration cap");
}

KawasakiSimulator::Initial KawasakiSimulator::sample_initial(InitialKind kind,
                                                             const Profile& profile,
                                                             Rng& rng) const {
  Initial out;
  out.x.resize(N_);
  Eigen::VectorXd m(N_);
  for (int j = 0; j < N_; ++j) m(j) = profile((j + 0.5) / N_);
  if (kind == InitialKind::Deterministic) {
    out.x = m;
    out.entropy_per_site = std::numeric_limits<double>::infinity();
  } else {
    for (int j = 0; j < N_; ++j) out.x(j) = sample_tilted(m(j), rng);
    out.entropy_per_site = relative_entropy_product(pot_, m).per_site;
  }
  out.x.array() -= out.x.mean();
  return out;
}

void kawasaki_step(KawasakiSimulator& sim, Eigen::VectorXd& x, double dt, Rng& rng) {
  sim.step_explicit(x, dt, rng);
}

EnsembleStats run_ensemble(const SingleSitePotential& pot, const SdeConfig& cfg,
                           const ReferenceSolution& reference) {
  if (cfg.ensemble_size < 1) throw std::invalid_argument("run_ensemble: empty ensemble");
  if (!(cfg.T >= 0.0)) throw std::invalid_argument("run_ensemble: negative horizon");
  const double stable = explicit_stability_dt(pot, cfg.N);
  double dt = cfg.dt;
  if (dt <= 0.0) dt = cfg.scheme == SdeScheme::ExplicitEM ? stable : 1e-4;
  if (cfg.scheme == SdeScheme::ExplicitEM && dt > stable * (1.0 + 1e-12))
    throw std::invalid_argument("run_ensemble: dt exceeds the explicit stability bound");

  std::vector<double> times = cfg.sample_times;
  if (times.empty()) times = {0.0, cfg.T};
  std::sort(times.begin(), times.end());
  if (times.front() < 0.0 || times.back() > cfg.T + 1e-15)
    throw std::invalid_argument("run_ensemble: sample times outside [0, T]");

  // Step counts per sampling interval; each interval uses a uniform step.
  std::vector<long> nsteps(times.size());
  std::vector<double> dts(times.size());
  double prev = 0.0;
  long total_steps = 0;
  for (std::size_t s = 0; s < times.size(); ++s) {
    const double gap = times[s] - prev;
    nsteps[s] = gap > 0.0 ? static_cast<long>(std::ceil(gap / dt - 1e-9)) : 0;
    dts[s] = nsteps[s] > 0 ? gap / nsteps[s] : 0.0;
    total_steps += nsteps[s];
    prev = times[s];
  }

  std::vector<Eigen::VectorXd> refs(times.size());
  int factor = 1;
  if (reference) {
    for (std::size_t s = 0; s < times.size(); ++s) refs[s] = reference(times[s]);
    const Eigen::Index G = refs[0].size();
    if (G % cfg.N != 0) throw std::invalid_argument("run_ensemble: reference grid must refine N");
    factor = static_cast<int>(G / cfg.N);
  }

  EnsembleStats st;
  st.times = times;
  st.dt = dt;
  st.steps = total_steps;
  std::vector<Kahan> s1(times.size()), s2(times.size());
  Kahan ent;
  KawasakiSimulator sim(pot, cfg.N);
  for (int traj = 0; traj < cfg.ensemble_size; ++traj) {
    Rng rng = trajectory_rng(cfg.seed, static_cast<std::uint64_t>(traj));
    KawasakiSimulator::Initial init = sim.sample_initial(cfg.initial, cfg.profile, rng);
    ent.add(init.entropy_per_site);
    Eigen::VectorXd x = init.x;
    const double mean0 = x.mean();
    for (std::size_t s = 0; s < times.size(); ++s) {
      for (long k = 0; k < nsteps[s]; ++k) {
        if (cfg.scheme == SdeScheme::ExplicitEM) sim.step_explicit(x, dts[s], rng);
        else sim.step_exponential(x, dts[s], rng);
        st.max_mean_drift = std::max(st.max_mean_drift, std::abs(x.mean() - mean0));
      }
      const double v = reference ? h_minus_one_norm_sq(refine_step(x, factor) - refs[s])
                                 : h_minus_one_norm_sq(x);
      s1[s].add(v);
      s2[s].add(v * v);
    }
  }
  const double n = cfg.ensemble_size;
  for (std::size_t s = 0; s < times.size(); ++s) {
    const double mean = s1[s].sum / n;
    const double var = n > 1 ? std::max(0.0, (s2[s].sum - n * mean * mean) / (n - 1)) : 0.0;
    st.mean.push_back(mean);
    st.std_error.push_back(std::sqrt(var / n));
  }
  st.entropy_per_site = ent.sum / n;
  return st;
}

}  // namespace hydrolim
