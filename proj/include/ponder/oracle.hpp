#pragma once

/**
 * Independent verification machinery.
 *
 *  - classical_sde_psd(): time-domain Monte Carlo of dx = A x dt + B dW with white noise
 *    matching the symmetrized input spectra at the mechanical frequency, reduced to
 *    averaged periodograms. Shares nothing with the frequency-domain solver except the
 *    drift and noise-coupling matrices.
 *  - SeparableGaussianSampler: random finite mixtures of product single-mode Gaussian
 *    states, i.e. exactly the separable class the product criterion quantifies over.
 *  - tmsv_state(): two-mode squeezed vacuum, the canonical entangled witness.
 *
 * Seeds: trajectory k of a run with root seed s draws from std::mt19937_64 seeded with
 * splitmix64(s + k * 0x9E3779B97F4A7C15). The sampler uses the same rule with k = state index.
 */

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include "ponder/dynamics.hpp"
#include "ponder/entanglement.hpp"
#include "ponder/errors.hpp"

namespace ponder {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t stream_seed(std::uint64_t root, std::uint64_t k) {
  return splitmix64(root + k * 0x9E3779B97F4A7C15ULL);
}

/// Runs fn(i) for i in [0, count) on `workers` threads. Each index is claimed once; callers
/// write results into slot i so the output does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  if (n_threads == 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < std::min(n_threads, count); ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count || failed.load()) return;
        try {
          fn(i);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------------------
// Classical SDE periodograms

enum class SdeScheme {
  euler_maruyama,
  exact,  // x_{n+1} = e^{A dt} x_n + N(0, Q_dt); exact in distribution for linear SDEs
};

struct SdeRun {
  std::uint64_t seed = 1;
  double time_step = 4e-7;       // s
  double segment_time = 4e-3;    // s; periodogram length
  int segments = 1;              // consecutive segments per trajectory
  double burn_in = 1e-3;         // s
  int trajectories = 400;
  std::vector<int> record = {idx(Var::q1)};
  SdeScheme scheme = SdeScheme::euler_maruyama;
  int workers = 1;

  double total_time() const { return segment_time * segments; }
};

struct PsdEstimate {
  std::vector<double> omega;
  std::vector<std::vector<double>> psd;     // [record][omega]
  std::vector<std::vector<double>> std_error;  // standard error of the mean
  long samples = 0;                         // periodograms averaged per entry
  bool classical_regime = true;             // k_B T / hbar Omega > 100
};

namespace detail {

template <int N, int K>
struct SdeStepper {
  using StateMat = Eigen::Matrix<double, N, N>;
  using NoiseMat = Eigen::Matrix<double, N, Eigen::Dynamic>;

  StateMat propagator;  // x <- propagator x + kick z
  NoiseMat kick;

  static Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& cov) {
    const Eigen::MatrixXd sym = 0.5 * (cov + cov.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
    const Eigen::VectorXd lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal();
  }

  SdeStepper(const Eigen::Matrix<double, N, N>& a, const Eigen::Matrix<double, N, K>& b,
             const Eigen::Matrix<double, K, K>& q, double dt, SdeScheme scheme) {
    const int n = static_cast<int>(a.rows());
    if (scheme == SdeScheme::euler_maruyama) {
      propagator = StateMat::Identity(n, n) + a * dt;
      kick = b * psd_sqrt(q) * std::sqrt(dt);
    } else {
      // Van Loan: exp([[-A, B Q B^T], [0, A^T]] dt) = [[., F12], [0, F22]],
      // e^{A dt} = F22^T, Q_dt = e^{A dt} F12.
      Eigen::MatrixXd block = Eigen::MatrixXd::Zero(2 * n, 2 * n);
      block.topLeftCorner(n, n) = -a * dt;
      block.topRightCorner(n, n) = b * q * b.transpose() * dt;
      block.bottomRightCorner(n, n) = a.transpose() * dt;
      const Eigen::MatrixXd f = block.exp();
      const Eigen::MatrixXd phi = f.bottomRightCorner(n, n).transpose();
      propagator = phi;
      kick = psd_sqrt(phi * f.topRightCorner(n, n));
    }
  }
};

template <int N, int K>
PsdEstimate run_sde(const Eigen::Matrix<double, N, N>& a, const Eigen::Matrix<double, N, K>& b,
                    const Eigen::Matrix<double, K, K>& q, const SdeRun& run,
                    const std::vector<double>& grid) {
  const int n = static_cast<int>(a.rows());
  const SdeStepper<N, K> stepper(a, b, q, run.time_step, run.scheme);
  const int n_noise = static_cast<int>(stepper.kick.cols());
  const long seg_steps = std::lround(run.segment_time / run.time_step);
  const long burn_steps = std::lround(run.burn_in / run.time_step);
  const std::size_t n_rec = run.record.size();
  const std::size_t n_freq = grid.size();
  for (int r : run.record) {
    if (r < 0 || r >= n) throw InvalidParameter("recorded variable index out of range");
  }

  // Per trajectory: sum and sum of squares of the periodograms, [rec * n_freq + f].
  struct Accum {
    std::vector<double> sum, sum_sq;
  };
  std::vector<Accum> per_traj(static_cast<std::size_t>(run.trajectories));

  // Unit phasors per step for each frequency; re-anchored every block to bound drift.
  std::vector<std::complex<double>> step_phase(n_freq);
  for (std::size_t f = 0; f < n_freq; ++f) step_phase[f] = std::polar(1.0, grid[f] * run.time_step);

  parallel_for(per_traj.size(), run.workers, [&](std::size_t k) {
    std::mt19937_64 rng(stream_seed(run.seed, k));
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::Matrix<double, N, 1> x = Eigen::Matrix<double, N, 1>::Zero(n);
    Eigen::VectorXd z(n_noise);
    const auto step = [&] {
      for (int i = 0; i < n_noise; ++i) z(i) = normal(rng);
      x = stepper.propagator * x + stepper.kick * z;
    };
    for (long s = 0; s < burn_steps; ++s) step();

    Accum acc{std::vector<double>(n_rec * n_freq, 0.0), std::vector<double>(n_rec * n_freq, 0.0)};
    std::vector<std::complex<double>> dft(n_rec * n_freq);
    std::vector<std::complex<double>> phase(n_freq);
    for (int seg = 0; seg < run.segments; ++seg) {
      std::fill(dft.begin(), dft.end(), std::complex<double>{});
      for (long s = 0; s < seg_steps; ++s) {
        if (s % 1024 == 0) {
          for (std::size_t f = 0; f < n_freq; ++f) {
            phase[f] = std::polar(1.0, grid[f] * run.time_step * static_cast<double>(s));
          }
        }
        for (std::size_t r = 0; r < n_rec; ++r) {
          const double xr = x(run.record[r]);
          for (std::size_t f = 0; f < n_freq; ++f) dft[r * n_freq + f] += xr * phase[f];
        }
        for (std::size_t f = 0; f < n_freq; ++f) phase[f] *= step_phase[f];
        step();
      }
      const double seg_len = run.time_step * static_cast<double>(seg_steps);
      for (std::size_t i = 0; i < dft.size(); ++i) {
        const double p = std::norm(dft[i] * run.time_step) / seg_len;
        acc.sum[i] += p;
        acc.sum_sq[i] += p * p;
      }
    }
    per_traj[k] = std::move(acc);
  });

  PsdEstimate out;
  out.omega = grid;
  out.samples = static_cast<long>(run.trajectories) * run.segments;
  out.psd.assign(n_rec, std::vector<double>(n_freq, 0.0));
  out.std_error.assign(n_rec, std::vector<double>(n_freq, 0.0));
  for (std::size_t r = 0; r < n_rec; ++r) {
    for (std::size_t f = 0; f < n_freq; ++f) {
      double sum = 0.0, sum_sq = 0.0;
      for (const auto& acc : per_traj) {  // fixed index order
        sum += acc.sum[r * n_freq + f];
        sum_sq += acc.sum_sq[r * n_freq + f];
      }
      const double m = static_cast<double>(out.samples);
      const double mean = sum / m;
      const double var = std::max(0.0, sum_sq / m - mean * mean) * m / std::max(1.0, m - 1.0);
      out.psd[r][f] = mean;
      out.std_error[r][f] = std::sqrt(var / m);
    }
  }
  return out;
}

inline void check_run_shape(const SdeRun& run) {
  if (!(run.time_step > 0.0) || !(run.segment_time > run.time_step) || run.segments < 1 ||
      run.trajectories < 1 || !(run.burn_in >= 0.0) || run.record.empty()) {
    throw InvalidParameter("malformed SDE run settings");
  }
}

}  // namespace detail

/// Generic linear SDE dx = A x dt + B dW, <dW dW^T> = Q dt. Step size must stay below
/// 0.05 / spectral radius of A; the recorded time after burn-in must exceed 50 / (slowest
/// decay rate).
template <int N, int K>
PsdEstimate classical_sde_psd(const Eigen::Matrix<double, N, N>& a,
                              const Eigen::Matrix<double, N, K>& b,
                              const Eigen::Matrix<double, K, K>& q, const SdeRun& run,
                              const std::vector<double>& grid) {
  detail::check_run_shape(run);
  const Eigen::VectorXcd ev = Eigen::MatrixXd(a).eigenvalues();
  if (!(ev.real().maxCoeff() < 0.0)) {
    throw StabilityError("SDE oracle requires a stable drift matrix", {ev.data(), ev.data() + ev.size()});
  }
  const double radius = ev.cwiseAbs().maxCoeff();
  const double slowest = (-ev.real()).minCoeff();
  if (!(run.time_step < 0.05 / radius)) throw InvalidParameter("SDE time step too large");
  if (!(run.total_time() > 50.0 / slowest)) throw InvalidParameter("SDE recorded time too short");
  return detail::run_sde<N, K>(a, b, q, run, grid);
}

/// Monte Carlo periodograms for the optomechanical system. White noise intensities are the
/// symmetrized input spectra at w = Omega (the Brownian kernel is treated as white there).
inline PsdEstimate classical_sde_psd(const LinearSystem& sys, const NoiseModel& noise,
                                     const SdeRun& run, const std::vector<double>& grid) {
  detail::check_run_shape(run);
  if (!sys.stable) {
    throw StabilityError("SDE oracle requires a stable drift matrix",
                         {sys.eigenvalues.data(), sys.eigenvalues.data() + kStateDim});
  }
  const auto& p = sys.params;
  const double bound = 0.05 * std::min({1.0 / p.gamma_a, 1.0 / p.gamma_b, 1.0 / p.big_omega});
  if (!(run.time_step < bound)) {
    throw InvalidParameter("SDE time step must be below 0.05 min(1/gamma_a, 1/gamma_b, 1/Omega)");
  }
  if (!(run.total_time() > 50.0 / p.big_gamma)) {
    throw InvalidParameter("SDE recorded time must exceed 50 / Gamma");
  }
  const InputSpectrum sym = noise.symmetrized_spectrum(p.big_omega);
  const Eigen::Matrix<double, kNoiseDim, kNoiseDim> q = sym.real();
  auto out = detail::run_sde<kStateDim, kNoiseDim>(sys.drift, sys.noise_coupling, q, run, grid);
  out.classical_regime =
      constants::k_boltzmann * noise.temperature / (constants::hbar * p.big_omega) > 100.0;
  return out;
}

// ---------------------------------------------------------------------------------------
// Gaussian state generators

/// Single-mode squeezed thermal state: (n + 1/2) R(theta) diag(e^{-2r}, e^{2r}) R(theta)^T.
inline Eigen::Matrix2d squeezed_thermal_cov(double occupation, double squeezing, double angle) {
  const Eigen::Matrix2d rot = Eigen::Rotation2Dd(angle).toRotationMatrix();
  const Eigen::Vector2d d(std::exp(-2.0 * squeezing), std::exp(2.0 * squeezing));
  return (occupation + 0.5) * rot * d.asDiagonal() * rot.transpose();
}

inline GaussianState product_state(const Eigen::Matrix2d& mode1, const Eigen::Matrix2d& mode2,
                                   const Eigen::Vector4d& mean = Eigen::Vector4d::Zero()) {
  GaussianState s;
  s.cov.setZero();
  s.cov.topLeftCorner<2, 2>() = mode1;
  s.cov.bottomRightCorner<2, 2>() = mode2;
  s.mean = mean;
  return s;
}

/// Moments of a weighted mixture: mean = sum w_i m_i,
/// cov = sum w_i (V_i + m_i m_i^T) - mean mean^T. Weights are normalized here.
inline GaussianState mixture(const std::vector<GaussianState>& parts,
                             const std::vector<double>& weights) {
  if (parts.empty() || parts.size() != weights.size()) {
    throw InvalidParameter("mixture needs one weight per component");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidParameter("mixture weights must be non-negative");
    total += w;
  }
  if (!(total > 0.0)) throw InvalidParameter("mixture weights sum to zero");
  GaussianState out;
  out.mean.setZero();
  out.cov.setZero();
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const double w = weights[i] / total;
    out.mean += w * parts[i].mean;
    out.cov += w * (parts[i].cov + parts[i].mean * parts[i].mean.transpose());
  }
  out.cov -= out.mean * out.mean.transpose();
  out.cov = 0.5 * (out.cov + out.cov.transpose());
  return out;
}

/// Random separable states: mixtures of 2-8 products of squeezed thermal states with random
/// rotations and displacements. A quarter of the single-mode draws are pure (n = 0) and a
/// quarter unsqueezed, so the sampler also probes states on the separable boundary.
class SeparableGaussianSampler {
 public:
  explicit SeparableGaussianSampler(std::uint64_t seed) : seed_(seed) {}

  GaussianState next() {
    std::mt19937_64 rng(stream_seed(seed_, index_++));
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_int_distribution<int> components(2, 8);

    const auto single_mode = [&] {
      const double n = unit(rng) < 0.25 ? 0.0 : 2.0 * unit(rng);
      const double r = unit(rng) < 0.25 ? 0.0 : 1.5 * unit(rng);
      const double theta = std::numbers::pi * unit(rng);
      return squeezed_thermal_cov(n, r, theta);
    };

    const int k = components(rng);
    const double spread = unit(rng) < 0.3 ? 0.0 : 2.0 * unit(rng);
    std::vector<GaussianState> parts;
    std::vector<double> weights;
    for (int i = 0; i < k; ++i) {
      Eigen::Vector4d mean;
      for (int j = 0; j < 4; ++j) mean(j) = spread * normal(rng);
      parts.push_back(product_state(single_mode(), single_mode(), mean));
      weights.push_back(-std::log(1.0 - unit(rng)));  // Dirichlet(1, ..., 1)
    }
    return mixture(parts, weights);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t index_ = 0;
};

inline std::vector<GaussianState> sample_separable_gaussian(std::uint64_t seed, std::size_t count) {
  if (count < 1) throw InvalidParameter("count must be >= 1");
  SeparableGaussianSampler sampler(seed);
  std::vector<GaussianState> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(sampler.next());
  return out;
}

/// Two-mode squeezed vacuum with Var(q1 + q2) = Var(p1 - p2) = e^{-2r}. With
/// mode2_scale = s > 1, local thermal noise raises both mode-2 variances by a factor s^2
/// while the cross-correlations stay fixed (still physical).
inline GaussianState tmsv_state(double r, double mode2_scale = 1.0) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw InvalidParameter("squeezing r must be >= 0");
  if (!(mode2_scale >= 1.0)) throw InvalidParameter("mode-2 variance scale must be >= 1");
  const double c = 0.5 * std::cosh(2.0 * r);
  const double k = 0.5 * std::sinh(2.0 * r);
  const double c2 = mode2_scale * mode2_scale * c;
  GaussianState s;
  s.cov << c, 0.0, -k, 0.0,
           0.0, c, 0.0, k,
           -k, 0.0, c2, 0.0,
           0.0, k, 0.0, c2;
  return s;
}

}  // namespace ponder
