#pragma once

/**
 * Linearized quadrature dynamics  x' = A x + B n  and its frequency-domain solution.
 *
 * State ordering: q1, p1, q2, p2, X_a1, Y_a1, X_a2, Y_a2, X_b, Y_b with
 * X = c + c^dag, Y = -i (c - c^dag) for each optical mode c.
 * Noise ordering: xi1, xi2, X_a1^in, Y_a1^in, X_a2^in, Y_a2^in, X_b^in, Y_b^in.
 *
 * Fourier convention: O(w) = tau^{-1/2} int dt e^{+iwt} O(t), so x(w) = M(w) n(w) with
 * M(w) = (-iw I - A)^{-1} B, and the stationary correlation <O(w) P(-w)> is the entry
 * S_OP(w) of S(w) = M(w) D(w) M(-w)^T, with D(w)_kl = <n_k(w) n_l(-w)>. No 2pi factors.
 */

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "ponder/errors.hpp"
#include "ponder/model.hpp"

namespace ponder {

inline constexpr int kStateDim = 10;
inline constexpr int kNoiseDim = 8;

/// Index of each state component.
enum class Var : int { q1 = 0, p1, q2, p2, xa1, ya1, xa2, ya2, xb, yb };
/// Index of each input-noise channel.
enum class Noise : int { xi1 = 0, xi2, xa1_in, ya1_in, xa2_in, ya2_in, xb_in, yb_in };

constexpr int idx(Var v) { return static_cast<int>(v); }
constexpr int idx(Noise n) { return static_cast<int>(n); }

using DriftMatrix = Eigen::Matrix<double, kStateDim, kStateDim>;
using NoiseCoupling = Eigen::Matrix<double, kStateDim, kNoiseDim>;
using TransferMatrix = Eigen::Matrix<cplx, kStateDim, kNoiseDim>;
using SpectralMatrix = Eigen::Matrix<cplx, kStateDim, kStateDim>;
using InputSpectrum = Eigen::Matrix<cplx, kNoiseDim, kNoiseDim>;
using StateVector = Eigen::Matrix<double, kStateDim, 1>;
using EigenvalueVector = Eigen::Matrix<cplx, kStateDim, 1>;

enum class StabilityPolicy {
  enforce,  // unstable drift -> StabilityError
  formal,   // evaluate the frequency-domain response anyway; LinearSystem::stable records it
};

struct LinearSystem {
  DriftMatrix drift = DriftMatrix::Zero();
  NoiseCoupling noise_coupling = NoiseCoupling::Zero();
  EigenvalueVector eigenvalues = EigenvalueVector::Zero();
  bool stable = false;
  PhysicalParams params;  // the working point this system was built from

  double max_real_eigenvalue() const { return eigenvalues.real().maxCoeff(); }
};

inline EigenvalueVector drift_eigenvalues(const DriftMatrix& a) {
  Eigen::EigenSolver<DriftMatrix> solver(a, /*computeEigenvectors=*/false);
  return solver.eigenvalues();
}

/// Rewrites the linearized Langevin equations in quadratures.
///
///   q_j' = Omega p_j
///   p_j' = -Omega q_j - Gamma p_j + s_j g alpha X_aj - s_j G (Re b X_b + Im b Y_b) + xi_j
///   X_aj' = -gamma_a/2 X_aj + sqrt(gamma_a) X_aj^in
///   Y_aj' = -gamma_a/2 Y_aj + 2 s_j g alpha q_j + sqrt(gamma_a) Y_aj^in
///   X_b' = -gamma_b/2 X_b - Delta_b Y_b + 2 G Im b (q1 - q2) + sqrt(gamma_b) X_b^in
///   Y_b' = -gamma_b/2 Y_b + Delta_b X_b - 2 G Re b (q1 - q2) + sqrt(gamma_b) Y_b^in
///
/// with s_1 = +1, s_2 = -1 and b the steady entangler amplitude beta.
inline LinearSystem build_linear_system(const PhysicalParams& p, const SteadyState& ss,
                                        StabilityPolicy policy = StabilityPolicy::enforce) {
  validate(p);
  if (ss.alpha.imag() != 0.0) throw InvalidParameter("meter amplitude alpha must be real");

  LinearSystem sys;
  sys.params = p;
  auto& a = sys.drift;
  auto& b = sys.noise_coupling;

  const double g_alpha = p.g * ss.alpha.real();
  const double re_beta = ss.beta.real();
  const double im_beta = ss.beta.imag();

  const Var q[2] = {Var::q1, Var::q2};
  const Var mom[2] = {Var::p1, Var::p2};
  const Var xa[2] = {Var::xa1, Var::xa2};
  const Var ya[2] = {Var::ya1, Var::ya2};
  const Noise xi[2] = {Noise::xi1, Noise::xi2};
  const Noise xa_in[2] = {Noise::xa1_in, Noise::xa2_in};
  const Noise ya_in[2] = {Noise::ya1_in, Noise::ya2_in};

  for (int j = 0; j < 2; ++j) {
    const double s = (j == 0) ? 1.0 : -1.0;
    a(idx(q[j]), idx(mom[j])) = p.big_omega;

    a(idx(mom[j]), idx(q[j])) = -p.big_omega;
    a(idx(mom[j]), idx(mom[j])) = -p.big_gamma;
    a(idx(mom[j]), idx(xa[j])) = s * g_alpha;
    a(idx(mom[j]), idx(Var::xb)) = -s * p.big_g * re_beta;
    a(idx(mom[j]), idx(Var::yb)) = -s * p.big_g * im_beta;

    a(idx(xa[j]), idx(xa[j])) = -0.5 * p.gamma_a;
    a(idx(ya[j]), idx(ya[j])) = -0.5 * p.gamma_a;
    a(idx(ya[j]), idx(q[j])) = 2.0 * s * g_alpha;

    b(idx(mom[j]), idx(xi[j])) = 1.0;
    b(idx(xa[j]), idx(xa_in[j])) = std::sqrt(p.gamma_a);
    b(idx(ya[j]), idx(ya_in[j])) = std::sqrt(p.gamma_a);
  }

  a(idx(Var::xb), idx(Var::xb)) = -0.5 * p.gamma_b;
  a(idx(Var::xb), idx(Var::yb)) = -p.delta_b;
  a(idx(Var::xb), idx(Var::q1)) = 2.0 * p.big_g * im_beta;
  a(idx(Var::xb), idx(Var::q2)) = -2.0 * p.big_g * im_beta;

  a(idx(Var::yb), idx(Var::yb)) = -0.5 * p.gamma_b;
  a(idx(Var::yb), idx(Var::xb)) = p.delta_b;
  a(idx(Var::yb), idx(Var::q1)) = -2.0 * p.big_g * re_beta;
  a(idx(Var::yb), idx(Var::q2)) = 2.0 * p.big_g * re_beta;

  b(idx(Var::xb), idx(Noise::xb_in)) = std::sqrt(p.gamma_b);
  b(idx(Var::yb), idx(Noise::yb_in)) = std::sqrt(p.gamma_b);

  sys.eigenvalues = drift_eigenvalues(a);
  sys.stable = sys.max_real_eigenvalue() < 0.0;
  if (!sys.stable && policy == StabilityPolicy::enforce) {
    std::vector<cplx> offending;
    for (int i = 0; i < kStateDim; ++i) {
      if (sys.eigenvalues(i).real() >= 0.0) offending.push_back(sys.eigenvalues(i));
    }
    throw StabilityError("drift matrix is unstable: max Re(lambda) = " +
                             std::to_string(sys.max_real_eigenvalue()) + " 1/s",
                         std::move(offending));
  }
  return sys;
}

inline LinearSystem build_linear_system(const PhysicalParams& p,
                                        StabilityPolicy policy = StabilityPolicy::enforce) {
  return build_linear_system(p, steady_state(p), policy);
}

// ---------------------------------------------------------------------------------------
// Input noise

enum class BrownianKernel {
  standard,  // (Gamma w / Omega) [coth(hbar w / 2kT) + 1]; preserves [q, p] = i
  halved,    // (Gamma w / 2 Omega) [coth(hbar w / 2kT) + 1]; kept for comparison only
};

struct NoiseModel {
  double temperature = 0.0;
  double big_gamma = 1.0;
  double big_omega = 1.0;
  BrownianKernel kernel = BrownianKernel::standard;

  /// Non-symmetrized Brownian spectrum <xi(w) xi(-w)>.
  double brownian_spectrum(double w) const {
    const double scale =
        (kernel == BrownianKernel::standard ? 1.0 : 0.5) * big_gamma / big_omega;
    if (temperature == 0.0) return w > 0.0 ? 2.0 * scale * w : 0.0;
    const double thermal_rate = constants::k_boltzmann * temperature / constants::hbar;
    if (w == 0.0) return 2.0 * scale * thermal_rate;
    // w [coth(x) + 1] = 2 w / (1 - e^{-2x}), x = hbar w / 2kT
    return 2.0 * scale * w / -std::expm1(-w / thermal_rate);
  }

  /// D(w) with D_kl = <n_k(w) n_l(-w)>.
  InputSpectrum input_spectrum(double w) const {
    InputSpectrum d = InputSpectrum::Zero();
    const double s_xi = brownian_spectrum(w);
    d(idx(Noise::xi1), idx(Noise::xi1)) = s_xi;
    d(idx(Noise::xi2), idx(Noise::xi2)) = s_xi;
    for (int k = idx(Noise::xa1_in); k < kNoiseDim; k += 2) {
      d(k, k) = 1.0;
      d(k + 1, k + 1) = 1.0;
      d(k, k + 1) = cplx(0.0, 1.0);
      d(k + 1, k) = cplx(0.0, -1.0);
    }
    return d;
  }

  /// D(w) - D(-w)^T: the commutator spectra of the inputs, independent of temperature.
  InputSpectrum commutator_spectrum(double w) const {
    InputSpectrum c = InputSpectrum::Zero();
    const double scale =
        (kernel == BrownianKernel::standard ? 1.0 : 0.5) * big_gamma / big_omega;
    c(idx(Noise::xi1), idx(Noise::xi1)) = 2.0 * scale * w;
    c(idx(Noise::xi2), idx(Noise::xi2)) = 2.0 * scale * w;
    for (int k = idx(Noise::xa1_in); k < kNoiseDim; k += 2) {
      c(k, k + 1) = cplx(0.0, 2.0);
      c(k + 1, k) = cplx(0.0, -2.0);
    }
    return c;
  }

  /// (D(w) + D(-w)^T) / 2: spectra of the symmetrized (anticommutator) correlations.
  InputSpectrum symmetrized_spectrum(double w) const {
    return 0.5 * (input_spectrum(w) + input_spectrum(-w).transpose());
  }
};

inline NoiseModel make_noise_model(const PhysicalParams& p,
                                   BrownianKernel kernel = BrownianKernel::standard) {
  return NoiseModel{p.temperature, p.big_gamma, p.big_omega, kernel};
}

// ---------------------------------------------------------------------------------------
// Frequency-domain solution

/// M(w) = (-iw I - A)^{-1} B by a dense LU solve.
inline TransferMatrix transfer_matrix(const LinearSystem& sys, double w) {
  SpectralMatrix shifted = -sys.drift.cast<cplx>();
  shifted.diagonal().array() += cplx(0.0, -w);
  Eigen::PartialPivLU<SpectralMatrix> lu(shifted);
  const double rcond = lu.rcond();
  if (!(rcond > 64.0 * std::numeric_limits<double>::epsilon())) {
    throw SingularMatrixError("(-i w I - A) is singular at w = " + std::to_string(w) +
                              " (rcond = " + std::to_string(rcond) + ")");
  }
  return lu.solve(sys.noise_coupling.cast<cplx>());
}

/// Coordinates a transfer matrix is expressed in.
///   natural:      q1, p1, q2, p2, optics
///   mirror_modes: q+, p+, q-, p-, optics with q+- = (q1 +- q2)/sqrt2, p+- = (p1 +- p2)/sqrt2
enum class StateBasis { natural, mirror_modes };

/// Orthogonal R with x_modes = R x_natural.
inline DriftMatrix mirror_mode_rotation() {
  const double s = std::sqrt(0.5);
  DriftMatrix r = DriftMatrix::Identity();
  r.topLeftCorner<4, 4>() << s, 0, s, 0,
                             0, s, 0, s,
                             s, 0, -s, 0,
                             0, s, 0, -s;
  return r;
}

/// M in the mirror_modes basis. The centre-of-mass and relative modes decouple in A, so the
/// relative rows are solved to their own precision; in the natural basis p1 - p2 near
/// resonance is a difference of two large common-mode responses and loses most digits.
inline TransferMatrix mode_transfer_matrix(const LinearSystem& sys, double w) {
  const DriftMatrix r = mirror_mode_rotation();
  LinearSystem rotated;
  rotated.drift = r * sys.drift * r.transpose();
  rotated.noise_coupling = r * sys.noise_coupling;
  return transfer_matrix(rotated, w);
}

inline TransferMatrix transfer_matrix(const LinearSystem& sys, double w, StateBasis basis) {
  return basis == StateBasis::natural ? transfer_matrix(sys, w) : mode_transfer_matrix(sys, w);
}

/// Fast path through the eigendecomposition A = V L V^{-1}:
/// M(w) = V (-iw - L)^{-1} V^{-1} B. Falls back to the direct solve when V is
/// ill-conditioned (A defective or nearly so).
class EigenTransfer {
 public:
  explicit EigenTransfer(const LinearSystem& sys, double max_condition = 1e8) : sys_(&sys) {
    Eigen::EigenSolver<DriftMatrix> solver(sys.drift, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success) {
      defective_ = true;
      return;
    }
    const SpectralMatrix v = solver.eigenvectors();
    Eigen::JacobiSVD<SpectralMatrix> svd(v);
    const auto& sv = svd.singularValues();
    const double condition = sv(0) / sv(kStateDim - 1);
    if (!(condition < max_condition)) {
      defective_ = true;
      return;
    }
    lambda_ = solver.eigenvalues();
    v_ = v;
    vinv_b_ = v.partialPivLu().solve(sys.noise_coupling.cast<cplx>());
  }

  bool defective() const noexcept { return defective_; }

  TransferMatrix operator()(double w) const {
    if (defective_) return transfer_matrix(*sys_, w);
    Eigen::Matrix<cplx, kStateDim, 1> inv;
    for (int i = 0; i < kStateDim; ++i) {
      const cplx denom = cplx(0.0, -w) - lambda_(i);
      if (std::abs(denom) == 0.0) {
        throw SingularMatrixError("eigenvalue on the imaginary axis at w = " + std::to_string(w));
      }
      inv(i) = 1.0 / denom;
    }
    return v_ * inv.asDiagonal() * vinv_b_;
  }

 private:
  const LinearSystem* sys_;
  bool defective_ = false;
  EigenvalueVector lambda_;
  SpectralMatrix v_;
  TransferMatrix vinv_b_;
};

/// S(w) = M(w) D(w) M(-w)^T; entry (O, P) is the stationary <O(w) P(-w)>.
inline SpectralMatrix spectral_matrix(const TransferMatrix& m_plus, const TransferMatrix& m_minus,
                                      const InputSpectrum& d) {
  return m_plus * d * m_minus.transpose();
}

inline SpectralMatrix spectral_matrix(const LinearSystem& sys, const NoiseModel& noise, double w) {
  return spectral_matrix(transfer_matrix(sys, w), transfer_matrix(sys, -w), noise.input_spectrum(w));
}

/// Spectra at +w and -w from a single LU solve (A and B are real, so M(-w) = conj M(w)).
struct SpectralPair {
  double omega = 0.0;
  StateBasis basis = StateBasis::natural;
  SpectralMatrix plus;   // S(w)
  SpectralMatrix minus;  // S(-w)
  SpectralMatrix commutator_plus;   // M(w) [D(w) - D(-w)^T] M(-w)^T
  SpectralMatrix commutator_minus;  // same at -w
};

inline SpectralPair spectral_pair(const TransferMatrix& m, const NoiseModel& noise, double w,
                                  StateBasis basis = StateBasis::natural) {
  const TransferMatrix mc = m.conjugate();
  SpectralPair out;
  out.omega = w;
  out.basis = basis;
  out.plus = m * noise.input_spectrum(w) * mc.transpose();
  out.minus = mc * noise.input_spectrum(-w) * m.transpose();
  out.commutator_plus = m * noise.commutator_spectrum(w) * mc.transpose();
  out.commutator_minus = mc * noise.commutator_spectrum(-w) * m.transpose();
  return out;
}

inline SpectralPair spectral_pair(const LinearSystem& sys, const NoiseModel& noise, double w,
                                  StateBasis basis = StateBasis::natural) {
  return spectral_pair(transfer_matrix(sys, w, basis), noise, w, basis);
}

// ---------------------------------------------------------------------------------------
// Frequency grids

inline std::vector<double> linear_grid(double lo, double hi, int count) {
  if (count < 1) throw InvalidParameter("grid needs at least one point");
  if (count == 1) return {lo};
  if (!(hi > lo)) throw InvalidParameter("grid bounds must satisfy max > min");
  std::vector<double> out(static_cast<std::size_t>(count));
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[static_cast<std::size_t>(i)] = lo + step * i;
  out.back() = hi;
  return out;
}

inline std::vector<double> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0)) throw InvalidParameter("log grid needs a positive lower bound");
  if (count == 1) return {lo};
  auto exps = linear_grid(std::log(lo), std::log(hi), count);
  for (auto& e : exps) e = std::exp(e);
  exps.front() = lo;
  exps.back() = hi;
  return exps;
}

/// Log-spaced coverage of [lo, hi] merged with a dense linear window around the resonance.
/// Points closer than 1e-9 relative are merged; the result is strictly increasing.
inline std::vector<double> hybrid_grid(double resonance, double lo, double hi, int log_count,
                                       double window_halfwidth = 0.5, int window_count = 2001) {
  auto pts = log_grid(lo, hi, log_count);
  const auto dense = linear_grid(resonance * (1.0 - window_halfwidth),
                                 resonance * (1.0 + window_halfwidth), window_count);
  pts.insert(pts.end(), dense.begin(), dense.end());
  std::sort(pts.begin(), pts.end());
  std::vector<double> out;
  for (double v : pts) {
    if (out.empty() || v - out.back() > 1e-9 * std::abs(v)) {
      out.push_back(v);
    } else if (std::abs(v - resonance) < std::abs(out.back() - resonance)) {
      out.back() = v;  // keep the exact resonance point
    }
  }
  return out;
}

/// Default grid: 2001 points over [0.5, 1.5] Omega plus 512 log points over [1e-2, 1e2] Omega.
inline std::vector<double> default_grid(double big_omega) {
  return hybrid_grid(big_omega, 1e-2 * big_omega, 1e2 * big_omega, 512);
}

}  // namespace ponder
