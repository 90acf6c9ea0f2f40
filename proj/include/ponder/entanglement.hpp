#pragma once

/**
 * Product-form inseparability criterion.
 *
 * For u = |a| q1 + q2 / a and v = |a| p1 - p2 / a (any real a != 0), every separable state
 * satisfies Var(u) Var(v) >= |<[q1, p1]>|^2. Products below a quarter of the bound signal
 * EPR-type correlations.
 *
 * Two evaluators live here:
 *  - degree_of_entanglement(): the spectral version on the hermitian frequency components
 *    R_O(w) = [O(w) + O(-w)] / 2 of the mirror quadratures (a = 1), evaluated in the
 *    mirror normal-mode basis so that Var(v) keeps its digits near resonance;
 *  - separability_product(): the same inequality on a two-mode Gaussian covariance matrix.
 */

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "ponder/dynamics.hpp"
#include "ponder/errors.hpp"

namespace ponder {

using Selector = StateVector;

inline Selector unit_selector(Var v) {
  Selector s = Selector::Zero();
  s(idx(v)) = 1.0;
  return s;
}

/// u = q1 + q2
inline Selector u_selector(StateBasis basis = StateBasis::natural) {
  if (basis == StateBasis::mirror_modes) return std::sqrt(2.0) * unit_selector(Var::q1);
  return unit_selector(Var::q1) + unit_selector(Var::q2);
}
/// v = p1 - p2
inline Selector v_selector(StateBasis basis = StateBasis::natural) {
  if (basis == StateBasis::mirror_modes) return std::sqrt(2.0) * unit_selector(Var::p2);
  return unit_selector(Var::p1) - unit_selector(Var::p2);
}
/// q1 and p1 of mirror 1 in either basis.
inline Selector q1_selector(StateBasis basis = StateBasis::natural) {
  if (basis == StateBasis::mirror_modes) {
    return std::sqrt(0.5) * (unit_selector(Var::q1) + unit_selector(Var::q2));
  }
  return unit_selector(Var::q1);
}
inline Selector p1_selector(StateBasis basis = StateBasis::natural) {
  if (basis == StateBasis::mirror_modes) {
    return std::sqrt(0.5) * (unit_selector(Var::p1) + unit_selector(Var::p2));
  }
  return unit_selector(Var::p1);
}

/// <R_O(w) R_P(w)> = [c1^T S(w) c2 + c1^T S(-w) c2] / 4 in the stationary limit, where the
/// same-sign terms <O(w) P(w)> vanish.
inline cplx r_correlation(const SpectralMatrix& s_plus, const SpectralMatrix& s_minus,
                          const Selector& c1, const Selector& c2) {
  const Eigen::Matrix<cplx, kStateDim, 1> a = c1.cast<cplx>();
  const Eigen::Matrix<cplx, kStateDim, 1> b = c2.cast<cplx>();
  return 0.25 * (a.transpose() * s_plus * b + a.transpose() * s_minus * b)(0, 0);
}

inline cplx r_correlation(const SpectralPair& s, const Selector& c1, const Selector& c2) {
  return r_correlation(s.plus, s.minus, c1, c2);
}

/// <[R_O(w), R_P(w)]> from the commutator spectra M (D(w) - D(-w)^T) M(-w)^T.
inline cplx r_commutator(const SpectralPair& s, const Selector& c1, const Selector& c2) {
  return r_correlation(s.commutator_plus, s.commutator_minus, c1, c2);
}

struct EntanglementPoint {
  double omega = 0.0;
  double temperature = 0.0;
  double var_u = 0.0;
  double var_v = 0.0;
  double commutator_sq = 0.0;
  double degree = 0.0;
  bool epr = false;
  bool entangled = false;
};

/// Relative tolerance on the imaginary residue of the hermitian variances.
inline constexpr double kHermiticityTolerance = 1e-10;

inline EntanglementPoint degree_of_entanglement(const SpectralPair& s, double temperature) {
  const cplx var_u = r_correlation(s, u_selector(s.basis), u_selector(s.basis));
  const cplx var_v = r_correlation(s, v_selector(s.basis), v_selector(s.basis));
  for (const cplx& v : {var_u, var_v}) {
    if (std::abs(v.imag()) > kHermiticityTolerance * std::abs(v.real())) {
      throw Error("variance of a hermitian combination has a non-negligible imaginary part");
    }
  }
  const cplx comm = r_commutator(s, q1_selector(s.basis), p1_selector(s.basis));

  EntanglementPoint pt;
  pt.omega = s.omega;
  pt.temperature = temperature;
  pt.var_u = var_u.real();
  pt.var_v = var_v.real();
  pt.commutator_sq = std::norm(comm);
  const double scale = std::sqrt(std::abs(pt.var_u * pt.var_v));
  if (!(pt.commutator_sq > 0.0) || !std::isfinite(pt.commutator_sq) ||
      std::sqrt(pt.commutator_sq) < 1e-14 * scale) {
    throw DegenerateCommutatorError("vanishing commutator |<[R_q1, R_p1]>|^2 at w = " +
                                    std::to_string(s.omega));
  }
  pt.degree = pt.var_u * pt.var_v / pt.commutator_sq;
  pt.entangled = pt.degree < 1.0;
  pt.epr = pt.degree < 0.25;
  return pt;
}

inline EntanglementPoint degree_of_entanglement(const LinearSystem& sys, const NoiseModel& noise,
                                                double w) {
  return degree_of_entanglement(spectral_pair(sys, noise, w, StateBasis::mirror_modes),
                                noise.temperature);
}

// ---------------------------------------------------------------------------------------
// Two-mode Gaussian states

/// Ordering (q1, p1, q2, p2); cov_ij = <{dO_i, dO_j}> / 2. Vacuum is cov = I / 2.
struct GaussianState {
  Eigen::Vector4d mean = Eigen::Vector4d::Zero();
  Eigen::Matrix4d cov = 0.5 * Eigen::Matrix4d::Identity();
};

/// Canonical form with [q, p] = i, block-diagonal over the two modes.
inline Eigen::Matrix4d symplectic_form() {
  Eigen::Matrix4d s = Eigen::Matrix4d::Zero();
  s(0, 1) = 1.0;
  s(1, 0) = -1.0;
  s(2, 3) = 1.0;
  s(3, 2) = -1.0;
  return s;
}

/// Smallest eigenvalue of cov + (i/2) Sigma; negative means the matrix is not a quantum
/// covariance matrix.
inline double physicality_margin(const Eigen::Matrix4d& cov) {
  const Eigen::Matrix4cd h = cov.cast<cplx>() + cplx(0.0, 0.5) * symplectic_form().cast<cplx>();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().minCoeff();
}

inline void require_physical(const GaussianState& state) {
  const double scale = std::max(1.0, state.cov.cwiseAbs().maxCoeff());
  if (!state.cov.allFinite() || !state.mean.allFinite()) {
    throw PhysicalityError("covariance or mean contains non-finite entries",
                           -std::numeric_limits<double>::infinity());
  }
  const double asym = (state.cov - state.cov.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw PhysicalityError("covariance matrix is not symmetric (max |C - C^T| = " +
                               std::to_string(asym) + ")",
                           -asym);
  }
  const double margin = physicality_margin(state.cov);
  if (margin < -1e-12 * scale) {
    throw PhysicalityError(
        "covariance violates cov + (i/2) Sigma >= 0 (min eigenvalue " + std::to_string(margin) + ")",
        margin);
  }
}

struct SeparabilityReport {
  double a = 1.0;
  double product = 0.0;
  double bound = 1.0;  // |<[q1, p1]>|^2

  bool entangled() const { return product < bound; }
  bool epr() const { return product < 0.25 * bound; }
};

namespace detail {

inline double separability_product_unchecked(const Eigen::Matrix4d& cov, double a) {
  const double s = std::abs(a);
  const Eigen::Vector4d u(s, 0.0, 1.0 / a, 0.0);
  const Eigen::Vector4d v(0.0, s, 0.0, -1.0 / a);
  return (u.dot(cov * u)) * (v.dot(cov * v));
}

}  // namespace detail

/// Var(|a| q1 + q2/a) Var(|a| p1 - p2/a) against the separable bound 1.
inline SeparabilityReport separability_product(const GaussianState& state, double a) {
  if (a == 0.0 || !std::isfinite(a)) throw InvalidParameter("scaling a must be finite and nonzero");
  require_physical(state);
  return {a, detail::separability_product_unchecked(state.cov, a), 1.0};
}

/// Golden-section search on log a over [1e-3, 1e3]. Never returns a worse product than a = 1.
inline SeparabilityReport optimize_separability(const GaussianState& state) {
  require_physical(state);
  const auto f = [&](double log_a) {
    return detail::separability_product_unchecked(state.cov, std::exp(log_a));
  };
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double lo = std::log(1e-3);
  double hi = std::log(1e3);
  double x1 = hi - inv_phi * (hi - lo);
  double x2 = lo + inv_phi * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > 1e-12) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - inv_phi * (hi - lo);
      f1 = f(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + inv_phi * (hi - lo);
      f2 = f(x2);
    }
  }
  const double best = 0.5 * (lo + hi);
  SeparabilityReport out{std::exp(best), f(best), 1.0};
  const double at_one = f(0.0);
  if (at_one <= out.product) out = {1.0, at_one, 1.0};
  return out;
}

/// Default a-grid {2^k : k = -5..5}.
inline std::vector<double> default_a_grid() {
  std::vector<double> out;
  for (int k = -5; k <= 5; ++k) out.push_back(std::ldexp(1.0, k));
  return out;
}

/// Reads 16 whitespace-separated numbers (row-major covariance), optionally followed by
/// 4 more (mean vector). '#' starts a comment.
inline GaussianState read_gaussian_state(std::istream& in) {
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream row(line);
    std::string token;
    while (row >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ConfigError("covariance file: not a number: '" + token + "'");
      }
    }
  }
  if (values.size() != 16 && values.size() != 20) {
    throw ConfigError("covariance file: expected 16 (4x4) or 20 (4x4 + mean) numbers, got " +
                      std::to_string(values.size()));
  }
  GaussianState state;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) state.cov(r, c) = values[static_cast<std::size_t>(4 * r + c)];
  }
  if (values.size() == 20) {
    for (int i = 0; i < 4; ++i) state.mean(i) = values[static_cast<std::size_t>(16 + i)];
  }
  return state;
}

inline GaussianState load_gaussian_state(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open covariance file '" + path + "'");
  return read_gaussian_state(in);
}

}  // namespace ponder
