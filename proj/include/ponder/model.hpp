#pragma once

/**
 * Physical parameters of the two-mirror optomechanical setup and the classical steady
 * state around which the quantum Langevin equations are linearized.
 *
 * Mechanical operators are dimensionless, q = x sqrt(m Omega / hbar) and
 * p = P / sqrt(hbar m Omega), so [q, p] = i. The couplings g and G are already expressed
 * per unit of dimensionless displacement (g = g~/sqrt(m Omega)).
 *
 * The meter detuning is fixed to zero and the entangler detuning delta_b is taken as the
 * effective detuning, static mirror shift included. No self-consistency loop is solved.
 */

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "ponder/config.hpp"
#include "ponder/errors.hpp"

namespace ponder {

using cplx = std::complex<double>;

namespace constants {
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double k_boltzmann = 1.380649e-23;  // J / K
inline constexpr double speed_of_light = 299792458.0;  // m / s
inline constexpr double default_wavelength = 1064e-9;  // m
}  // namespace constants

/// Angular frequency of light with the given vacuum wavelength.
inline double optical_angular_frequency(double wavelength) {
  if (!(wavelength > 0.0)) throw InvalidParameter("wavelength must be positive");
  return 2.0 * std::numbers::pi * constants::speed_of_light / wavelength;
}

struct PhysicalParams {
  double omega_a = optical_angular_frequency(constants::default_wavelength);
  double omega_b = optical_angular_frequency(constants::default_wavelength);
  double omega_a0 = optical_angular_frequency(constants::default_wavelength);
  double omega_b0 = optical_angular_frequency(constants::default_wavelength);
  double gamma_a = 1e5;      // 1/s
  double gamma_b = 1e5;      // 1/s
  double big_omega = 1e5;    // rad/s
  double mass = 1e-5;        // kg
  double big_gamma = 1.0;    // 1/s
  double g = 0.5;            // 1/s
  double big_g = 5.0;        // 1/s
  double p_in_a = 5e-4;      // W
  double p_in_b = 5e-3;      // W
  double delta_b = 1e5;      // rad/s
  double temperature = 4.0;  // K

  bool operator==(const PhysicalParams&) const = default;
};

/// Working point used by the default configuration.
inline PhysicalParams default_params() { return PhysicalParams{}; }

/// Throws InvalidParameter on a hard violation; returns human-readable warnings for
/// soft ones (weak entangler relative to the meters).
inline std::vector<std::string> validate(const PhysicalParams& p) {
  const auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw InvalidParameter(std::string(name) + " must be strictly positive and finite");
    }
  };
  positive(p.omega_a, "omega_a");
  positive(p.omega_b, "omega_b");
  positive(p.omega_a0, "omega_a0");
  positive(p.omega_b0, "omega_b0");
  positive(p.gamma_a, "gamma_a");
  positive(p.gamma_b, "gamma_b");
  positive(p.big_omega, "big_omega");
  positive(p.mass, "mass");
  positive(p.big_gamma, "big_gamma");
  if (!(p.g >= 0.0) || !std::isfinite(p.g)) throw InvalidParameter("g must be >= 0");
  if (!(p.big_g >= 0.0) || !std::isfinite(p.big_g)) throw InvalidParameter("big_g must be >= 0");
  if (!(p.p_in_a >= 0.0) || !std::isfinite(p.p_in_a)) throw InvalidParameter("p_in_a must be >= 0");
  if (!(p.p_in_b >= 0.0) || !std::isfinite(p.p_in_b)) throw InvalidParameter("p_in_b must be >= 0");
  if (!std::isfinite(p.delta_b)) throw InvalidParameter("delta_b must be finite");
  if (!(p.temperature >= 0.0) || !std::isfinite(p.temperature)) {
    throw InvalidParameter("temperature must be >= 0");
  }

  std::vector<std::string> warnings;
  if (!(p.g < p.big_g)) {
    warnings.emplace_back("g >= big_g: the entangler coupling should dominate the meter coupling");
  }
  if (!(p.p_in_a < p.p_in_b)) {
    warnings.emplace_back("p_in_a >= p_in_b: the entangler drive should exceed the meter drive");
  }
  return warnings;
}

/// Photon-flux amplitude sqrt(P / (hbar w)) of a drive with power P at angular frequency w.
inline double power_to_amplitude(double power, double drive_frequency) {
  if (!(drive_frequency > 0.0)) throw InvalidParameter("drive frequency must be positive");
  if (!(power >= 0.0)) throw InvalidParameter("power must be non-negative");
  return std::sqrt(power / (constants::hbar * drive_frequency));
}

struct SteadyState {
  cplx alpha;  // meter amplitude; real by the choice of phase reference
  cplx beta;   // entangler amplitude
  double q1_ss = 0.0;
  double q2_ss = 0.0;
  double p1_ss = 0.0;
  double p2_ss = 0.0;
};

inline SteadyState steady_state(const PhysicalParams& p) {
  validate(p);
  const double alpha_in = power_to_amplitude(p.p_in_a, p.omega_a0);
  const double beta_in = power_to_amplitude(p.p_in_b, p.omega_b0);

  SteadyState ss;
  // Resonant meter: alpha = sqrt(gamma_a) alpha_in / (gamma_a / 2), exactly real.
  ss.alpha = cplx(std::sqrt(p.gamma_a) * alpha_in / (0.5 * p.gamma_a), 0.0);
  ss.beta = std::sqrt(p.gamma_b) * beta_in / cplx(0.5 * p.gamma_b, -p.delta_b);

  const double push = (p.big_g * std::norm(ss.beta) - p.g * std::norm(ss.alpha)) / p.big_omega;
  ss.q1_ss = -push;
  ss.q2_ss = push;
  return ss;
}

/// Reads PhysicalParams fields (SI units, keys named as the struct members) plus the
/// convenience key `wavelength`, which sets all four optical frequencies at once.
inline void apply_config(KeyValueConfig& cfg, PhysicalParams& p) {
  if (auto wl = cfg.take("wavelength")) {
    const double w = optical_angular_frequency(detail::parse_double(*wl, "wavelength"));
    p.omega_a = p.omega_b = p.omega_a0 = p.omega_b0 = w;
  }
  cfg.take_double("omega_a", p.omega_a);
  cfg.take_double("omega_b", p.omega_b);
  cfg.take_double("omega_a0", p.omega_a0);
  cfg.take_double("omega_b0", p.omega_b0);
  cfg.take_double("gamma_a", p.gamma_a);
  cfg.take_double("gamma_b", p.gamma_b);
  cfg.take_double("big_omega", p.big_omega);
  cfg.take_double("mass", p.mass);
  cfg.take_double("big_gamma", p.big_gamma);
  cfg.take_double("g", p.g);
  cfg.take_double("big_g", p.big_g);
  cfg.take_double("p_in_a", p.p_in_a);
  cfg.take_double("p_in_b", p.p_in_b);
  cfg.take_double("delta_b", p.delta_b);
  cfg.take_double("temperature", p.temperature);
}

}  // namespace ponder
