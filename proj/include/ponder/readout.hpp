#pragma once

// Homodyne readout of the meter output phase quadratures.
//
// Boundary relation a_out = sqrt(gamma_a) a - a_in gives, for meter j,
//
//   Y_j^out(w) = gain_j(w) q_j(w) + reflection(w) Y_j^in(w)
//   gain_j(w)      = s_j 2 g alpha sqrt(gamma_a) / (gamma_a/2 - i w),   s_1 = +1, s_2 = -1
//   reflection(w)  = (gamma_a/2 + i w) / (gamma_a/2 - i w)
//
// "Currents" are the sign-corrected outputs I_j = s_j Y_j^out, so I_1 + I_2 tracks
// q1 + q2 and I_1 - I_2 tracks q1 - q2. Output spectra are symmetrized,
// [S(w) + S(-w)] / 2, so a vacuum channel reads exactly 1.

#include <cmath>
#include <vector>

#include "ponder/dynamics.hpp"
#include "ponder/errors.hpp"
#include "ponder/model.hpp"

namespace ponder {

struct ReadoutChannel {
  int channel = 1;           // 1 or 2
  double gamma_a = 1.0;
  double gain_scale = 0.0;   // s_j 2 g alpha sqrt(gamma_a)
  double efficiency = 1.0;   // detector efficiency in (0, 1]; 1 = ideal

  static ReadoutChannel make(const PhysicalParams& p, const SteadyState& ss, int channel,
                             double efficiency = 1.0) {
    if (channel != 1 && channel != 2) throw InvalidParameter("readout channel must be 1 or 2");
    if (!(efficiency > 0.0 && efficiency <= 1.0)) {
      throw InvalidParameter("detector efficiency must lie in (0, 1]");
    }
    const double sign = channel == 1 ? 1.0 : -1.0;
    return {channel, p.gamma_a, sign * 2.0 * p.g * ss.alpha.real() * std::sqrt(p.gamma_a),
            efficiency};
  }

  double sign() const { return channel == 1 ? 1.0 : -1.0; }
  cplx gain(double w) const { return gain_scale / cplx(0.5 * gamma_a, -w); }
  cplx noise_reflection(double w) const {
    return cplx(0.5 * gamma_a, w) / cplx(0.5 * gamma_a, -w);
  }

  Var position() const { return channel == 1 ? Var::q1 : Var::q2; }
  Var cavity_phase() const { return channel == 1 ? Var::ya1 : Var::ya2; }
  Noise input_phase() const { return channel == 1 ? Noise::ya1_in : Noise::ya2_in; }

  /// Mixes in vacuum for a lossy detector.
  double detect(double ideal_spectrum) const {
    return efficiency * ideal_spectrum + (1.0 - efficiency);
  }
};

namespace detail {

/// <Y_out(w) Y_out(-w)> from the closed-form input-output relation, using only the q_j row
/// of the transfer matrix.
inline cplx output_correlation_direct(const ReadoutChannel& ch, const TransferMatrix& m_plus,
                                      const TransferMatrix& m_minus, const InputSpectrum& d,
                                      double w) {
  const int q = idx(ch.position());
  const int yin = idx(ch.input_phase());
  const cplx s_qq = (m_plus.row(q) * d * m_minus.row(q).transpose())(0, 0);
  const cplx s_q_yin = (m_plus.row(q) * d.col(yin))(0, 0);
  const cplx s_yin_q = (d.row(yin) * m_minus.row(q).transpose())(0, 0);
  const cplx gp = ch.gain(w), gm = ch.gain(-w);
  const cplx rp = ch.noise_reflection(w), rm = ch.noise_reflection(-w);
  return gp * gm * s_qq + gp * rm * s_q_yin + rp * gm * s_yin_q + rp * rm * d(yin, yin);
}

/// Row vector mapping noise inputs to Y_out(w) via the intracavity solution:
/// sqrt(gamma_a) Y_a(w) - Y_in(w).
inline Eigen::Matrix<cplx, 1, kNoiseDim> output_row_cavity(const ReadoutChannel& ch,
                                                          const TransferMatrix& m) {
  Eigen::Matrix<cplx, 1, kNoiseDim> row = std::sqrt(ch.gamma_a) * m.row(idx(ch.cavity_phase()));
  row(idx(ch.input_phase())) -= 1.0;
  return row;
}

}  // namespace detail

/// Symmetrized output spectrum of meter j assembled from the input-output relation.
inline double output_spectrum(const LinearSystem& sys, const NoiseModel& noise,
                              const ReadoutChannel& ch, double w) {
  const TransferMatrix mp = transfer_matrix(sys, w);
  const TransferMatrix mm = transfer_matrix(sys, -w);
  const cplx plus = detail::output_correlation_direct(ch, mp, mm, noise.input_spectrum(w), w);
  const cplx minus = detail::output_correlation_direct(ch, mm, mp, noise.input_spectrum(-w), -w);
  return ch.detect(0.5 * (plus + minus).real());
}

/// Same quantity through the full transfer-matrix path (intracavity Y_a solution plus
/// boundary relation). Independent of the closed-form gain and reflection factors.
inline double output_spectrum_cavity(const LinearSystem& sys, const NoiseModel& noise,
                                     const ReadoutChannel& ch, double w) {
  const TransferMatrix mp = transfer_matrix(sys, w);
  const TransferMatrix mm = transfer_matrix(sys, -w);
  const auto rp = detail::output_row_cavity(ch, mp);
  const auto rm = detail::output_row_cavity(ch, mm);
  const cplx plus = (rp * noise.input_spectrum(w) * rm.transpose())(0, 0);
  const cplx minus = (rm * noise.input_spectrum(-w) * rp.transpose())(0, 0);
  return ch.detect(0.5 * (plus + minus).real());
}

/// Homodyne demodulation: [Y(w) + Y(-w)] / 2 (position-like) or i[Y(-w) - Y(w)] / 2
/// (momentum-like).
enum class Demodulation { position, momentum };

/// Symmetrized cross-correlation of the sign-corrected currents I_1, I_2, in output-spectrum
/// units (2 Re <R_1 R_2>), for the chosen demodulation of each channel.
inline double current_cross_spectrum(const LinearSystem& sys, const NoiseModel& noise,
                                     const ReadoutChannel& ch1, const ReadoutChannel& ch2,
                                     double w, Demodulation d1 = Demodulation::position,
                                     Demodulation d2 = Demodulation::position) {
  const TransferMatrix mp = transfer_matrix(sys, w);
  const TransferMatrix mm = transfer_matrix(sys, -w);
  const auto r1p = detail::output_row_cavity(ch1, mp);
  const auto r1m = detail::output_row_cavity(ch1, mm);
  const auto r2p = detail::output_row_cavity(ch2, mp);
  const auto r2m = detail::output_row_cavity(ch2, mm);
  const double signs = ch1.sign() * ch2.sign();
  const cplx s12_plus = signs * (r1p * noise.input_spectrum(w) * r2m.transpose())(0, 0);
  const cplx s12_minus = signs * (r1m * noise.input_spectrum(-w) * r2p.transpose())(0, 0);
  const double eff = std::sqrt(ch1.efficiency * ch2.efficiency);
  if (d1 == d2) return eff * 0.5 * (s12_plus + s12_minus).real();
  const double mixed = 0.5 * (s12_plus - s12_minus).imag();
  return eff * (d1 == Demodulation::position ? -mixed : mixed);
}

struct ChannelSpectrum {
  std::vector<double> omega;
  std::vector<double> value;
};

struct TwoChannelSpectra {
  ChannelSpectrum channel1;
  ChannelSpectrum channel2;
  ChannelSpectrum cross;  // current_cross_spectrum on the same grid
};

inline TwoChannelSpectra two_channel_spectra(const LinearSystem& sys, const NoiseModel& noise,
                                             const ReadoutChannel& ch1, const ReadoutChannel& ch2,
                                             const std::vector<double>& grid) {
  TwoChannelSpectra out;
  out.channel1.omega = out.channel2.omega = out.cross.omega = grid;
  for (double w : grid) {
    out.channel1.value.push_back(output_spectrum(sys, noise, ch1, w));
    out.channel2.value.push_back(output_spectrum(sys, noise, ch2, w));
    out.cross.value.push_back(current_cross_spectrum(sys, noise, ch1, ch2, w));
  }
  return out;
}

enum class CombineMode { sum, difference };

/// Spectrum of I_1 + I_2 (center of mass) or I_1 - I_2 (relative coordinate).
inline ChannelSpectrum combine_currents(const TwoChannelSpectra& data, CombineMode mode) {
  const auto& a = data.channel1;
  const auto& b = data.channel2;
  const auto& c = data.cross;
  if (a.omega != b.omega || a.omega != c.omega) {
    throw GridMismatchError("channel spectra are not on the same frequency grid");
  }
  if (a.value.size() != a.omega.size() || b.value.size() != b.omega.size() ||
      c.value.size() != c.omega.size()) {
    throw GridMismatchError("spectrum length does not match its frequency grid");
  }
  const double sign = mode == CombineMode::sum ? 1.0 : -1.0;
  ChannelSpectrum out;
  out.omega = a.omega;
  out.value.resize(a.value.size());
  for (std::size_t i = 0; i < a.value.size(); ++i) {
    out.value[i] = a.value[i] + b.value[i] + 2.0 * sign * c.value[i];
  }
  return out;
}

struct GainCondition {
  double ratio = 0.0;
  bool satisfied = false;
};

/// g^2 alpha^2 / [(gamma_a^2/4 + w^2)/4] compared against a threshold (default 10).
inline GainCondition gain_condition(const PhysicalParams& p, double w, double threshold = 10.0) {
  const double alpha = steady_state(p).alpha.real();
  const double ratio =
      p.g * p.g * alpha * alpha / ((0.25 * p.gamma_a * p.gamma_a + w * w) / 4.0);
  return {ratio, ratio > threshold};
}

}  // namespace ponder
