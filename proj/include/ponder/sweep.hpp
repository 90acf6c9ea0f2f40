#pragma once

// (omega, temperature) sweeps of the entanglement degree and their serializations.
//
// Points are evaluated in parallel but written to fixed slots, so the CSV body is
// byte-identical for every worker count.

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ponder/config.hpp"
#include "ponder/dynamics.hpp"
#include "ponder/entanglement.hpp"
#include "ponder/model.hpp"
#include "ponder/oracle.hpp"

namespace ponder {

enum class GridSpacing { linear, log, hybrid };

struct SweepSpec {
  double omega_min = 1e3;     // rad/s
  double omega_max = 1e7;     // rad/s
  int omega_count = 512;
  GridSpacing spacing = GridSpacing::hybrid;
  // hybrid only: dense linear window [1 - h, 1 + h] * Omega
  double resonance_halfwidth = 0.5;
  int resonance_count = 2001;
  std::vector<double> temperatures = {0.1, 1.0, 4.0, 10.0, 30.0, 100.0, 300.0};
  int workers = 1;
  bool emit_components = true;
  StabilityPolicy stability = StabilityPolicy::formal;
  BrownianKernel kernel = BrownianKernel::standard;
};

inline std::vector<double> sweep_grid(const SweepSpec& spec, double big_omega) {
  switch (spec.spacing) {
    case GridSpacing::linear:
      return linear_grid(spec.omega_min, spec.omega_max, spec.omega_count);
    case GridSpacing::log:
      return log_grid(spec.omega_min, spec.omega_max, spec.omega_count);
    case GridSpacing::hybrid:
      return hybrid_grid(big_omega, spec.omega_min, spec.omega_max, spec.omega_count,
                         spec.resonance_halfwidth, spec.resonance_count);
  }
  return {};
}

namespace detail {

inline void require_increasing(const std::vector<double>& v, const char* what) {
  if (v.empty()) throw InvalidParameter(std::string(what) + " grid is empty");
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (!(v[i] > v[i - 1])) {
      throw InvalidParameter(std::string(what) + " grid must be strictly increasing");
    }
  }
}

}  // namespace detail

/// Reads sweep keys from a flat config. Physical parameters are handled by apply_config().
inline void apply_config(KeyValueConfig& cfg, SweepSpec& s) {
  cfg.take_double("omega_min", s.omega_min);
  cfg.take_double("omega_max", s.omega_max);
  cfg.take_int("omega_count", s.omega_count);
  cfg.take_double("resonance_halfwidth", s.resonance_halfwidth);
  cfg.take_int("resonance_count", s.resonance_count);
  cfg.take_double_list("temperatures", s.temperatures);
  cfg.take_int("workers", s.workers);
  cfg.take_bool("emit_components", s.emit_components);
  if (auto v = cfg.take("omega_spacing")) {
    if (*v == "linear") s.spacing = GridSpacing::linear;
    else if (*v == "log") s.spacing = GridSpacing::log;
    else if (*v == "hybrid") s.spacing = GridSpacing::hybrid;
    else throw ConfigError("omega_spacing must be linear, log or hybrid");
  }
  if (auto v = cfg.take("stability")) {
    if (*v == "enforce") s.stability = StabilityPolicy::enforce;
    else if (*v == "formal") s.stability = StabilityPolicy::formal;
    else throw ConfigError("stability must be enforce or formal");
  }
  if (auto v = cfg.take("brownian_kernel")) {
    if (*v == "standard") s.kernel = BrownianKernel::standard;
    else if (*v == "halved") s.kernel = BrownianKernel::halved;
    else throw ConfigError("brownian_kernel must be standard or halved");
  }
}

struct SweepResult {
  std::vector<double> omega;
  std::vector<double> temperatures;
  std::vector<EntanglementPoint> points;  // temperature-major: points[t * omega.size() + w]
  bool stable = false;
  double max_real_eigenvalue = 0.0;

  const EntanglementPoint& at(std::size_t t, std::size_t w) const {
    return points[t * omega.size() + w];
  }
};

inline SweepResult run_sweep(const PhysicalParams& params, const SweepSpec& spec) {
  const LinearSystem sys = build_linear_system(params, spec.stability);
  SweepResult out;
  out.omega = sweep_grid(spec, params.big_omega);
  out.temperatures = spec.temperatures;
  detail::require_increasing(out.omega, "omega");
  detail::require_increasing(out.temperatures, "temperature");
  for (double t : out.temperatures) {
    if (!(t >= 0.0)) throw InvalidParameter("temperatures must be >= 0");
  }
  out.stable = sys.stable;
  out.max_real_eigenvalue = sys.max_real_eigenvalue();

  const std::size_t n_w = out.omega.size();
  const std::size_t n_t = out.temperatures.size();
  out.points.resize(n_w * n_t);
  std::vector<NoiseModel> noises;
  for (double t : out.temperatures) {
    PhysicalParams pt = params;
    pt.temperature = t;
    noises.push_back(make_noise_model(pt, spec.kernel));
  }
  // One transfer-matrix solve per frequency serves every temperature.
  parallel_for(n_w, spec.workers, [&](std::size_t w) {
    const TransferMatrix m = mode_transfer_matrix(sys, out.omega[w]);
    for (std::size_t t = 0; t < n_t; ++t) {
      out.points[t * n_w + w] = degree_of_entanglement(
          spectral_pair(m, noises[t], out.omega[w], StateBasis::mirror_modes), out.temperatures[t]);
    }
  });
  return out;
}

// ---------------------------------------------------------------------------------------
// Output

namespace detail {

inline std::string sci(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15e", v);
  return buf;
}

}  // namespace detail

inline std::string csv_header(bool emit_components) {
  return emit_components
             ? "omega,temperature,var_u,var_v,commutator_sq,degree,degree_clipped,entangled,epr\n"
             : "omega,temperature,degree,degree_clipped,entangled,epr\n";
}

/// One row per (temperature, omega), temperature-major. degree_clipped = min(degree, 1).
inline std::string format_csv(const SweepResult& r, bool emit_components) {
  std::string out = csv_header(emit_components);
  for (std::size_t t = 0; t < r.temperatures.size(); ++t) {
    for (std::size_t w = 0; w < r.omega.size(); ++w) {
      const auto& p = r.at(t, w);
      out += detail::sci(p.omega) + ',' + detail::sci(p.temperature) + ',';
      if (emit_components) {
        out += detail::sci(p.var_u) + ',' + detail::sci(p.var_v) + ',' +
               detail::sci(p.commutator_sq) + ',';
      }
      out += detail::sci(p.degree) + ',' + detail::sci(std::min(p.degree, 1.0)) + ',' +
             (p.entangled ? "1" : "0") + ',' + (p.epr ? "1" : "0") + '\n';
    }
  }
  return out;
}

/// gnuplot-ready blocks: "omega temperature degree_clipped", blank line between temperatures.
inline std::string format_grid(const SweepResult& r) {
  std::string out = "# omega temperature degree_clipped\n";
  for (std::size_t t = 0; t < r.temperatures.size(); ++t) {
    if (t > 0) out += '\n';
    for (std::size_t w = 0; w < r.omega.size(); ++w) {
      const auto& p = r.at(t, w);
      out += detail::sci(p.omega) + ' ' + detail::sci(p.temperature) + ' ' +
             detail::sci(std::min(p.degree, 1.0)) + '\n';
    }
  }
  return out;
}

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

struct TemperatureSummary {
  double temperature = 0.0;
  double min_degree = 0.0;
  double argmin_omega = 0.0;
  std::vector<Interval> entangled_bands;  // contiguous grid runs with degree < 1
  std::vector<Interval> epr_bands;        // contiguous grid runs with degree < 1/4
};

inline std::vector<TemperatureSummary> summarize(const SweepResult& r) {
  std::vector<TemperatureSummary> out;
  const auto bands = [&](std::size_t t, auto pred) {
    std::vector<Interval> res;
    bool open = false;
    for (std::size_t w = 0; w < r.omega.size(); ++w) {
      const bool in = pred(r.at(t, w));
      if (in && !open) res.push_back({r.omega[w], r.omega[w]});
      if (in) res.back().hi = r.omega[w];
      open = in;
    }
    return res;
  };
  for (std::size_t t = 0; t < r.temperatures.size(); ++t) {
    TemperatureSummary s;
    s.temperature = r.temperatures[t];
    s.min_degree = r.at(t, 0).degree;
    s.argmin_omega = r.omega[0];
    for (std::size_t w = 1; w < r.omega.size(); ++w) {
      if (r.at(t, w).degree < s.min_degree) {
        s.min_degree = r.at(t, w).degree;
        s.argmin_omega = r.omega[w];
      }
    }
    s.entangled_bands = bands(t, [](const EntanglementPoint& p) { return p.entangled; });
    s.epr_bands = bands(t, [](const EntanglementPoint& p) { return p.epr; });
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace ponder
