// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "stnc/asymptotic.hpp"
#include "stnc/errors.hpp"
#include "stnc/exact_ser.hpp"
#include "stnc/mc.hpp"
#include "stnc/modulation.hpp"
#include "stnc/scenario.hpp"

namespace stnc {

enum class SweepAxis { snr_db, power_split_xi, correlation_rho, relay_distance };

inline const char* to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::snr_db: return "snr_db";
    case SweepAxis::power_split_xi: return "power_split_xi";
    case SweepAxis::correlation_rho: return "correlation_rho";
    case SweepAxis::relay_distance: return "relay_distance";
  }
  return "?";
}

struct SweepSpec {
  SweepAxis axis = SweepAxis::snr_db;
  double start = 0.0;
  double stop = 30.0;
  int steps = 31;
  bool engine_exact = false;
  bool engine_asymptotic = false;
  bool engine_mc = false;
  McConfig mc;
  int source_index = 1;  // l
  ResidueOptions residue;

  void validate() const {
    if (!(start < stop)) throw ValidationError("sweep start must be below stop");
    if (steps < 2) throw ValidationError("sweep needs at least 2 steps");
    if (!engine_exact && !engine_asymptotic && !engine_mc)
      throw ValidationError("at least one engine must be selected");
  }
};

/// The scenario evaluated at one sweep point. Axis semantics:
///  - snr_db: every transmit power scales by 10^(x/10); the configured
///    powers act as relative weights against the configured noise.
///  - power_split_xi: the two relay powers for source l are re-split as
///    P_1 = x*S, P_2 = (1-x)*S with S their configured sum (requires Q = 2).
///  - correlation_rho: all off-diagonal code correlations become x.
///  - relay_distance: each relay moves to the fraction x of the source-l to
///    destination distance (d_lq = x*d_ld, d_qd = (1-x)*d_ld).
inline Scenario scenario_at(const Scenario& base, SweepAxis axis, double x, int l) {
  Scenario s = base;
  switch (axis) {
    case SweepAxis::snr_db: {
      const double scale = std::pow(10.0, x / 10.0);
      for (double& p : s.p_source) p *= scale;
      for (auto& row : s.p_relay)
        for (double& p : row) p *= scale;
      break;
    }
    case SweepAxis::power_split_xi: {
      if (s.num_relays != 2)
        throw ValidationError("power_split_xi sweeps require exactly 2 relays");
      if (!(x > 0.0 && x < 1.0))
        throw ValidationError("power split fraction must lie in (0,1)");
      const double sum = s.p_relay[0][l - 1] + s.p_relay[1][l - 1];
      s.p_relay[0][l - 1] = x * sum;
      s.p_relay[1][l - 1] = (1.0 - x) * sum;
      break;
    }
    case SweepAxis::correlation_rho: {
      for (int p = 0; p < s.num_relays; ++p)
        for (int q = 0; q < s.num_relays; ++q)
          if (p != q) s.correlation(p, q) = x;
      break;
    }
    case SweepAxis::relay_distance: {
      if (!(x > 0.0 && x < 1.0))
        throw ValidationError("relay distance fraction must lie in (0,1)");
      const double d = s.d_source_dest[l - 1];
      for (int q = 0; q < s.num_relays; ++q) {
        s.d_source_relay[l - 1][q] = x * d;
        s.d_relay_dest[q] = (1.0 - x) * d;
      }
      break;
    }
  }
  return s;
}

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace detail

/// Runs every requested engine at every sweep point and returns the CSV
/// document (fixed columns; header row mandatory). Deterministic byte for
/// byte given the same scenario, spec and seed.
inline std::string run_sweep(const Scenario& base, const Modulation& mod,
                             const SweepSpec& spec) {
  base.validate();
  spec.validate();
  if (base.num_relays > 16) throw ValidationError("at most 16 relays are supported");
  if (spec.source_index < 1 || spec.source_index > base.num_sources)
    throw ValidationError("source index out of range");

  std::string csv = "axis_value,ser_exact,ser_asymptotic,ser_mc,mc_ci_low,mc_ci_high,trials,seed\n";
  const int l = spec.source_index;
  for (int i = 0; i < spec.steps; ++i) {
    const double x = spec.start + (spec.stop - spec.start) * i / (spec.steps - 1);
    Scenario scn = scenario_at(base, spec.axis, x, l);
    std::string ser_exact, ser_asym, ser_mc, ci_lo, ci_hi, trials, seed;
    try {
      if (spec.engine_exact) ser_exact = detail::format_number(total_ser(scn, l, mod, spec.residue));
      if (spec.engine_asymptotic)
        ser_asym = detail::format_number(asymptotic_total_ser(scn, l, mod).value);
      if (spec.engine_mc) {
        const SerEstimate est = mc_total_ser(scn, l, mod, spec.mc);
        ser_mc = detail::format_number(est.mean);
        ci_lo = detail::format_number(est.ci_low);
        ci_hi = detail::format_number(est.ci_high);
        trials = std::to_string(est.trials);
        seed = std::to_string(spec.mc.seed);
      }
    } catch (const CoincidentPoles& e) {
      throw CoincidentPoles("sweep point " + detail::format_number(x) + ": " + e.what(),
                            e.state());
    } catch (const InternalConsistency& e) {
      throw InternalConsistency("sweep point " + detail::format_number(x) + ": " + e.what());
    }
    csv += detail::format_number(x) + "," + ser_exact + "," + ser_asym + "," + ser_mc + "," +
           ci_lo + "," + ci_hi + "," + trials + "," + seed + "\n";
  }
  return csv;
}

/// Analytic diversity order of source l with a human-readable account.
struct DiversityReport {
  int order = 0;
  std::string explanation;
};

inline DiversityReport report_diversity(const Scenario& scn, int l) {
  scn.validate();
  if (l < 1 || l > scn.num_sources) throw ValidationError("source index out of range");
  DiversityReport rep;
  rep.order = diversity_order(scn.m_source_dest[l - 1], scn.m_source_relay[l - 1],
                              scn.m_relay_dest);
  std::string terms;
  for (int q = 1; q <= scn.num_relays; ++q) {
    terms += " + min(" + std::to_string(scn.m_relay_dest[q - 1]) + "," +
             std::to_string(scn.m_source_relay[l - 1][q - 1]) + ")";
  }
  rep.explanation = "diversity order = m_ld" + terms + " = " +
                    std::to_string(scn.m_source_dest[l - 1]) + terms + " = " +
                    std::to_string(rep.order);
  return rep;
}

/// Empirical diversity: least-squares slope of log10(exact SER) against
/// log10(SNR scale) over the last SER decade before 1e-6, from an exact
/// engine sweep in 0.25 dB steps. Returns the positive order estimate.
inline double fitted_diversity_slope(const Scenario& scn, int l, const Modulation& mod,
                                     double ser_floor = 1e-6) {
  scn.validate();
  std::vector<double> xs, ys;
  const double ser_ceiling = ser_floor * 10.0;
  for (double db = 0.0; db <= 100.0; db += 0.25) {
    const double ser = total_ser(scenario_at(scn, SweepAxis::snr_db, db, l), l, mod);
    if (ser <= 0.0) break;
    if (ser <= ser_ceiling && ser >= ser_floor) {
      xs.push_back(db / 10.0);  // log10 of the power scale
      ys.push_back(std::log10(ser));
    }
    if (ser < ser_floor) break;
  }
  if (xs.size() < 3)
    throw InternalConsistency("not enough sweep points in the slope-fit window");
  const size_t n = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

}  // namespace stnc
