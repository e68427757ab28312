// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "stnc/detail/kahan.hpp"
#include "stnc/errors.hpp"
#include "stnc/modulation.hpp"
#include "stnc/residue.hpp"
#include "stnc/scenario.hpp"

namespace stnc {

namespace detail {

inline constexpr long double kPiL = 3.14159265358979323846264338327950288L;

// Closed form of the fading-averaged Craig integral for one Gamma branch,
//   J(s, cbar, theta) = int_0^theta (sin^2 x / (sin^2 x + cbar))^s dx,
// for integer s >= 1 and theta in (0, pi). Derived from the standard
// finite-sum evaluation; the T(p,t) coefficients are
//   T(p,t) = C(2p,p) / (C(2(p-t), p-t) 4^t (2(p-t)+1)).
inline long double craig_angle_integral(int s, long double cbar, long double theta) {
  const long double x = cbar / (1.0L + cbar);
  const long double sx = std::sqrt(x);
  const long double phi = kPiL - theta;
  const long double omega = sx * std::cos(phi) / std::sin(phi);
  const long double at = std::atan(omega);
  const long double hyp = std::sqrt(1.0L + omega * omega);
  const long double sin_at = omega / hyp;
  const long double cos_at = 1.0L / hyp;

  long double s1 = 0.0L;
  {
    long double pw = 1.0L;  // (4(1+cbar))^-p
    for (int p = 0; p <= s - 1; ++p) {
      s1 += binomial(2 * p, p) * pw;
      pw /= 4.0L * (1.0L + cbar);
    }
  }
  long double s2 = 0.0L;
  {
    long double pw = 1.0L / (1.0L + cbar);
    for (int p = 1; p <= s - 1; ++p) {
      for (int t = 1; t <= p; ++t) {
        const long double tpt = binomial(2 * p, p) /
                                (binomial(2 * (p - t), p - t) * ipow(4.0L, t) *
                                 (2.0L * (p - t) + 1.0L));
        s2 += tpt * pw * ipow(cos_at, 2 * (p - t) + 1);
      }
      pw /= 1.0L + cbar;
    }
  }
  return theta - sx * ((kPiL / 2.0L + at) * s1 + sin_at * s2);
}

// Probability clamp policy: hairline round-off outside [0,1] is snapped to
// the boundary; anything farther out is an internal failure, never hidden.
inline double clamp_probability(long double p, const char* what) {
  if (p > -1e-9L && p < 0.0L) return 0.0;
  if (p > 1.0L && p < 1.0L + 1e-9L) return 1.0;
  if (p < 0.0L || p > 1.0L)
    throw InternalConsistency(std::string(what) + " produced a probability of " +
                              std::to_string(static_cast<double>(p)));
  return static_cast<double>(p);
}

// Sum of weights[k][i] * J(m_k - i, a_k b / m_k, theta) over the table.
inline long double weighted_angle_sum(const ResidueTable& table, long double b,
                                      long double theta) {
  Kahan<long double> acc;
  for (size_t k = 0; k < table.weights.size(); ++k) {
    const int mk = table.poles[k].shape;
    const long double cbar = table.poles[k].snr * b / mk;
    for (int i = 0; i < mk; ++i) {
      if (table.weights[k][i] == 0.0L) continue;
      acc.add(table.weights[k][i] * craig_angle_integral(mk - i, cbar, theta));
    }
  }
  return acc.value();
}

inline long double conditional_ser_impl(const SnrSet& snrs, const Modulation& mod,
                                        const ResidueOptions& opts) {
  const ResidueTable table = residue_table(snrs, opts);
  if (mod.is_psk())
    return mod.alpha / kPiL * weighted_angle_sum(table, mod.b, mod.psk_angle());
  const long double a = mod.alpha;
  return a / kPiL * weighted_angle_sum(table, mod.b, kPiL / 2.0L) -
         a * a / (4.0L * kPiL) * weighted_angle_sum(table, mod.b, kPiL / 4.0L);
}

inline long double single_branch_ser(double snr, int shape, const Modulation& mod) {
  if (!(snr >= 0.0) || !std::isfinite(snr))
    throw ValidationError("branch SNR must be a nonnegative real");
  if (shape < 1) throw NonIntegerFadingParameter("fading shape must be a positive integer");
  const long double cbar = static_cast<long double>(snr) * mod.b / shape;
  if (mod.is_psk())
    return mod.alpha / kPiL * craig_angle_integral(shape, cbar, mod.psk_angle());
  const long double a = mod.alpha;
  return a / kPiL * craig_angle_integral(shape, cbar, kPiL / 2.0L) -
         a * a / (4.0L * kPiL) * craig_angle_integral(shape, cbar, kPiL / 4.0L);
}

}  // namespace detail

/// Exact SER of M-PSK detection on the combined branch set (closed form).
inline double conditional_ser_psk(const SnrSet& snrs, const Modulation& mod,
                                  const ResidueOptions& opts = {}) {
  if (!mod.is_psk()) throw ValidationError("conditional_ser_psk requires a PSK modulation");
  return detail::clamp_probability(detail::conditional_ser_impl(snrs, mod, opts),
                                   "conditional_ser_psk");
}

/// Exact SER of square M-QAM detection on the combined branch set.
inline double conditional_ser_qam(const SnrSet& snrs, const Modulation& mod,
                                  const ResidueOptions& opts = {}) {
  if (mod.is_psk()) throw ValidationError("conditional_ser_qam requires a QAM modulation");
  return detail::clamp_probability(detail::conditional_ser_impl(snrs, mod, opts),
                                   "conditional_ser_qam");
}

/// Exact M-PSK SER of a single Nakagami branch (relay decode error rate).
inline double relay_ser_psk(double c, int m, const Modulation& mod) {
  if (!mod.is_psk()) throw ValidationError("relay_ser_psk requires a PSK modulation");
  return detail::clamp_probability(detail::single_branch_ser(c, m, mod), "relay_ser_psk");
}

/// Exact square M-QAM SER of a single Nakagami branch.
inline double relay_ser_qam(double c, int m, const Modulation& mod) {
  if (mod.is_psk()) throw ValidationError("relay_ser_qam requires a QAM modulation");
  return detail::clamp_probability(detail::single_branch_ser(c, m, mod), "relay_ser_qam");
}

/// Probability of one decoding state given each relay's symbol error rate.
inline double decode_state_probability(std::span<const double> relay_ser,
                                       const DecodingState& state) {
  if (static_cast<int>(relay_ser.size()) != state.num_relays())
    throw ValidationError("relay SER count does not match decoding state size");
  double p = 1.0;
  for (int q = 1; q <= state.num_relays(); ++q) {
    const double s = relay_ser[q - 1];
    if (!(s >= 0.0 && s <= 1.0)) throw ValidationError("relay SER must lie in [0,1]");
    p *= state.decoded(q) ? 1.0 - s : s;
  }
  return p;
}

/// Exact end-to-end SER of symbol x_l: the conditional SER of every relay
/// decoding state, mixed by the state probabilities. States are accumulated
/// in ascending order so results are bit-reproducible.
inline double total_ser(const Scenario& scn, int l, const Modulation& mod,
                        const ResidueOptions& opts = {}) {
  scn.validate();
  if (l < 1 || l > scn.num_sources) throw ValidationError("source index out of range");

  std::vector<double> relay_ser(scn.num_relays);
  for (int q = 1; q <= scn.num_relays; ++q) {
    const double c = relay_input_snr(scn, l, q);
    const int m = scn.m_source_relay[l - 1][q - 1];
    relay_ser[q - 1] = mod.is_psk() ? relay_ser_psk(c, m, mod) : relay_ser_qam(c, m, mod);
  }

  detail::Kahan<long double> acc;
  const std::uint32_t num_states = 1u << scn.num_relays;
  for (std::uint32_t v = 0; v < num_states; ++v) {
    const DecodingState state = DecodingState::from_value(scn.num_relays, v);
    const double prob = decode_state_probability(relay_ser, state);
    if (prob == 0.0) continue;
    try {
      acc.add(prob * detail::conditional_ser_impl(equivalent_snr_set(scn, l, state), mod, opts));
    } catch (const CoincidentPoles& e) {
      throw CoincidentPoles(std::string(e.what()) + " (decoding state " + std::to_string(v) + ")",
                            static_cast<long>(v));
    }
  }
  return detail::clamp_probability(acc.value(), "total_ser");
}

}  // namespace stnc
