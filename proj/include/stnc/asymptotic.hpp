// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "stnc/detail/kahan.hpp"
#include "stnc/errors.hpp"
#include "stnc/exact_ser.hpp"
#include "stnc/modulation.hpp"
#include "stnc/scenario.hpp"

namespace stnc {

/// High-SNR total SER with its per-state breakdown. `total_shape` is the
/// dominant SNR exponent of the sum, i.e. the analytic diversity order.
struct AsymptoticResult {
  double value = 0.0;
  int total_shape = 0;
  std::vector<std::pair<DecodingState, double>> per_state_terms;
};

/// Sine-power angle coefficient
///   A(M_eff, s) = int_0^{(M_eff-1)pi/M_eff} sin^{2s}(x) dx
/// in closed form. M_eff is M for the PSK limit and 2 or 4/3 for the two
/// QAM limits (pi/2 and pi/4).
inline double angle_coefficient(double m_eff, int total_shape) {
  if (total_shape < 1) throw ValidationError("total shape must be >= 1");
  if (!(m_eff > 1.0)) throw ValidationError("angle parameter must exceed 1");
  const int s = total_shape;
  const long double theta = (m_eff - 1.0L) * detail::kPiL / m_eff;
  long double a = detail::binomial(2 * s, s) / detail::ipow(4.0L, s) * theta;
  detail::Kahan<long double> tail;
  for (int k = 0; k < s; ++k) {
    const long double num = std::sin((2.0L * s - 2.0L * k) * theta);
    tail.add(((k % 2 == 0) ? 1.0L : -1.0L) * detail::binomial(2 * s, k) * num /
             (2.0L * s - 2.0L * k));
  }
  const long double sign = (s % 2 == 0) ? 1.0L : -1.0L;
  a += sign / detail::ipow(2.0L, 2 * s - 1) * tail.value();
  return static_cast<double>(a);
}

namespace detail {

// prod (m_i / a_i)^{m_i} over the branches, long double.
inline long double shape_snr_product(const SnrSet& snrs) {
  long double p = 1.0L;
  for (const auto& br : snrs.branches)
    p *= ipow(static_cast<long double>(br.shape) / br.snr, br.shape);
  return p;
}

}  // namespace detail

/// High-SNR approximation of the conditional SER: alpha/(pi b^S) A(.,S)
/// times prod (m_i/a_i)^{m_i}, with the two-term analogue for QAM. Not a
/// probability at low SNR; it upper-bounds the exact value once every
/// branch satisfies a_i b / m_i >> 1.
inline double asymptotic_conditional_ser(const SnrSet& snrs, const Modulation& mod) {
  if (snrs.num_branches() == 0) throw ValidationError("SnrSet must contain the direct branch");
  for (const auto& br : snrs.branches) {
    if (!(br.snr > 0.0)) throw ValidationError("branch SNR scales must be positive");
    if (br.shape < 1) throw NonIntegerFadingParameter("branch shapes must be positive integers");
  }
  const int s = snrs.total_shape();
  const long double prod = detail::shape_snr_product(snrs) / detail::ipow(mod.b, s);
  if (mod.is_psk())
    return static_cast<double>(mod.alpha / detail::kPiL *
                               angle_coefficient(mod.order, s) * prod);
  const long double a = mod.alpha;
  return static_cast<double>(a / detail::kPiL * angle_coefficient(2.0, s) * prod -
                             a * a / (4.0L * detail::kPiL) *
                                 angle_coefficient(4.0 / 3.0, s) * prod);
}

/// Single-branch specialization used for the relay decode error factor.
inline double asymptotic_relay_ser(double c, int m, const Modulation& mod) {
  if (!(c > 0.0)) throw ValidationError("relay input SNR must be positive");
  SnrSet one;
  one.branches.push_back({c, m});
  return asymptotic_conditional_ser(one, mod);
}

/// Analytic diversity order: m_ld + sum_q min(m_qd, m_lq).
inline int diversity_order(int m_ld, std::span<const int> m_lq, std::span<const int> m_qd) {
  if (m_ld < 1) throw NonIntegerFadingParameter("m_ld must be a positive integer");
  if (m_lq.size() != m_qd.size())
    throw ValidationError("m_lq and m_qd must list the same relays");
  int div = m_ld;
  for (size_t q = 0; q < m_lq.size(); ++q) {
    if (m_lq[q] < 1 || m_qd[q] < 1)
      throw NonIntegerFadingParameter("relay fading shapes must be positive integers");
    div += std::min(m_lq[q], m_qd[q]);
  }
  return div;
}

/// High-SNR total SER: each state keeps the asymptotic relay-error factor
/// for its failed relays (successes count as 1) times the asymptotic
/// conditional SER. States accumulate in ascending order.
inline AsymptoticResult asymptotic_total_ser(const Scenario& scn, int l, const Modulation& mod) {
  scn.validate();
  if (l < 1 || l > scn.num_sources) throw ValidationError("source index out of range");

  std::vector<double> relay_tail(scn.num_relays);
  for (int q = 1; q <= scn.num_relays; ++q)
    relay_tail[q - 1] = asymptotic_relay_ser(relay_input_snr(scn, l, q),
                                             scn.m_source_relay[l - 1][q - 1], mod);

  AsymptoticResult out;
  out.total_shape = diversity_order(scn.m_source_dest[l - 1], scn.m_source_relay[l - 1],
                                    scn.m_relay_dest);
  detail::Kahan<long double> acc;
  const std::uint32_t num_states = 1u << scn.num_relays;
  out.per_state_terms.reserve(num_states);
  for (std::uint32_t v = 0; v < num_states; ++v) {
    const DecodingState state = DecodingState::from_value(scn.num_relays, v);
    double factor = 1.0;
    for (int q = 1; q <= scn.num_relays; ++q)
      if (!state.decoded(q)) factor *= relay_tail[q - 1];
    const double term =
        factor * asymptotic_conditional_ser(equivalent_snr_set(scn, l, state), mod);
    out.per_state_terms.emplace_back(state, term);
    acc.add(term);
  }
  out.value = static_cast<double>(acc.value());
  return out;
}

}  // namespace stnc
