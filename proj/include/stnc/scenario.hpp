// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <bit>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "stnc/errors.hpp"
#include "stnc/linalg.hpp"

namespace stnc {

/// Which relays decoded the desired symbol correctly. Bit q (1-based, with
/// relay 1 as the most significant digit) is the success flag of relay q, so
/// the state value is the binary number [beta_1 beta_2 ... beta_Q].
class DecodingState {
 public:
  DecodingState() = default;

  static DecodingState from_value(int num_relays, std::uint32_t value) {
    if (num_relays < 0 || num_relays > 16)
      throw ValidationError("decoding state supports 0..16 relays");
    if (num_relays < 32 && value >= (1u << num_relays))
      throw ValidationError("decoding state value out of range for Q=" +
                            std::to_string(num_relays));
    DecodingState s;
    s.num_relays_ = num_relays;
    s.value_ = value;
    return s;
  }

  static DecodingState from_bits(const std::vector<bool>& bits) {
    std::uint32_t v = 0;
    for (bool b : bits) v = (v << 1) | (b ? 1u : 0u);
    return from_value(static_cast<int>(bits.size()), v);
  }

  /// Success flag of relay q, 1-based.
  bool decoded(int q) const { return (value_ >> (num_relays_ - q)) & 1u; }

  std::uint32_t value() const { return value_; }
  int num_relays() const { return num_relays_; }
  int popcount() const { return std::popcount(value_); }

 private:
  int num_relays_ = 0;
  std::uint32_t value_ = 0;
};

/// One combining branch: deterministic SNR scale and Nakagami shape.
struct SnrBranch {
  double snr;  // a_n, linear
  int shape;   // m_n, positive integer
};

/// Ordered branch set for one decoding state. Entry 0 is always the direct
/// source-destination branch; entries 1..N are the relays that decoded the
/// symbol, in relay order.
struct SnrSet {
  std::vector<SnrBranch> branches;

  int num_branches() const { return static_cast<int>(branches.size()); }
  int total_shape() const {
    int s = 0;
    for (const auto& b : branches) s += b.shape;
    return s;
  }
};

/// Full network description: geometry, powers, fading shapes and
/// spreading-code correlations. All quantities linear (no dB).
struct Scenario {
  int num_sources = 1;  // L
  int num_relays = 0;   // Q

  // Distances, all > 0.
  std::vector<std::vector<double>> d_source_relay;  // [l-1][q-1] = d_lq
  std::vector<double> d_relay_dest;                 // [q-1] = d_qd
  std::vector<double> d_source_dest;                // [l-1] = d_ld
  double path_loss_exponent = 3.5;

  // Nakagami shape parameters, positive integers.
  std::vector<std::vector<int>> m_source_relay;  // [l-1][q-1] = m_lq
  std::vector<int> m_relay_dest;                 // [q-1] = m_qd
  std::vector<int> m_source_dest;                // [l-1] = m_ld

  // Transmit powers (watts, linear) and noise power.
  std::vector<double> p_source;                // [l-1] = P_l
  std::vector<std::vector<double>> p_relay;    // [q-1][l-1] = P_ql
  double noise = 1.0;                          // N_0

  // Code cross-correlation matrix R, unit diagonal.
  SquareMatrix correlation;

  /// All-unit baseline: distances and powers 1, all shapes 1, orthogonal
  /// codes. Useful as a starting point for tests and configs.
  static Scenario unit(int num_sources, int num_relays) {
    Scenario s;
    s.num_sources = num_sources;
    s.num_relays = num_relays;
    s.d_source_relay.assign(num_sources, std::vector<double>(num_relays, 1.0));
    s.d_relay_dest.assign(num_relays, 1.0);
    s.d_source_dest.assign(num_sources, 1.0);
    s.m_source_relay.assign(num_sources, std::vector<int>(num_relays, 1));
    s.m_relay_dest.assign(num_relays, 1);
    s.m_source_dest.assign(num_sources, 1);
    s.p_source.assign(num_sources, 1.0);
    s.p_relay.assign(num_relays, std::vector<double>(num_sources, 1.0));
    s.correlation = SquareMatrix::identity(num_relays);
    return s;
  }

  /// Throws ValidationError (or NonIntegerFadingParameter) naming the first
  /// violated invariant.
  void validate() const;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw ValidationError(what);
}

}  // namespace detail

inline void Scenario::validate() const {
  using detail::require;
  require(num_sources >= 1, "num_sources must be >= 1");
  require(num_relays >= 0, "num_relays must be >= 0");
  require(noise > 0.0, "noise power N_0 must be > 0");
  require(path_loss_exponent > 0.0, "path_loss_exponent must be > 0");

  auto require_sizes = [&](size_t got, size_t want, const char* name) {
    require(got == want, std::string(name) + " has wrong length");
  };
  require_sizes(d_source_dest.size(), num_sources, "d_source_dest");
  require_sizes(m_source_dest.size(), num_sources, "m_source_dest");
  require_sizes(p_source.size(), num_sources, "p_source");
  require_sizes(d_relay_dest.size(), num_relays, "d_relay_dest");
  require_sizes(m_relay_dest.size(), num_relays, "m_relay_dest");
  require_sizes(d_source_relay.size(), num_sources, "d_source_relay");
  require_sizes(m_source_relay.size(), num_sources, "m_source_relay");
  require_sizes(p_relay.size(), num_relays, "p_relay");
  for (const auto& row : d_source_relay) require_sizes(row.size(), num_relays, "d_source_relay row");
  for (const auto& row : m_source_relay) require_sizes(row.size(), num_relays, "m_source_relay row");
  for (const auto& row : p_relay) require_sizes(row.size(), num_sources, "p_relay row");

  auto check_dist = [](double d, const char* name) {
    detail::require(d > 0.0 && std::isfinite(d), std::string(name) + " must be a positive real");
  };
  for (double d : d_source_dest) check_dist(d, "d_source_dest entry");
  for (double d : d_relay_dest) check_dist(d, "d_relay_dest entry");
  for (const auto& row : d_source_relay)
    for (double d : row) check_dist(d, "d_source_relay entry");

  auto check_shape = [](int m, const char* name) {
    if (m < 1) throw NonIntegerFadingParameter(std::string(name) + " must be a positive integer");
  };
  for (int m : m_source_dest) check_shape(m, "m_source_dest entry");
  for (int m : m_relay_dest) check_shape(m, "m_relay_dest entry");
  for (const auto& row : m_source_relay)
    for (int m : row) check_shape(m, "m_source_relay entry");

  for (double p : p_source)
    require(p >= 0.0 && std::isfinite(p), "p_source entries must be nonnegative");
  for (const auto& row : p_relay)
    for (double p : row) require(p >= 0.0 && std::isfinite(p), "p_relay entries must be nonnegative");

  require(correlation.size() == num_relays, "correlation matrix must be Q x Q");
  for (int i = 0; i < num_relays; ++i) {
    require(correlation(i, i) == 1.0, "correlation matrix must have unit diagonal");
    for (int j = 0; j < num_relays; ++j) {
      if (i == j) continue;
      require(std::fabs(correlation(i, j)) < 1.0,
              "off-diagonal correlations must satisfy |rho| < 1");
      require(std::fabs(std::fabs(correlation(i, j)) - std::fabs(correlation(j, i))) == 0.0,
              "correlation magnitudes must be symmetric");
    }
  }
  // Codes form a Gram matrix, so R must be positive definite; this is also
  // what keeps every epsilon_l >= 1 and every despread SNR positive.
  if (num_relays > 0)
    require(detail::is_positive_definite(correlation),
            "correlation matrix must be positive definite");
}

/// epsilon_l: the l-th diagonal entry of R^{-1} (1-based l). Equals 1 for
/// orthogonal codes and grows with cross-correlation.
inline double epsilon_for_symbol(const SquareMatrix& corr, int l) {
  if (l < 1 || l > corr.size())
    throw ValidationError("symbol index out of range for correlation matrix");
  std::vector<double> e(corr.size(), 0.0);
  e[l - 1] = 1.0;
  return detail::solve_partial_pivot(corr, std::move(e))[l - 1];
}

/// Deterministic SNR scale of the source l -> relay q link,
/// c_ql = P_l d_lq^{-alpha} / N_0 (1-based indices).
inline double relay_input_snr(const Scenario& scn, int l, int q) {
  if (l < 1 || l > scn.num_sources) throw ValidationError("source index out of range");
  if (q < 1 || q > scn.num_relays) throw ValidationError("relay index out of range");
  return scn.p_source[l - 1] *
         std::pow(scn.d_source_relay[l - 1][q - 1], -scn.path_loss_exponent) / scn.noise;
}

/// Equivalent-SNR branches of symbol x_l under a decoding state: the direct
/// branch c_0 = P_l d_ld^{-alpha}/N_0 first, then c_q = P_ql d_qd^{-alpha} /
/// (N_0 epsilon_l) for each relay that decoded, in relay order.
inline SnrSet equivalent_snr_set(const Scenario& scn, int l, const DecodingState& state) {
  if (l < 1 || l > scn.num_sources) throw ValidationError("source index out of range");
  if (state.num_relays() != scn.num_relays)
    throw ValidationError("decoding state size does not match num_relays");
  const double alpha = scn.path_loss_exponent;
  SnrSet out;
  out.branches.push_back({scn.p_source[l - 1] * std::pow(scn.d_source_dest[l - 1], -alpha) /
                              scn.noise,
                          scn.m_source_dest[l - 1]});
  if (state.popcount() == 0) return out;
  if (l > scn.num_relays)
    throw ValidationError(
        "despreading penalty is undefined: correlation matrix has no code index " +
        std::to_string(l));
  const double eps = epsilon_for_symbol(scn.correlation, l);
  for (int q = 1; q <= scn.num_relays; ++q) {
    if (!state.decoded(q)) continue;
    out.branches.push_back({scn.p_relay[q - 1][l - 1] * std::pow(scn.d_relay_dest[q - 1], -alpha) /
                                (scn.noise * eps),
                            scn.m_relay_dest[q - 1]});
  }
  return out;
}

}  // namespace stnc
