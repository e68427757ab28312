// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "stnc/detail/kahan.hpp"
#include "stnc/errors.hpp"
#include "stnc/scenario.hpp"

namespace stnc {

/// Record of one deterministic pole perturbation applied under
/// ResidueOptions::perturb_coincident.
struct PolePerturbation {
  int branch_index;  // 0-based index into the SnrSet
  double factor;     // multiplied into the branch SNR
};

struct ResidueOptions {
  /// When two pole ratios m_n/a_n collide, nudge the later branch by a
  /// deterministic relative factor instead of failing. Off by default: the
  /// partial-fraction form is simply invalid at merged poles.
  bool perturb_coincident = false;
};

/// Partial-fraction expansion of the combined-SNR PDF. The induced density is
///   f(v) = sum_k sum_i coeffs[k][i] * v^(m_k-1-i) * exp(-m_k v / a_k),
/// with one pole per branch of the source SnrSet. `weights[k][i]` is the
/// normalized mass of each term (coeffs folded with its Gamma integral); the
/// weights of a valid table sum to 1.
struct ResidueTable {
  std::vector<SnrBranch> poles;                      // (a_k, m_k)
  std::vector<std::vector<long double>> coeffs;      // B coefficients
  std::vector<std::vector<long double>> weights;     // B * Gamma(m_k-i) * (a_k/m_k)^(m_k-i)
  std::vector<PolePerturbation> perturbations;
  std::vector<std::string> warnings;
  long double weight_sum = 0.0L;  // analytic integral of the density

  int num_branches() const { return static_cast<int>(poles.size()); }
};

namespace detail {

inline long double pochhammer(int m, int t) {
  long double p = 1.0L;
  for (int j = 0; j < t; ++j) p *= static_cast<long double>(m + j);
  return p;
}

inline long double factorial(int n) {
  long double p = 1.0L;
  for (int j = 2; j <= n; ++j) p *= static_cast<long double>(j);
  return p;
}

inline long double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0L;
  long double p = 1.0L;
  for (int j = 1; j <= k; ++j) p = p * static_cast<long double>(n - k + j) / j;
  return p;
}

// Signed integer power for possibly negative bases.
inline long double ipow(long double base, int e) {
  bool inv = e < 0;
  unsigned long n = inv ? static_cast<unsigned long>(-static_cast<long>(e)) : e;
  long double r = 1.0L, b = base;
  while (n) {
    if (n & 1ul) r *= b;
    b *= b;
    n >>= 1;
  }
  return inv ? 1.0L / r : r;
}

}  // namespace detail

/// Builds the partial-fraction table for the PDF of a branch sum. Residues
/// are computed constructively: at each pole the remaining factors of the
/// characteristic function are expanded as truncated series and multiplied,
/// which sidesteps the error-prone nested-index closed form. Throws
/// CoincidentPoles when two pole ratios agree to within 1e-9 relative and
/// perturbation is not enabled.
inline ResidueTable residue_table(const SnrSet& snrs, const ResidueOptions& opts = {}) {
  const int n = snrs.num_branches();
  if (n == 0) throw ValidationError("SnrSet must contain the direct branch");
  for (const auto& br : snrs.branches) {
    if (!(br.snr > 0.0) || !std::isfinite(br.snr))
      throw ValidationError("branch SNR scales must be positive reals");
    if (br.shape < 1) throw NonIntegerFadingParameter("branch shapes must be positive integers");
  }

  ResidueTable table;
  table.poles = snrs.branches;

  // Pole ratios m/a; resolve collisions.
  std::vector<long double> ratio(n);
  for (int k = 0; k < n; ++k)
    ratio[k] = static_cast<long double>(table.poles[k].shape) / table.poles[k].snr;
  int next_ordinal = 1;
  for (int k = 0; k < n; ++k) {
    auto collides = [&](int k2) {
      for (int j = 0; j < k2; ++j)
        if (std::fabs(ratio[j] - ratio[k2]) <= 1e-9L * std::max(ratio[j], ratio[k2])) return true;
      return false;
    };
    while (collides(k)) {
      if (!opts.perturb_coincident)
        throw CoincidentPoles("coincident pole ratios: branches share m/a = " +
                              std::to_string(static_cast<double>(ratio[k])) +
                              " within 1e-9 relative");
      const double factor = 1.0 + next_ordinal * 1e-7;
      ++next_ordinal;
      table.poles[k].snr *= factor;
      ratio[k] = static_cast<long double>(table.poles[k].shape) / table.poles[k].snr;
      table.perturbations.push_back({k, factor});
    }
  }

  // Residue at pole k via the truncated series product. For every other
  // branch n the local factor is d_kn^{-m_n} (1 - r_n w)^{-m_n} with
  // d_kn = 1 - ratio_k/ratio_n and r_n = 1/(ratio_n d_kn); the polynomial
  // part of the residue is the order-(m_k-1) product of those series.
  table.coeffs.resize(n);
  table.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const int mk = table.poles[k].shape;
    std::vector<long double> poly(mk, 0.0L);
    poly[0] = 1.0L;
    long double prefactor = 1.0L;  // prod d_kn^{-m_n}
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      const long double d = 1.0L - ratio[k] / ratio[j];
      prefactor *= detail::ipow(d, -table.poles[j].shape);
      if (mk == 1) continue;
      const long double r = 1.0L / (ratio[j] * d);
      std::vector<long double> factor(mk);
      for (int t = 0; t < mk; ++t)
        factor[t] = detail::pochhammer(table.poles[j].shape, t) / detail::factorial(t) *
                    detail::ipow(r, t);
      std::vector<long double> out(mk, 0.0L);
      for (int a = 0; a < mk; ++a) {
        if (poly[a] == 0.0L) continue;
        for (int b = 0; a + b < mk; ++b) out[a + b] += poly[a] * factor[b];
      }
      poly.swap(out);
    }

    table.coeffs[k].resize(mk);
    table.weights[k].resize(mk);
    long double sign = 1.0L;
    for (int i = 0; i < mk; ++i) {
      const long double w = sign * detail::ipow(ratio[k], i) * prefactor * poly[i];
      table.weights[k][i] = w;
      table.coeffs[k][i] = w * detail::ipow(ratio[k], mk - i) / detail::factorial(mk - 1 - i);
      sign = -sign;
    }
  }

  detail::Kahan<long double> wsum;
  for (const auto& row : table.weights)
    for (long double w : row) wsum.add(w);
  table.weight_sum = wsum.value();

  const long double spread =
      *std::max_element(ratio.begin(), ratio.end()) / *std::min_element(ratio.begin(), ratio.end());
  if (snrs.total_shape() > 40 || spread > 1e6L) {
    table.warnings.push_back("ill-conditioned residue table: total shape " +
                             std::to_string(snrs.total_shape()) + ", pole-ratio spread " +
                             std::to_string(static_cast<double>(spread)));
    if (std::fabs(table.weight_sum - 1.0L) > 1e-6L)
      throw InternalConsistency(
          "residue PDF normalization failed in ill-conditioned regime: integral = " +
          std::to_string(static_cast<double>(table.weight_sum)));
  }
  return table;
}

/// Evaluates the residue-form PDF at v >= 0. Negative round-off (small
/// against the term-magnitude sum at this point) clamps to zero.
inline double conditional_pdf(const ResidueTable& table, double v) {
  if (v < 0.0 || !std::isfinite(v)) throw ValidationError("pdf argument must be >= 0");
  detail::Kahan<long double> sum;
  long double mag = 0.0L;
  const long double lv = v;
  for (size_t k = 0; k < table.coeffs.size(); ++k) {
    const int mk = table.poles[k].shape;
    const long double decay =
        std::exp(-static_cast<long double>(mk) / table.poles[k].snr * lv);
    if (decay == 0.0L) continue;
    for (int i = 0; i < mk; ++i) {
      const long double term = table.coeffs[k][i] * detail::ipow(lv, mk - 1 - i) * decay;
      sum.add(term);
      mag += std::fabs(term);
    }
  }
  long double f = sum.value();
  if (f < 0.0L && -f <= 1e-12L * mag) f = 0.0L;
  return static_cast<double>(f);
}

}  // namespace stnc
