// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <future>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/special_functions/erf.hpp>

#include "stnc/detail/kahan.hpp"
#include "stnc/errors.hpp"
#include "stnc/modulation.hpp"
#include "stnc/quadrature.hpp"
#include "stnc/residue.hpp"
#include "stnc/rng.hpp"
#include "stnc/scenario.hpp"

namespace stnc {

struct McConfig {
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 0;
  double confidence = 0.99;
  /// Worker threads; 0 picks the hardware count. Estimates are identical
  /// for any worker count.
  int workers = 0;
};

enum class Provenance { exact, asymptotic, monte_carlo };

struct SerEstimate {
  double mean = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::uint64_t trials = 0;
  Provenance provenance = Provenance::monte_carlo;
  std::string warning;  // nonempty when the trial count is too small for the CI
};

/// One draw of a unit-mean Nakagami power gain |h|^2 ~ Gamma(m, 1/m),
/// realized as the mean of m unit exponentials. Consumes exactly m uniforms.
inline double sample_power_gain(int m, SplitMix64& rng) {
  if (m < 1) throw NonIntegerFadingParameter("fading shape must be a positive integer");
  double s = 0.0;
  for (int j = 0; j < m; ++j) s -= std::log(rng.next_unit());
  return s / m;
}

namespace detail {

// Fixed-node Craig-form AWGN SER evaluator: SER(g) = sum_j coeff_j *
// exp(-g * rate_j). PSK uses 64 nodes on [0, (M-1)pi/M]; QAM folds its two
// integrals (pi/2 and pi/4, signed) into one 128-entry table.
struct AwgnKernel {
  std::vector<double> coeff;
  std::vector<double> rate;

  explicit AwgnKernel(const Modulation& mod) {
    auto append = [&](double theta_hi, double scale) {
      const GaussLegendreRule& r = gauss_legendre(64);
      for (int j = 0; j < 64; ++j) {
        const double theta = 0.5 * theta_hi * (r.node[j] + 1.0);
        const double s = std::sin(theta);
        coeff.push_back(scale * 0.5 * theta_hi * r.weight[j]);
        rate.push_back(mod.b / (s * s));
      }
    };
    if (mod.is_psk()) {
      append(mod.psk_angle(), mod.alpha / kPi);
    } else {
      append(kPi / 2.0, mod.alpha / kPi);
      append(kPi / 4.0, -mod.alpha * mod.alpha / (4.0 * kPi));
    }
  }

  double operator()(double snr) const {
    double s = 0.0;
    const size_t n = coeff.size();
    for (size_t j = 0; j < n; ++j) s += coeff[j] * std::exp(-snr * rate[j]);
    return std::max(s, 0.0);
  }
};

inline const AwgnKernel& awgn_kernel(const Modulation& mod) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, AwgnKernel> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto key = std::make_pair(static_cast<int>(mod.kind), mod.order);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, AwgnKernel(mod)).first;
  return it->second;
}

}  // namespace detail

/// Conditional (channel-given) AWGN SER at the given instantaneous SNR,
/// by fixed 64-node Gauss-Legendre quadrature of the Craig integrals.
inline double awgn_conditional_ser(double snr, const Modulation& mod) {
  if (!(snr >= 0.0)) throw ValidationError("AWGN SER requires snr >= 0");
  return detail::awgn_kernel(mod)(snr);
}

/// Semi-analytic Monte Carlo estimate of the total SER of symbol x_l:
/// per trial the channel gains and relay decoding states are sampled, and
/// the exact conditional AWGN SER of the combined SNR is averaged. Each
/// trial draws from its own counter-derived stream, so the estimate is
/// bit-identical for a fixed (config, seed) regardless of worker count.
inline SerEstimate mc_total_ser(const Scenario& scn, int l, const Modulation& mod,
                                const McConfig& cfg) {
  scn.validate();
  if (l < 1 || l > scn.num_sources) throw ValidationError("source index out of range");
  if (cfg.trials < 1) throw ValidationError("trial count must be >= 1");
  if (!(cfg.confidence > 0.0 && cfg.confidence < 1.0))
    throw ValidationError("confidence must lie in (0,1)");

  const int q_count = scn.num_relays;
  const double alpha = scn.path_loss_exponent;
  const double c0 = scn.p_source[l - 1] * std::pow(scn.d_source_dest[l - 1], -alpha) / scn.noise;
  const int m0 = scn.m_source_dest[l - 1];
  const double eps = q_count > 0 ? epsilon_for_symbol(scn.correlation, l) : 1.0;
  std::vector<double> c_relay(q_count), c_input(q_count);
  std::vector<int> m_rd(q_count), m_sr(q_count);
  for (int q = 1; q <= q_count; ++q) {
    c_relay[q - 1] = scn.p_relay[q - 1][l - 1] *
                     std::pow(scn.d_relay_dest[q - 1], -alpha) / (scn.noise * eps);
    c_input[q - 1] = relay_input_snr(scn, l, q);
    m_rd[q - 1] = scn.m_relay_dest[q - 1];
    m_sr[q - 1] = scn.m_source_relay[l - 1][q - 1];
  }
  const detail::AwgnKernel& kernel = detail::awgn_kernel(mod);

  // Fixed chunking; chunk partial sums combine in index order.
  const std::uint64_t chunk = 1u << 14;
  const std::uint64_t num_chunks = (cfg.trials + chunk - 1) / chunk;
  std::vector<double> part_p(num_chunks), part_p2(num_chunks);

  auto run_chunk = [&](std::uint64_t ci) {
    const std::uint64_t lo = ci * chunk;
    const std::uint64_t hi = std::min(cfg.trials, lo + chunk);
    detail::Kahan<double> sp, sp2;
    for (std::uint64_t t = lo; t < hi; ++t) {
      SplitMix64 rng = SplitMix64::stream(cfg.seed, t);
      double snr = c0 * sample_power_gain(m0, rng);
      for (int q = 0; q < q_count; ++q) {
        const double g_in = sample_power_gain(m_sr[q], rng);
        const double u = rng.next_unit();
        const double g_out = sample_power_gain(m_rd[q], rng);
        if (u >= kernel(c_input[q] * g_in)) snr += c_relay[q] * g_out;
      }
      const double p = kernel(snr);
      sp.add(p);
      sp2.add(p * p);
    }
    part_p[ci] = sp.value();
    part_p2[ci] = sp2.value();
  };

  int workers = cfg.workers > 0 ? cfg.workers
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::max(1, std::min<int>(workers, static_cast<int>(num_chunks)));
  if (workers == 1) {
    for (std::uint64_t ci = 0; ci < num_chunks; ++ci) run_chunk(ci);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
      pool.emplace_back([&] {
        for (;;) {
          const std::uint64_t ci = next.fetch_add(1);
          if (ci >= num_chunks) return;
          run_chunk(ci);
        }
      });
    for (auto& th : pool) th.join();
  }

  detail::Kahan<long double> tot_p, tot_p2;
  for (std::uint64_t ci = 0; ci < num_chunks; ++ci) {
    tot_p.add(part_p[ci]);
    tot_p2.add(part_p2[ci]);
  }
  const long double n = static_cast<long double>(cfg.trials);
  const long double mean = tot_p.value() / n;
  long double var = 0.0L;
  if (cfg.trials > 1) var = std::max(0.0L, (tot_p2.value() / n - mean * mean) * n / (n - 1.0L));
  const double z = std::sqrt(2.0) * boost::math::erf_inv(cfg.confidence);
  const double half = z * static_cast<double>(std::sqrt(var / n));

  SerEstimate est;
  est.mean = static_cast<double>(mean);
  est.ci_low = std::max(0.0, est.mean - half);
  est.ci_high = std::min(1.0, est.mean + half);
  est.trials = cfg.trials;
  est.provenance = Provenance::monte_carlo;
  if (cfg.trials < 1000)
    est.warning = "fewer than 1000 trials: the normal-approximation CI is unreliable";
  return est;
}

/// Numerical PDF of the combined SNR by truncated inversion of its
/// characteristic function, independent of the residue machinery. The
/// truncation radius U satisfies |CF(U)| < 1e-12 (cap 1e7); the oscillatory
/// integral is summed per half-period panel with 16-node rules.
inline std::vector<double> pdf_by_cf_inversion(const SnrSet& snrs,
                                               std::span<const double> grid) {
  const int n = snrs.num_branches();
  if (n == 0) throw ValidationError("SnrSet must contain the direct branch");
  std::vector<double> k_rate(n);
  std::vector<int> shape(n);
  for (int i = 0; i < n; ++i) {
    if (!(snrs.branches[i].snr > 0.0)) throw ValidationError("branch SNR scales must be positive");
    if (snrs.branches[i].shape < 1)
      throw NonIntegerFadingParameter("branch shapes must be positive integers");
    k_rate[i] = snrs.branches[i].snr / snrs.branches[i].shape;  // a_n / m_n
    shape[i] = snrs.branches[i].shape;
  }

  auto cf_mag = [&](double u) {
    double m = 1.0;
    for (int i = 0; i < n; ++i)
      m *= std::pow(1.0 + u * u * k_rate[i] * k_rate[i], -0.5 * shape[i]);
    return m;
  };
  const double cap = 1e7;
  double u_max = 1.0;
  while (cf_mag(u_max) >= 1e-12 && u_max < cap) u_max *= 2.0;
  if (cf_mag(u_max) >= 1e-12) {
    const double achievable = cf_mag(cap);
    throw TruncationFailure(
        "characteristic function decays too slowly for 1e-12 truncation (|CF| at cap = " +
            std::to_string(achievable) + "); total shape " + std::to_string(snrs.total_shape()) +
            " is too small",
        achievable);
  }

  auto cf = [&](double u) {
    std::complex<double> c(1.0, 0.0);
    for (int i = 0; i < n; ++i)
      c *= std::pow(std::complex<double>(1.0, -u * k_rate[i]), -shape[i]);
    return c;
  };

  const double k_max = *std::max_element(k_rate.begin(), k_rate.end());
  std::vector<double> out;
  out.reserve(grid.size());
  const GaussLegendreRule& rule = gauss_legendre(16);
  for (double v : grid) {
    if (v < 0.0 || !std::isfinite(v)) throw ValidationError("grid points must be >= 0");
    // Panel width tracks the local oscillation (phase' = v + sum m k/(1+(ku)^2))
    // and is also held to geometric growth so the algebraic tail stays resolved.
    detail::Kahan<double> acc;
    double u = 0.0;
    while (u < u_max) {
      double phase_rate = v;
      for (int i = 0; i < n; ++i)
        phase_rate += shape[i] * k_rate[i] / (1.0 + k_rate[i] * k_rate[i] * u * u);
      const double du =
          std::min({kPi / phase_rate, 0.5 * (u + 1.0 / k_max), u_max - u});
      const double half = 0.5 * du, mid = u + half;
      double panel = 0.0;
      for (int j = 0; j < 16; ++j) {
        const double uu = mid + half * rule.node[j];
        panel += rule.weight[j] * (cf(uu) * std::exp(std::complex<double>(0.0, -uu * v))).real();
      }
      acc.add(half * panel);
      u += du;
    }
    out.push_back(std::max(0.0, acc.value() / kPi));
  }
  return out;
}

}  // namespace stnc
