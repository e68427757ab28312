// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <string>

#include "stnc/errors.hpp"

namespace stnc {

inline constexpr double kPi = 3.14159265358979323846;

/// Linear modulation scheme with the constants used by the Craig-form SER
/// integrals: for M-PSK, alpha = 1 and b = sin^2(pi/M); for square M-QAM,
/// alpha = 4(1 - 1/sqrt(M)) and b = 3/(2(M-1)).
struct Modulation {
  enum class Kind { PSK, QAM };

  Kind kind;
  int order;     // M
  double alpha;  // modulation constant
  double b;      // SNR scale inside the exponential kernel

  static Modulation psk(int m) {
    if (m < 2 || (m & (m - 1)) != 0)
      throw ValidationError("PSK order must be a power of two >= 2, got " + std::to_string(m));
    Modulation mod;
    mod.kind = Kind::PSK;
    mod.order = m;
    mod.alpha = 1.0;
    const double s = std::sin(kPi / m);
    mod.b = s * s;
    return mod;
  }

  static Modulation qam(int m) {
    const int root = static_cast<int>(std::lround(std::sqrt(static_cast<double>(m))));
    if (m < 4 || root * root != m || root % 2 != 0)
      throw ValidationError("QAM order must be a perfect even square (4, 16, 64, ...), got " +
                            std::to_string(m));
    Modulation mod;
    mod.kind = Kind::QAM;
    mod.order = m;
    mod.alpha = 4.0 * (1.0 - 1.0 / root);
    mod.b = 3.0 / (2.0 * (m - 1));
    return mod;
  }

  bool is_psk() const { return kind == Kind::PSK; }

  /// Upper angle of the single PSK Craig integral, (M-1)pi/M.
  double psk_angle() const { return (order - 1) * kPi / order; }

  std::string name() const {
    return std::to_string(order) + (is_psk() ? "PSK" : "QAM");
  }
};

}  // namespace stnc
