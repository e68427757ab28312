// SPDX-License-Identifier: Apache-2.0
#pragma once

namespace stnc::detail {

// Compensated (Kahan) accumulator. Deterministic for a fixed add order.
template <class T>
class Kahan {
 public:
  void add(T x) {
    T y = x - carry_;
    T t = sum_ + y;
    carry_ = (t - sum_) - y;
    sum_ = t;
  }
  T value() const { return sum_; }

 private:
  T sum_{};
  T carry_{};
};

}  // namespace stnc::detail
