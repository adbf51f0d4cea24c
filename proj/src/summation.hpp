// Neumaier-compensated summation; keeps weighted sums over large ensembles
// stable to about one ulp regardless of magnitude ordering.
#pragma once

#include <cmath>

namespace relaycap::detail {

class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace relaycap::detail
