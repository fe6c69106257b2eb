#pragma once

#include <Eigen/Core>

#include "qobb/errors.hpp"

namespace qobb {

/// Composite Simpson rule over uniformly spaced samples `y` with spacing
/// `step`. An even interval count uses the plain composite rule; an odd count
/// falls back to Simpson 3/8 on the trailing three intervals so any sample
/// count >= 3 integrates at fourth order.
template <class Derived>
typename Derived::Scalar simpson(const Eigen::DenseBase<Derived>& y,
                                 typename Derived::Scalar step) {
  using Scalar = typename Derived::Scalar;
  const Eigen::Index n = y.size();
  if (n < 3) throw domain_error("simpson: need at least 3 samples");

  Eigen::Index intervals = n - 1;
  Eigen::Index m = intervals;          // intervals handled by the 1/3 rule
  if (intervals % 2 != 0) m -= 3;      // leave three for the 3/8 tail

  Scalar sum{0};
  if (m > 0) {
    Scalar odd{0}, even{0};
    for (Eigen::Index i = 1; i < m; i += 2) odd += y[i];
    for (Eigen::Index i = 2; i < m; i += 2) even += y[i];
    sum += step / Scalar(3) * (y[0] + Scalar(4) * odd + Scalar(2) * even + y[m]);
  }
  if (m != intervals) {
    const Eigen::Index j = m;  // 3/8 rule on [j, j+3]
    sum += Scalar(3) * step / Scalar(8) *
           (y[j] + Scalar(3) * y[j + 1] + Scalar(3) * y[j + 2] + y[j + 3]);
  }
  return sum;
}

}  // namespace qobb
