#include "hausloss/hd_dt.hpp"

#include <algorithm>

namespace hausloss {

double hd_dt_estimate(const BinaryMask& p, const BinaryMask& q) {
  require_same_spec(p.spec(), q.spec());
  const DistanceMap dp = boundary_dt(p);
  const DistanceMap dq = boundary_dt(q);
  const Eigen::ArrayXd diff = symmetric_difference(p, q).values().cast<double>();
  const double towards_p = (diff * dp.values()).maxCoeff();
  const double towards_q = (diff * dq.values()).maxCoeff();
  return std::max(towards_p, towards_q);
}

}  // namespace hausloss
