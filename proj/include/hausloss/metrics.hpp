#pragma once

#include <vector>

#include "hausloss/grid.hpp"

namespace hausloss {

/// For each site of `from`, the distance (mm) to the nearest site of `to`,
/// in the order of from.sites(). Evaluated through an exact distance
/// transform of `to`.
std::vector<double> directed_distances(const BoundarySet& from, const BoundarySet& to);

double directed_hd(const BoundarySet& x, const BoundarySet& y);
double hausdorff(const BoundarySet& x, const BoundarySet& y);

/// Nearest-rank percentile of the pooled X->Y and Y->X point-to-set distances.
double percentile_hd(const BoundarySet& x, const BoundarySet& y, double pct);

/// K-th largest X->Y distance (k = 1 is directed_hd).
double directed_partial_hd(const BoundarySet& x, const BoundarySet& y, int k);
/// max of the two directed partial distances; k must not exceed either set size.
double partial_hd(const BoundarySet& x, const BoundarySet& y, int k);

double modified_hd(const BoundarySet& x, const BoundarySet& y);
double asd(const BoundarySet& x, const BoundarySet& y);

/// Nearest-rank percentile of an unsorted sample.
double nearest_rank(std::vector<double> values, double pct);

/// Soft Dice similarity 2*sum(p*q) / sum(p^2 + q^2).
template <typename Scalar>
double dsc(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q) {
  require_same_spec(p.spec(), q.spec());
  const auto pd = p.values().template cast<double>();
  const auto qd = q.values().template cast<double>();
  const double denom = (pd.square() + qd.square()).sum();
  require(denom > 0.0, ErrorCode::BothEmpty, "dice of two empty maps");
  return 2.0 * (pd * qd).sum() / denom;
}

double dsc(const BinaryMask& p, const BinaryMask& q);

struct MetricReport {
  double hd = 0.0;
  double hd_directed_pq = 0.0;
  double hd_directed_qp = 0.0;
  double hd95 = 0.0;
  double hd90 = 0.0;
  double partial_hd = 0.0;
  int partial_k = 1;
  double modified_hd = 0.0;
  double asd = 0.0;
  double dsc = 0.0;
};

/// Full report between a reference mask p and a prediction q.
MetricReport evaluate(const BinaryMask& p, const BinaryMask& q, int partial_k = 1);

}  // namespace hausloss
