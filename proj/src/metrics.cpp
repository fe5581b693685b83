#include "hausloss/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

#include "hausloss/edt.hpp"

namespace hausloss {
namespace {

void require_pair(const BoundarySet& x, const BoundarySet& y) {
  require(!x.empty() && !y.empty(), ErrorCode::EmptyBoundary, "distance between empty boundary sets");
  require_same_spec(x.spec(), y.spec());
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::vector<double> directed_distances(const BoundarySet& from, const BoundarySet& to) {
  require_pair(from, to);
  const Grid<double> sq = squared_edt(to.spec(), to.sites());
  std::vector<double> out;
  out.reserve(from.size());
  for (Index s : from.sites()) out.push_back(std::sqrt(sq[s]));
  return out;
}

double directed_hd(const BoundarySet& x, const BoundarySet& y) {
  const auto d = directed_distances(x, y);
  return *std::max_element(d.begin(), d.end());
}

double hausdorff(const BoundarySet& x, const BoundarySet& y) {
  return std::max(directed_hd(x, y), directed_hd(y, x));
}

double nearest_rank(std::vector<double> values, double pct) {
  require(!values.empty(), ErrorCode::EmptyBoundary, "percentile of an empty sample");
  require(pct > 0.0 && pct <= 100.0, ErrorCode::InvalidArgument, "percentile must lie in (0, 100]");
  const auto n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(pct * n / 100.0));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
  return values[rank - 1];
}

double percentile_hd(const BoundarySet& x, const BoundarySet& y, double pct) {
  auto pooled = directed_distances(x, y);
  const auto back = directed_distances(y, x);
  pooled.insert(pooled.end(), back.begin(), back.end());
  return nearest_rank(std::move(pooled), pct);
}

double directed_partial_hd(const BoundarySet& x, const BoundarySet& y, int k) {
  require_pair(x, y);
  require(k >= 1 && static_cast<std::size_t>(k) <= x.size(), ErrorCode::KOutOfRange,
          "partial HD rank k=" + std::to_string(k) + " outside [1, " + std::to_string(x.size()) + "]");
  auto d = directed_distances(x, y);
  std::nth_element(d.begin(), d.begin() + (k - 1), d.end(), std::greater<>());
  return d[static_cast<std::size_t>(k - 1)];
}

double partial_hd(const BoundarySet& x, const BoundarySet& y, int k) {
  return std::max(directed_partial_hd(x, y, k), directed_partial_hd(y, x, k));
}

double modified_hd(const BoundarySet& x, const BoundarySet& y) {
  return std::max(mean(directed_distances(x, y)), mean(directed_distances(y, x)));
}

double asd(const BoundarySet& x, const BoundarySet& y) {
  const auto a = directed_distances(x, y);
  const auto b = directed_distances(y, x);
  const double total = std::accumulate(a.begin(), a.end(), 0.0) + std::accumulate(b.begin(), b.end(), 0.0);
  return total / static_cast<double>(a.size() + b.size());
}

double dsc(const BinaryMask& p, const BinaryMask& q) {
  require_same_spec(p.spec(), q.spec());
  const Index both = (p.values() * q.values()).cast<Index>().sum();
  const Index total = p.count() + q.count();
  require(total > 0, ErrorCode::BothEmpty, "dice of two empty masks");
  return 2.0 * static_cast<double>(both) / static_cast<double>(total);
}

MetricReport evaluate(const BinaryMask& p, const BinaryMask& q, int partial_k) {
  require_same_spec(p.spec(), q.spec());
  const BoundarySet dp = boundary(p);
  const BoundarySet dq = boundary(q);
  const auto pq = directed_distances(dp, dq);
  const auto qp = directed_distances(dq, dp);

  MetricReport r;
  r.hd_directed_pq = *std::max_element(pq.begin(), pq.end());
  r.hd_directed_qp = *std::max_element(qp.begin(), qp.end());
  r.hd = std::max(r.hd_directed_pq, r.hd_directed_qp);

  std::vector<double> pooled = pq;
  pooled.insert(pooled.end(), qp.begin(), qp.end());
  r.hd95 = nearest_rank(pooled, 95.0);
  r.hd90 = nearest_rank(pooled, 90.0);
  r.asd = std::accumulate(pooled.begin(), pooled.end(), 0.0) / static_cast<double>(pooled.size());

  r.partial_k = partial_k;
  r.partial_hd = partial_hd(dp, dq, partial_k);
  r.modified_hd = std::max(mean(pq), mean(qp));
  r.dsc = dsc(p, q);
  return r;
}

}  // namespace hausloss
