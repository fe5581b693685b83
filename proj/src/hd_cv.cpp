#include "hausloss/hd_cv.hpp"

#include <algorithm>
#include <limits>

#include "hausloss/edt.hpp"

namespace hausloss {

BallKernel::BallKernel(int rank, int radius) : rank_(rank), radius_(radius) {
  require(rank == 2 || rank == 3, ErrorCode::InvalidArgument, "kernel rank must be 2 or 3");
  require(radius >= 0, ErrorCode::InvalidArgument, "kernel radius must be >= 0");
  const Index r = radius;
  const Index zr = rank == 3 ? r : 0;
  for (Index dz = -zr; dz <= zr; ++dz) {
    for (Index dy = -r; dy <= r; ++dy) {
      const Index rem = r * r - dz * dz - dy * dy;
      if (rem < 0) continue;
      Index half = 0;
      while ((half + 1) * (half + 1) <= rem) ++half;
      spans_.push_back({dz, dy, half});
      count_ += 2 * half + 1;
    }
  }
}

std::vector<Coord> BallKernel::offsets() const {
  std::vector<Coord> out;
  out.reserve(static_cast<std::size_t>(count_));
  for (const auto& s : spans_) {
    for (Index dx = -s.half; dx <= s.half; ++dx) out.push_back({s.dz, s.dy, dx});
  }
  return out;
}

void validate_radii(const std::vector<int>& radii) {
  require(!radii.empty(), ErrorCode::InvalidArgument, "radius set must not be empty");
  require(radii.front() >= 1, ErrorCode::InvalidArgument, "radii must be >= 1");
  require(std::adjacent_find(radii.begin(), radii.end(), std::greater_equal<>()) == radii.end(),
          ErrorCode::InvalidArgument, "radii must be strictly increasing");
}

KernelBank::KernelBank(int rank, std::vector<int> radii) : radii_(std::move(radii)) {
  validate_radii(radii_);
  kernels_.reserve(radii_.size());
  for (int r : radii_) kernels_.emplace_back(rank, r);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Largest radius in `radii` not above `distance`, or 0.
int largest_below(const std::vector<int>& radii, double distance) {
  int best = 0;
  for (int r : radii) {
    if (static_cast<double>(r) <= distance) best = r;
  }
  return best;
}

// One direction: false positives (in q, not p) tested against the open ball
// missing p, false negatives (in p, not q) against the open ball inside p.
int directed_radius(const BinaryMask& p, const BinaryMask& q, const std::vector<int>& radii) {
  const BinaryMask unit_p(p.spec().with_unit_spacing(), p.values());
  const bool has_fg = unit_p.any();
  const Grid<double> outside = has_fg ? foreground_dt(unit_p).grid() : Grid<double>(unit_p.spec(), kInf);
  const DistanceMap inside = background_dt(unit_p);
  int best = 0;
  for (Index i = 0; i < p.size(); ++i) {
    if (q[i] && !p[i]) best = std::max(best, largest_below(radii, outside[i]));
    if (p[i] && !q[i]) best = std::max(best, largest_below(radii, inside[i]));
  }
  return best;
}

}  // namespace

CvEstimate hd_cv_estimate(const BinaryMask& p, const BinaryMask& q, const std::vector<int>& radii) {
  require_same_spec(p.spec(), q.spec());
  validate_radii(radii);
  CvEstimate est;
  est.radius = std::max(directed_radius(p, q, radii), directed_radius(q, p, radii));
  est.value = est.radius * p.spec().min_spacing();
  return est;
}

CvLossParams CvLossParams::defaults(int rank) {
  CvLossParams params;
  params.radii = rank == 3 ? std::vector<int>{3, 6, 9} : std::vector<int>{3, 6, 9, 12, 15, 18};
  return params;
}

CvResponse cv_response(const BinaryMask& mask, const KernelBank& bank, double alpha, double level) {
  const Grid<double> field = mask.grid().cast<double>();
  CvResponse out{Eigen::ArrayXd::Zero(mask.size()), Eigen::ArrayXd::Zero(mask.size())};
  for (const auto& kernel : bank.kernels()) {
    const Grid<double> sum = ball_sum(field, kernel);
    const double count = static_cast<double>(kernel.count());
    const double w = std::pow(static_cast<double>(kernel.radius()), alpha);
    // Outside the grid counts as background, so the complement's ball sum is
    // count - sum.
    out.inside += w * sum.values().unaryExpr([&](double s) { return soft_threshold(s / count, level); });
    out.outside += w * sum.values().unaryExpr([&](double s) { return soft_threshold((count - s) / count, level); });
  }
  return out;
}

}  // namespace hausloss
