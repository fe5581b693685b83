#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "hausloss/grid.hpp"
#include "hausloss/loss_eval.hpp"

namespace hausloss {

/// Normalized disk (2D) or ball (3D) kernel: weight 1/count on every lattice
/// offset with Euclidean norm <= radius. Stored as row spans so convolution
/// costs one prefix-sum lookup per row of the ball.
class BallKernel {
 public:
  struct Span {
    Index dz;
    Index dy;
    Index half;  // offsets dx in [-half, half]
  };

  BallKernel(int rank, int radius);

  int rank() const { return rank_; }
  int radius() const { return radius_; }
  Index count() const { return count_; }
  double weight() const { return 1.0 / static_cast<double>(count_); }
  const std::vector<Span>& spans() const { return spans_; }
  std::vector<Coord> offsets() const;

 private:
  int rank_;
  int radius_;
  Index count_ = 0;
  std::vector<Span> spans_;
};

inline BallKernel make_kernel(int rank, int radius) { return BallKernel(rank, radius); }

/// Kernels for an increasing radius set.
class KernelBank {
 public:
  KernelBank(int rank, std::vector<int> radii);

  const std::vector<int>& radii() const { return radii_; }
  const std::vector<BallKernel>& kernels() const { return kernels_; }
  std::size_t size() const { return kernels_.size(); }

 private:
  std::vector<int> radii_;
  std::vector<BallKernel> kernels_;
};

void validate_radii(const std::vector<int>& radii);

/// Unnormalized sum of `field` over the ball around each site, zero padding.
template <typename Scalar>
Grid<Scalar> ball_sum(const Grid<Scalar>& field, const BallKernel& kernel) {
  const GridSpec& spec = field.spec();
  require(kernel.rank() == spec.rank(), ErrorCode::ShapeMismatch, "kernel rank mismatch");
  const auto& ext = spec.extents3();
  const Index nx = ext[2];
  const Index rows = ext[0] * ext[1];

  // prefix[row * (nx + 1) + x] = sum of the first x entries of the row
  std::vector<Scalar> prefix(static_cast<std::size_t>(rows * (nx + 1)), Scalar(0));
  for (Index r = 0; r < rows; ++r) {
    Scalar acc(0);
    Scalar* pr = prefix.data() + r * (nx + 1);
    for (Index x = 0; x < nx; ++x) {
      pr[x] = acc;
      acc += field[r * nx + x];
    }
    pr[nx] = acc;
  }

  Grid<Scalar> out(spec, Scalar(0));
  for (Index z = 0; z < ext[0]; ++z) {
    for (Index y = 0; y < ext[1]; ++y) {
      Scalar* dst = out.values().data() + (z * ext[1] + y) * nx;
      for (const auto& s : kernel.spans()) {
        const Index zz = z + s.dz;
        const Index yy = y + s.dy;
        if (zz < 0 || zz >= ext[0] || yy < 0 || yy >= ext[1]) continue;
        const Scalar* pr = prefix.data() + (zz * ext[1] + yy) * (nx + 1);
        for (Index x = 0; x < nx; ++x) {
          const Index lo = std::max<Index>(0, x - s.half);
          const Index hi = std::min<Index>(nx, x + s.half + 1);
          dst[x] += pr[hi] - pr[lo];
        }
      }
    }
  }
  return out;
}

/// Normalized convolution B_r * field (zero padding).
template <typename Scalar>
Grid<Scalar> convolve(const Grid<Scalar>& field, const BallKernel& kernel) {
  Grid<Scalar> out = ball_sum(field, kernel);
  out.values() /= static_cast<Scalar>(kernel.count());
  return out;
}

struct CvEstimate {
  double value = 0.0;  // largest firing radius times the minimum spacing
  int radius = 0;      // 0 when no radius fires
};

/// Convolution-based HD estimate over the given radii (pixels). A radius r
/// fires at a false-positive site when no site of p lies closer than r
/// (sites outside the grid count as background), and at a false-negative
/// site when no background site lies closer than r; the same tests with p
/// and q swapped give the mirrored direction. Radius 1 therefore fires on
/// any disagreement.
CvEstimate hd_cv_estimate(const BinaryMask& p, const BinaryMask& q, const std::vector<int>& radii);

struct CvLossParams {
  std::vector<int> radii;
  double alpha = 2.0;
  double soft_threshold_level = 0.5;

  /// {3, 6, ..., 18} in 2D, {3, 6, 9} in 3D.
  static CvLossParams defaults(int rank);

  void validate() const {
    validate_radii(radii);
    require(alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be > 0");
    require(soft_threshold_level > 0.0 && soft_threshold_level < 1.0, ErrorCode::InvalidArgument,
            "soft threshold level must lie in (0, 1)");
  }
};

/// Radius-weighted soft responses of one thresholded mask:
/// inside = sum_r r^alpha f_s(B_r * m), outside = sum_r r^alpha f_s(B_r * (1 - m)).
struct CvResponse {
  Eigen::ArrayXd inside;
  Eigen::ArrayXd outside;
};

CvResponse cv_response(const BinaryMask& mask, const KernelBank& bank, double alpha, double level);

/// Relaxed set differences: first = (p - q)^2 q (q \ p), second = (p - q)^2 p (p \ q).
template <typename Scalar>
std::pair<Grid<Scalar>, Grid<Scalar>> relaxed_difference(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q) {
  require_same_spec(p.spec(), q.spec());
  const auto sq = (p.values() - q.values()).square().eval();
  return {Grid<Scalar>(p.spec(), (sq * q.values()).eval()), Grid<Scalar>(p.spec(), (sq * p.values()).eval())};
}

/// Loss with the mask responses of p and q supplied (held fixed under
/// differentiation).
template <typename Scalar>
LossEval<Scalar> loss_cv_from_responses(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, const CvResponse& rp,
                                        const CvResponse& rq) {
  require_same_spec(p.spec(), q.spec());
  const auto n = static_cast<Scalar>(p.size());
  const auto& pv = p.values();
  const auto& qv = q.values();
  const auto diff = (pv - qv).eval();
  const auto sq = diff.square().eval();
  // weight on q\p: ball outside p or inside q; weight on p\q: inside p or outside q
  const auto w_qp = (rp.outside + rq.inside).template cast<Scalar>().eval();
  const auto w_pq = (rp.inside + rq.outside).template cast<Scalar>().eval();

  LossEval<Scalar> out;
  out.family = LossFamily::Cv;
  out.value = ((w_qp * qv + w_pq * pv) * sq).sum() / n;
  const auto d_qp = (diff * (pv - Scalar(3) * qv)).eval();  // d/dq of (p - q)^2 q
  const auto d_pq = (Scalar(-2) * diff * pv).eval();         // d/dq of (p - q)^2 p
  out.grad = Grid<Scalar>(p.spec(), ((w_qp * d_qp + w_pq * d_pq) / n).eval());
  out.terms["cv"] = static_cast<double>(out.value);
  return out;
}

template <typename Scalar>
LossEval<Scalar> loss_cv(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, const CvLossParams& params) {
  require_same_spec(p.spec(), q.spec());
  params.validate();
  const KernelBank bank(p.spec().rank(), params.radii);
  return loss_cv_from_responses(p, q,
                                cv_response(threshold(p), bank, params.alpha, params.soft_threshold_level),
                                cv_response(threshold(q), bank, params.alpha, params.soft_threshold_level));
}

}  // namespace hausloss
