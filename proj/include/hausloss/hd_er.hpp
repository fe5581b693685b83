#pragma once

#include <cmath>
#include <vector>

#include "hausloss/grid.hpp"
#include "hausloss/loss_eval.hpp"

namespace hausloss {

/// Stencil of lattice offsets with nonnegative weights. The binary footprint
/// is the offset list; the generalized (soft) erosion uses the weights.
class StructuringElement {
 public:
  StructuringElement(int rank, std::vector<Coord> offsets, std::vector<double> weights);

  /// Centre plus face neighbours, equal weights (1/5 in 2D, 1/7 in 3D).
  static StructuringElement cross(int rank);

  int rank() const { return rank_; }
  const std::vector<Coord>& offsets() const { return offsets_; }
  const std::vector<double>& weights() const { return weights_; }
  StructuringElement reflected() const;

 private:
  int rank_;
  std::vector<Coord> offsets_;
  std::vector<double> weights_;
};

/// z survives iff every footprint site around z is inside the grid and foreground.
BinaryMask erode_binary(const BinaryMask& mask, const StructuringElement& elem);
/// z is set iff some in-grid footprint site around z is foreground.
BinaryMask dilate_binary(const BinaryMask& mask, const StructuringElement& elem);

/// out[z] = sum_o w_o * f[z + o], with zero padding outside the grid.
template <typename Scalar>
Grid<Scalar> convolve(const Grid<Scalar>& field, const StructuringElement& elem) {
  const GridSpec& spec = field.spec();
  require(elem.rank() == spec.rank(), ErrorCode::ShapeMismatch, "structuring element rank mismatch");
  const auto& ext = spec.extents3();
  Grid<Scalar> out(spec, Scalar(0));
  const Scalar* in = field.values().data();
  Scalar* dst = out.values().data();
  for (std::size_t k = 0; k < elem.offsets().size(); ++k) {
    const Coord& o = elem.offsets()[k];
    const auto w = static_cast<Scalar>(elem.weights()[k]);
    const Index shift = spec.linear(o);
    // Range of destination coordinates whose shifted source stays in-grid.
    Index lo[3], hi[3];
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::max<Index>(0, -o[a]);
      hi[a] = std::min<Index>(ext[a], ext[a] - o[a]);
    }
    for (Index z = lo[0]; z < hi[0]; ++z) {
      for (Index y = lo[1]; y < hi[1]; ++y) {
        const Index row = spec.linear({z, y, 0});
        for (Index x = lo[2]; x < hi[2]; ++x) dst[row + x] += w * in[row + x + shift];
      }
    }
  }
  return out;
}

/// Adjoint of convolve(): out[z] = sum_o w_o * g[z - o] over in-grid z - o.
template <typename Scalar>
Grid<Scalar> convolve_adjoint(const Grid<Scalar>& g, const StructuringElement& elem) {
  return convolve(g, elem.reflected());
}

/// Generalized erosion: normalized convolution followed by the rescaled
/// soft threshold.
template <typename Scalar>
Grid<Scalar> erode_soft(const Grid<Scalar>& field, const StructuringElement& elem, Scalar level = Scalar(0.5)) {
  require(level > Scalar(0) && level < Scalar(1), ErrorCode::InvalidArgument, "soft threshold level must lie in (0, 1)");
  Grid<Scalar> out = convolve(field, elem);
  out.values() = out.values().unaryExpr([level](Scalar x) { return soft_threshold(x, level); });
  return out;
}

struct ErEstimate {
  double value = 0.0;  // 2 * erosions * min spacing
  int erosions = 0;
  bool capped = false;
};

/// Twice the number of cross erosions needed to empty p xor q. With
/// k_cap < 0 the cap is half the largest grid extent.
ErEstimate hd_er_estimate(const BinaryMask& p, const BinaryMask& q, const StructuringElement& elem, int k_cap = -1);
ErEstimate hd_er_estimate(const BinaryMask& p, const BinaryMask& q, int k_cap = -1);

struct ErLossParams {
  int k_max = 10;
  double alpha = 2.0;
  double soft_threshold_level = 0.5;

  void validate() const {
    require(k_max >= 1, ErrorCode::InvalidArgument, "k_max must be >= 1");
    require(alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be > 0");
    require(soft_threshold_level > 0.0 && soft_threshold_level < 1.0, ErrorCode::InvalidArgument,
            "soft threshold level must lie in (0, 1)");
  }
};

/// (1/|grid|) sum_k k^alpha sum((p - q)^2 eroded k times). The gradient is
/// accumulated backwards through the convolve/threshold chain; at the kink
/// x == level the slope taken is 0.
template <typename Scalar>
LossEval<Scalar> loss_er(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, const ErLossParams& params = {}) {
  require_same_spec(p.spec(), q.spec());
  params.validate();
  const GridSpec& spec = p.spec();
  const auto elem = StructuringElement::cross(spec.rank());
  const auto level = static_cast<Scalar>(params.soft_threshold_level);
  const auto n = static_cast<Scalar>(spec.size());

  const auto diff = (p.values() - q.values()).eval();
  Grid<Scalar> eroded(spec, diff.square().eval());
  std::vector<Grid<Scalar>> pre;
  pre.reserve(static_cast<std::size_t>(params.k_max));
  std::vector<Scalar> step_weight;

  Scalar value(0);
  for (int k = 1; k <= params.k_max; ++k) {
    pre.push_back(convolve(eroded, elem));
    eroded.values() = pre.back().values().unaryExpr([level](Scalar x) { return soft_threshold(x, level); });
    step_weight.push_back(static_cast<Scalar>(std::pow(static_cast<double>(k), params.alpha)) / n);
    value += step_weight.back() * eroded.values().sum();
  }

  Grid<Scalar> adj(spec, Scalar(0));  // d loss / d eroded_k
  for (int k = params.k_max; k >= 1; --k) {
    const auto& c = pre[static_cast<std::size_t>(k - 1)].values();
    Grid<Scalar> through(spec);
    through.values() = (adj.values() + step_weight[static_cast<std::size_t>(k - 1)]) *
                       c.unaryExpr([level](Scalar x) { return soft_threshold_slope(x, level); });
    adj = convolve_adjoint(through, elem);
  }

  LossEval<Scalar> out;
  out.value = value;
  out.family = LossFamily::Er;
  out.grad = Grid<Scalar>(spec, (Scalar(-2) * diff * adj.values()).eval());
  out.terms["er"] = static_cast<double>(value);
  return out;
}

/// Which side of the soft-threshold kink every convolution of the loss_er
/// chain falls on (K * |grid| flags). The loss is smooth in q wherever this
/// pattern does not change.
template <typename Scalar>
std::vector<bool> er_activation_pattern(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q,
                                        const ErLossParams& params = {}) {
  require_same_spec(p.spec(), q.spec());
  params.validate();
  const auto elem = StructuringElement::cross(p.spec().rank());
  const auto level = static_cast<Scalar>(params.soft_threshold_level);
  Grid<Scalar> eroded(p.spec(), (p.values() - q.values()).square().eval());
  std::vector<bool> pattern;
  pattern.reserve(static_cast<std::size_t>(params.k_max * p.size()));
  for (int k = 1; k <= params.k_max; ++k) {
    const Grid<Scalar> c = convolve(eroded, elem);
    for (Index i = 0; i < c.size(); ++i) pattern.push_back(c[i] > level);
    eroded.values() = c.values().unaryExpr([level](Scalar x) { return soft_threshold(x, level); });
  }
  return pattern;
}

}  // namespace hausloss
