#pragma once

#include <array>
#include <cmath>
#include <optional>

#include "hausloss/edt.hpp"
#include "hausloss/grid.hpp"
#include "hausloss/loss_eval.hpp"

namespace hausloss {

struct DtLossParams {
  double alpha = 2.0;
  double sigma = 1.0;  // Gaussian-weighted variant only
  bool one_sided = false;

  void validate() const {
    require(alpha > 0.0, ErrorCode::InvalidArgument, "alpha must be > 0");
    require(sigma > 0.0, ErrorCode::InvalidArgument, "sigma must be > 0");
  }
};

/// Exponents swept when tuning alpha.
inline constexpr std::array<double, 8> kAlphaSweep{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};

/// max over p xor q of max(d_p, d_q), with d_p, d_q the boundary distance maps.
double hd_dt_estimate(const BinaryMask& p, const BinaryMask& q);

namespace detail {

// mean((p - q)^2 * w) and its gradient 2/N (q - p) w, with w held fixed.
template <typename Scalar>
LossEval<Scalar> weighted_squared_error(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q,
                                        const Eigen::Array<Scalar, Eigen::Dynamic, 1>& weight, LossFamily family) {
  require_same_spec(p.spec(), q.spec());
  const auto n = static_cast<Scalar>(p.size());
  const auto diff = (q.values() - p.values()).eval();
  LossEval<Scalar> out;
  out.family = family;
  out.value = (diff.square() * weight).sum() / n;
  out.grad = Grid<Scalar>(p.spec(), (Scalar(2) / n * diff * weight).eval());
  return out;
}

template <typename Scalar>
Eigen::Array<Scalar, Eigen::Dynamic, 1> power(const DistanceMap& d, double alpha) {
  return d.values().unaryExpr([alpha](double x) { return std::pow(x, alpha); }).template cast<Scalar>();
}

}  // namespace detail

/// Distance-weighted loss from precomputed boundary distance maps. When
/// `dq` is empty only the d_p term is used.
template <typename Scalar>
LossEval<Scalar> loss_dt_from_maps(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, const DistanceMap& dp,
                                   const std::optional<DistanceMap>& dq, double alpha) {
  require_same_spec(p.spec(), dp.spec());
  auto weight = detail::power<Scalar>(dp, alpha);
  LossFamily family = LossFamily::DtOs;
  if (dq) {
    require_same_spec(p.spec(), dq->spec());
    weight += detail::power<Scalar>(*dq, alpha);
    family = LossFamily::Dt;
  }
  auto out = detail::weighted_squared_error(p, q, weight, family);
  out.terms[std::string(to_string(family))] = static_cast<double>(out.value);
  return out;
}

/// One-sided loss: mean((p - q)^2 * d_p^alpha).
template <typename Scalar>
LossEval<Scalar> loss_dt_os(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, const DtLossParams& params = {}) {
  require_same_spec(p.spec(), q.spec());
  params.validate();
  return loss_dt_from_maps(p, q, boundary_dt(threshold(p)), std::nullopt, params.alpha);
}

/// mean((p - q)^2 * (d_p^alpha + d_q^alpha)), distances of the 0.5-thresholded
/// maps held fixed. Falls back to the one-sided form (flagged) when the
/// thresholded prediction is empty.
template <typename Scalar>
LossEval<Scalar> loss_dt(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, const DtLossParams& params = {}) {
  require_same_spec(p.spec(), q.spec());
  params.validate();
  if (params.one_sided) return loss_dt_os(p, q, params);
  const DistanceMap dp = boundary_dt(threshold(p));
  const BinaryMask q_bar = threshold(q);
  if (!q_bar.any()) {
    auto out = loss_dt_from_maps(p, q, dp, std::nullopt, params.alpha);
    out.flags.emplace_back("one-sided fallback");
    return out;
  }
  return loss_dt_from_maps(p, q, dp, std::optional<DistanceMap>(boundary_dt(q_bar)), params.alpha);
}

/// Boundary-emphasising baseline: mean((p - q)^2 * exp(-d_p^2 / (2 sigma^2))).
template <typename Scalar>
LossEval<Scalar> loss_dt_gaussian_from_map(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, const DistanceMap& dp,
                                           double sigma) {
  require(sigma > 0.0, ErrorCode::InvalidArgument, "sigma must be > 0");
  const double inv = 1.0 / (2.0 * sigma * sigma);
  const auto weight = dp.values().unaryExpr([inv](double d) { return std::exp(-d * d * inv); }).template cast<Scalar>().eval();
  auto out = detail::weighted_squared_error(p, q, weight, LossFamily::DtGauss);
  out.terms["dt-gauss"] = static_cast<double>(out.value);
  return out;
}

template <typename Scalar>
LossEval<Scalar> loss_dt_gaussian(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, double sigma) {
  require_same_spec(p.spec(), q.spec());
  return loss_dt_gaussian_from_map(p, q, boundary_dt(threshold(p)), sigma);
}

}  // namespace hausloss
