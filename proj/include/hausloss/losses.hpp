#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hausloss/edt.hpp"
#include "hausloss/hd_cv.hpp"
#include "hausloss/hd_dt.hpp"
#include "hausloss/hd_er.hpp"
#include "hausloss/loss_eval.hpp"

namespace hausloss {

/// 1 - 2 sum(p q) / sum(p^2 + q^2), with its exact quotient-rule gradient.
template <typename Scalar>
LossEval<Scalar> dsc_loss(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q) {
  require_same_spec(p.spec(), q.spec());
  const auto& pv = p.values();
  const auto& qv = q.values();
  const Scalar overlap = (pv * qv).sum();
  const Scalar denom = (pv.square() + qv.square()).sum();
  require(denom > Scalar(0), ErrorCode::BothEmpty, "dice loss of two empty maps");
  LossEval<Scalar> out;
  out.family = LossFamily::Dsc;
  out.value = Scalar(1) - Scalar(2) * overlap / denom;
  out.grad = Grid<Scalar>(p.spec(), ((Scalar(4) * overlap * qv - Scalar(2) * denom * pv) / (denom * denom)).eval());
  out.terms["dsc"] = static_cast<double>(out.value);
  return out;
}

/// Hyperparameters for every family, so one bundle can drive any of them.
struct LossParams {
  DtLossParams dt;
  ErLossParams er;
  CvLossParams cv;

  static LossParams defaults(int rank) {
    LossParams params;
    params.cv = CvLossParams::defaults(rank);
    return params;
  }
};

/// Bare (uncombined) loss of one family.
template <typename Scalar>
LossEval<Scalar> family_loss(LossFamily family, const ProbMap<Scalar>& p, const ProbMap<Scalar>& q,
                             const LossParams& params) {
  switch (family) {
    case LossFamily::Dsc: return dsc_loss(p, q);
    case LossFamily::Dt: return loss_dt(p, q, params.dt);
    case LossFamily::DtOs: return loss_dt_os(p, q, params.dt);
    case LossFamily::DtGauss: return loss_dt_gaussian(p, q, params.dt.sigma);
    case LossFamily::Er: return loss_er(p, q, params.er);
    case LossFamily::Cv: return loss_cv(p, q, params.cv);
    case LossFamily::Combined: break;
  }
  throw Error(ErrorCode::InvalidArgument, "'combined' is not a base loss family");
}

struct LambdaState {
  struct Record {
    double mean_hd = 0.0;
    double mean_dsc = 0.0;
    double lambda = 0.0;
    bool degenerate = false;
  };

  double lambda = 1.0;
  std::vector<Record> history;
};

namespace detail {

template <typename Scalar>
LossEval<Scalar> combine(LossEval<Scalar> hd, const LossEval<Scalar>& dsc, double lambda) {
  require(lambda >= 0.0, ErrorCode::InvalidArgument, "lambda must be >= 0");
  LossEval<Scalar> out;
  const auto lam = static_cast<Scalar>(lambda);
  out.family = LossFamily::Combined;
  out.value = hd.value + lam * dsc.value;
  out.grad = Grid<Scalar>(hd.grad.spec(), (hd.grad.values() + lam * dsc.grad.values()).eval());
  out.flags = std::move(hd.flags);
  out.terms["hd"] = static_cast<double>(hd.value);
  out.terms["dsc"] = static_cast<double>(dsc.value);
  out.terms["lambda"] = lambda;
  out.terms["family:" + std::string(to_string(hd.family))] = static_cast<double>(hd.value);
  return out;
}

}  // namespace detail

/// HD-based term of `family` plus lambda times the Dice loss.
template <typename Scalar>
LossEval<Scalar> combined_loss(const ProbMap<Scalar>& p, const ProbMap<Scalar>& q, LossFamily family,
                               const LossParams& params, const LambdaState& lambda) {
  return detail::combine(family_loss(family, p, q, params), dsc_loss(p, q), lambda.lambda);
}

/// Sets lambda to mean(hd terms) / mean(dsc terms). A batch whose mean Dice
/// term is zero leaves lambda unchanged and records a degenerate entry.
LambdaState update_lambda(LambdaState state, std::span<const double> hd_terms, std::span<const double> dsc_terms);

template <typename Scalar>
LambdaState update_lambda(LambdaState state,
                          const std::vector<std::pair<ProbMap<Scalar>, ProbMap<Scalar>>>& batch,
                          LossFamily family, const LossParams& params) {
  std::vector<double> hd, dice;
  for (const auto& [p, q] : batch) {
    hd.push_back(static_cast<double>(family_loss(family, p, q, params).value));
    dice.push_back(static_cast<double>(dsc_loss(p, q).value));
  }
  return update_lambda(std::move(state), hd, dice);
}

/// Loss bound to one reference map p, caching p-side distance maps and
/// kernel responses for its lifetime and q-side ones for `refresh_every`
/// evaluations (1 = recompute every call). Not safe for concurrent use.
template <typename Scalar>
class LossEvaluator {
 public:
  LossEvaluator(ProbMap<Scalar> p, LossFamily family, LossParams params, int refresh_every = 1)
      : p_(std::move(p)), family_(family), params_(std::move(params)), refresh_every_(refresh_every) {
    require(refresh_every_ >= 1, ErrorCode::InvalidArgument, "refresh cadence must be >= 1");
    require(family_ != LossFamily::Combined, ErrorCode::InvalidArgument,
            "evaluator family must be a base family; combine via evaluate()");
    const BinaryMask p_bar = threshold(p_);
    switch (family_) {
      case LossFamily::Dt:
      case LossFamily::DtOs:
      case LossFamily::DtGauss:
        params_.dt.validate();
        dp_.emplace(boundary_dt(p_bar));
        break;
      case LossFamily::Cv:
        params_.cv.validate();
        bank_.emplace(p_.spec().rank(), params_.cv.radii);
        rp_ = cv_response(p_bar, *bank_, params_.cv.alpha, params_.cv.soft_threshold_level);
        break;
      case LossFamily::Er: params_.er.validate(); break;
      default: break;
    }
  }

  const ProbMap<Scalar>& reference() const { return p_; }
  LossFamily family() const { return family_; }

  /// Forces the q-side quantities to be recomputed on the next call.
  void refresh() { calls_ = 0; }

  LossEval<Scalar> hd_term(const ProbMap<Scalar>& q) {
    require_same_spec(p_.spec(), q.spec());
    if (calls_ % refresh_every_ == 0) refresh_q_side(q);
    ++calls_;
    switch (family_) {
      case LossFamily::Dsc: return dsc_loss(p_, q);
      case LossFamily::Dt: {
        auto out = loss_dt_from_maps(p_, q, *dp_, dq_, params_.dt.alpha);
        if (!dq_) out.flags.emplace_back("one-sided fallback");
        return out;
      }
      case LossFamily::DtOs: return loss_dt_from_maps(p_, q, *dp_, std::nullopt, params_.dt.alpha);
      case LossFamily::DtGauss: return loss_dt_gaussian_from_map(p_, q, *dp_, params_.dt.sigma);
      case LossFamily::Er: return loss_er(p_, q, params_.er);
      case LossFamily::Cv: return loss_cv_from_responses(p_, q, rp_, rq_);
      case LossFamily::Combined: break;
    }
    throw Error(ErrorCode::InvalidArgument, "unsupported loss family");
  }

  /// Dice loss alone for the Dice family, otherwise hd_term + lambda * Dice.
  LossEval<Scalar> evaluate(const ProbMap<Scalar>& q, double lambda) {
    if (family_ == LossFamily::Dsc) return hd_term(q);
    auto hd = hd_term(q);
    return detail::combine(std::move(hd), dsc_loss(p_, q), lambda);
  }

 private:
  void refresh_q_side(const ProbMap<Scalar>& q) {
    if (family_ == LossFamily::Dt) {
      const BinaryMask q_bar = threshold(q);
      dq_.reset();
      if (q_bar.any()) dq_.emplace(boundary_dt(q_bar));
    } else if (family_ == LossFamily::Cv) {
      rq_ = cv_response(threshold(q), *bank_, params_.cv.alpha, params_.cv.soft_threshold_level);
    }
  }

  ProbMap<Scalar> p_;
  LossFamily family_;
  LossParams params_;
  int refresh_every_;
  long long calls_ = 0;
  std::optional<DistanceMap> dp_;
  std::optional<DistanceMap> dq_;
  std::optional<KernelBank> bank_;
  CvResponse rp_;
  CvResponse rq_;
};

// ---------------------------------------------------------------------------
// Finite-difference gradient check against the frozen surrogates.

struct GradientCheckOptions {
  int sample_sites = 50;
  double step = 1e-4;
  // Components whose magnitude is below floor_fraction * max|analytic grad|
  // are compared against that floor instead of their own size.
  double floor_fraction = 1e-3;
  std::uint64_t seed = 0;
};

struct GradientCheckResult {
  double max_rel_error = 0.0;
  int sites_checked = 0;
  int kinks_skipped = 0;
  std::vector<Index> sites;
};

using DoubleLossFn = std::function<LossEval<double>(const ProbMap<double>&, const ProbMap<double>&)>;
/// Optional piecewise-smoothness indicator; a site whose +/- step probes
/// produce different patterns straddles a kink and is resampled.
using KinkPatternFn = std::function<std::vector<bool>(const ProbMap<double>&)>;

/// Central differences at randomly sampled sites where q lies at least one
/// step away from 0.5 and from [0, 1]'s ends. Throws ThresholdFlip when no
/// such site exists.
GradientCheckResult gradient_check(const DoubleLossFn& loss, const ProbMap<double>& p, const ProbMap<double>& q,
                                   const GradientCheckOptions& options = {}, const KinkPatternFn& kinks = {});

/// Same check at caller-chosen sites; throws ThresholdFlip if a probe at one
/// of them would cross the 0.5 threshold or leave [0, 1].
GradientCheckResult gradient_check_at(const DoubleLossFn& loss, const ProbMap<double>& p, const ProbMap<double>& q,
                                      std::span<const Index> sites, const GradientCheckOptions& options = {});

}  // namespace hausloss
