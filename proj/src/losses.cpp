#include "hausloss/losses.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "hausloss/random.hpp"

namespace hausloss {

LossFamily parse_family(std::string_view name) {
  for (auto f : {LossFamily::Dsc, LossFamily::Dt, LossFamily::DtOs, LossFamily::DtGauss, LossFamily::Er,
                 LossFamily::Cv, LossFamily::Combined}) {
    if (to_string(f) == name) return f;
  }
  throw Error(ErrorCode::InvalidArgument, "unknown loss family '" + std::string(name) + "'");
}

LambdaState update_lambda(LambdaState state, std::span<const double> hd_terms, std::span<const double> dsc_terms) {
  require(!hd_terms.empty() && hd_terms.size() == dsc_terms.size(), ErrorCode::DegenerateBatch,
          "lambda update needs a nonempty batch with one Dice term per HD term");
  const auto n = static_cast<double>(hd_terms.size());
  LambdaState::Record rec;
  rec.mean_hd = std::accumulate(hd_terms.begin(), hd_terms.end(), 0.0) / n;
  rec.mean_dsc = std::accumulate(dsc_terms.begin(), dsc_terms.end(), 0.0) / n;
  if (rec.mean_dsc > 0.0) {
    state.lambda = rec.mean_hd / rec.mean_dsc;
  } else {
    rec.degenerate = true;
  }
  rec.lambda = state.lambda;
  state.history.push_back(rec);
  return state;
}

namespace {

bool probe_ok(double q, double step) {
  return q - step >= 0.0 && q + step <= 1.0 && std::abs(q - 0.5) > step;
}

struct Probe {
  double rel_error;
  bool kink;
};

Probe probe_site(const DoubleLossFn& loss, const ProbMap<double>& p, const ProbMap<double>& q, Index site,
                 double analytic, double floor, double step, const KinkPatternFn& kinks) {
  const ProbMap<double> up = q.with_value(site, q[site] + step);
  const ProbMap<double> down = q.with_value(site, q[site] - step);
  if (kinks && kinks(up) != kinks(down)) return {0.0, true};
  const double numeric = (loss(p, up).value - loss(p, down).value) / (2.0 * step);
  const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
  return {denom > 0.0 ? std::abs(analytic - numeric) / denom : 0.0, false};
}

double floor_for(const LossEval<double>& base, const GradientCheckOptions& options) {
  return options.floor_fraction * base.grad.values().abs().maxCoeff();
}

}  // namespace

GradientCheckResult gradient_check(const DoubleLossFn& loss, const ProbMap<double>& p, const ProbMap<double>& q,
                                   const GradientCheckOptions& options, const KinkPatternFn& kinks) {
  require_same_spec(p.spec(), q.spec());
  require(options.sample_sites >= 1 && options.step > 0.0, ErrorCode::InvalidArgument,
          "gradient check needs at least one site and a positive step");
  std::vector<Index> eligible;
  for (Index i = 0; i < q.size(); ++i) {
    if (probe_ok(q[i], options.step)) eligible.push_back(i);
  }
  require(!eligible.empty(), ErrorCode::ThresholdFlip,
          "every site of q lies within one step of the 0.5 threshold or the [0, 1] bounds");

  const LossEval<double> base = loss(p, q);
  const double floor = floor_for(base, options);
  Rng rng(options.seed, 0, "gradient-check");
  GradientCheckResult result;
  // Kink rejections are resampled; bound the attempts so a fully kinked map
  // cannot loop forever.
  const int max_attempts = 20 * options.sample_sites;
  for (int attempt = 0; attempt < max_attempts && result.sites_checked < options.sample_sites; ++attempt) {
    const Index site = eligible[static_cast<std::size_t>(rng.integer(0, static_cast<long long>(eligible.size()) - 1))];
    const Probe pr = probe_site(loss, p, q, site, base.grad[site], floor, options.step, kinks);
    if (pr.kink) {
      ++result.kinks_skipped;
      continue;
    }
    result.max_rel_error = std::max(result.max_rel_error, pr.rel_error);
    result.sites.push_back(site);
    ++result.sites_checked;
  }
  return result;
}

GradientCheckResult gradient_check_at(const DoubleLossFn& loss, const ProbMap<double>& p, const ProbMap<double>& q,
                                      std::span<const Index> sites, const GradientCheckOptions& options) {
  require_same_spec(p.spec(), q.spec());
  for (Index s : sites) {
    require(s >= 0 && s < q.size(), ErrorCode::InvalidArgument, "gradient check site outside grid");
    require(probe_ok(q[s], options.step), ErrorCode::ThresholdFlip,
            "perturbing site " + std::to_string(s) + " would cross the 0.5 threshold or leave [0, 1]");
  }
  const LossEval<double> base = loss(p, q);
  const double floor = floor_for(base, options);
  GradientCheckResult result;
  for (Index s : sites) {
    const Probe pr = probe_site(loss, p, q, s, base.grad[s], floor, options.step, {});
    result.max_rel_error = std::max(result.max_rel_error, pr.rel_error);
    result.sites.push_back(s);
    ++result.sites_checked;
  }
  return result;
}

}  // namespace hausloss
