#include "hausloss/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numeric>
#include <thread>

#include "hausloss/hd_cv.hpp"
#include "hausloss/hd_dt.hpp"
#include "hausloss/hd_er.hpp"
#include "hausloss/metrics.hpp"
#include "hausloss/random.hpp"

namespace hausloss {

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  require(x.size() == y.size() && x.size() >= 2, ErrorCode::InvalidArgument,
          "line fit needs two equally sized samples of length >= 2");
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit fit;
  fit.pearson = (sxx > 0.0 && syy > 0.0) ? sxy / std::sqrt(sxx * syy) : 0.0;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  return fit;
}

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, n));
  if (threads == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (int i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

const std::vector<std::string>& correlation_columns() {
  static const std::vector<std::string> columns{"hd_dt", "hd_er", "hd_cv", "loss_dt", "loss_dt_os", "loss_er", "loss_cv"};
  return columns;
}

namespace {

double column(const CorrelationRow& r, const std::string& name) {
  if (name == "hd_dt") return r.hd_dt;
  if (name == "hd_er") return r.hd_er;
  if (name == "hd_cv") return r.hd_cv;
  if (name == "loss_dt") return r.loss_dt;
  if (name == "loss_dt_os") return r.loss_dt_os;
  if (name == "loss_er") return r.loss_er;
  if (name == "loss_cv") return r.loss_cv;
  throw Error(ErrorCode::InvalidArgument, "unknown correlation column " + name);
}

std::vector<int> dense_radii(int max_radius) {
  std::vector<int> radii(static_cast<std::size_t>(max_radius));
  std::iota(radii.begin(), radii.end(), 1);
  return radii;
}

}  // namespace

CorrelationReport run_correlation(const CorrelationConfig& cfg) {
  cfg.synth.validate();
  require(cfg.n_pairs >= 2, ErrorCode::InvalidArgument, "correlation study needs at least two pairs");
  const std::vector<int> cv_radii = cfg.cv_estimator_radii.empty() ? dense_radii(30) : cfg.cv_estimator_radii;
  validate_radii(cv_radii);

  CorrelationReport report;
  report.rows.resize(static_cast<std::size_t>(cfg.n_pairs));
  parallel_for(cfg.n_pairs, cfg.threads, [&](int i) {
    const CorpusPair pair = corpus_pair(cfg.synth, i);
    const MetricReport m = evaluate(pair.truth, pair.perturbed);
    CorrelationRow row;
    row.index = i;
    row.hd_exact = m.hd;
    row.hd95 = m.hd95;
    row.asd = m.asd;
    row.dsc = m.dsc;
    row.hd_dt = hd_dt_estimate(pair.truth, pair.perturbed);
    const ErEstimate er = hd_er_estimate(pair.truth, pair.perturbed, cfg.er_k_cap);
    row.hd_er = er.value;
    row.hd_er_capped = er.capped;
    row.hd_cv = hd_cv_estimate(pair.truth, pair.perturbed, cv_radii).value;

    const auto p = ProbMap<double>::from_mask(pair.truth);
    const auto q = soften(pair.perturbed, cfg.q_smoothing_radius);
    row.loss_dt = loss_dt(p, q, cfg.loss.dt).value;
    row.loss_dt_os = loss_dt_os(p, q, cfg.loss.dt).value;
    row.loss_er = loss_er(p, q, cfg.loss.er).value;
    row.loss_cv = loss_cv(p, q, cfg.loss.cv).value;
    report.rows[static_cast<std::size_t>(i)] = row;
  });

  std::vector<double> exact;
  for (const auto& r : report.rows) exact.push_back(r.hd_exact);
  report.hd_min = *std::min_element(exact.begin(), exact.end());
  report.hd_max = *std::max_element(exact.begin(), exact.end());
  for (const auto& name : correlation_columns()) {
    std::vector<double> y;
    for (const auto& r : report.rows) y.push_back(column(r, name));
    report.fits[name] = fit_line(exact, y);
  }
  const double unit = cfg.synth.spec().min_spacing();
  const auto bounded = std::count_if(report.rows.begin(), report.rows.end(),
                                     [&](const CorrelationRow& r) { return r.hd_er <= r.hd_exact + 2.0 * unit; });
  report.er_lower_bound_fraction = static_cast<double>(bounded) / static_cast<double>(report.rows.size());
  return report;
}

double gradcheck_tolerance(LossFamily family) { return family == LossFamily::Dsc ? 1e-6 : 1e-4; }

std::pair<ProbMap<double>, ProbMap<double>> random_map_pair(const GridSpec& spec, std::uint64_t seed, int index) {
  SynthConfig synth;
  synth.seed = seed;
  synth.rank = spec.rank();
  synth.shape = spec.shape();
  synth.blob_radius_min = 0.12 * static_cast<double>(spec.shape().back());
  synth.blob_radius_max = 0.2 * static_cast<double>(spec.shape().back());
  synth.border_margin = 3;
  synth.perturbation.boundary_noise_amp = 0.15 * static_cast<double>(spec.shape().back());
  const CorpusPair pair = corpus_pair(synth, index);

  Rng rng(seed, static_cast<std::uint64_t>(index), "map-pair");
  Eigen::ArrayXd noise(spec.size());
  for (Index i = 0; i < spec.size(); ++i) noise[i] = rng.normal();
  const Grid<double> smooth_noise = convolve(Grid<double>(spec, noise), BallKernel(spec.rank(), 2));

  const Eigen::ArrayXd p = 0.02 + 0.96 * soften(pair.truth, 1).values();
  const Eigen::ArrayXd q = (0.05 + 0.9 * soften(pair.perturbed, 2).values() + 0.1 * smooth_noise.values()).max(0.01).min(0.99);
  return {ProbMap<double>(spec, p), ProbMap<double>(spec, q)};
}

GradcheckReport run_gradcheck(const GradcheckConfig& cfg) {
  require(cfg.n_pairs >= 1 && cfg.sites_per_pair >= 1, ErrorCode::InvalidArgument,
          "gradient check needs at least one pair and one site");
  require(cfg.family != LossFamily::Combined, ErrorCode::InvalidArgument,
          "gradient checks run per base family");
  const GridSpec spec(cfg.shape);
  const LossParams params = cfg.loss;
  const DoubleLossFn fn = [&](const ProbMap<double>& p, const ProbMap<double>& q) {
    return family_loss(cfg.family, p, q, params);
  };
  GradcheckReport report;
  report.tolerance = gradcheck_tolerance(cfg.family);
  for (int i = 0; i < cfg.n_pairs; ++i) {
    const auto [p, q] = random_map_pair(spec, cfg.seed, i);
    GradientCheckOptions options;
    options.sample_sites = cfg.sites_per_pair;
    options.step = cfg.step;
    options.seed = cfg.seed + static_cast<std::uint64_t>(i);
    KinkPatternFn pattern;
    if (cfg.family == LossFamily::Er) {
      pattern = [&, pp = p](const ProbMap<double>& probe) { return er_activation_pattern(pp, probe, params.er); };
    }
    report.pairs.push_back(gradient_check(fn, p, q, options, pattern));
    report.max_rel_error = std::max(report.max_rel_error, report.pairs.back().max_rel_error);
  }
  report.pass = report.max_rel_error <= report.tolerance;
  return report;
}

double exact_hd_or_inf(const BinaryMask& p, const BinaryMask& q) {
  if (!p.any() || !q.any()) return std::numeric_limits<double>::infinity();
  return hausdorff(boundary(p), boundary(q));
}

ProbMap<double> optimization_start(const SynthConfig& synth, int index, double clip) {
  require(clip > 0.0 && clip < 0.5, ErrorCode::InvalidArgument, "init clip must lie in (0, 0.5)");
  const CorpusPair pair = corpus_pair(synth, index);
  const ProbMap<double> soft = soften(pair.perturbed, synth.smoothing_radius);
  return ProbMap<double>(soft.spec(), soft.values().max(clip).min(1.0 - clip).eval());
}

namespace {

Eigen::ArrayXd logistic(const Eigen::ArrayXd& z) { return 1.0 / (1.0 + (-z).exp()); }

}  // namespace

CaseResult optimize_case(const OptimizeConfig& cfg, int index, LossFamily family,
                         std::vector<TrajectoryPoint>* trajectory) {
  require(cfg.iterations >= 0 && cfg.epoch_length >= 1 && cfg.step > 0.0, ErrorCode::InvalidArgument,
          "optimizer needs iterations >= 0, epoch length >= 1 and a positive step");
  require(family != LossFamily::Combined, ErrorCode::InvalidArgument,
          "optimize families are base families; HD families are combined with Dice automatically");
  const BinaryMask truth = generate_truth(cfg.synth, index);
  const auto p = ProbMap<double>::from_mask(truth);
  const ProbMap<double> start = optimization_start(cfg.synth, index, cfg.init_clip);
  Eigen::ArrayXd z = (start.values() / (1.0 - start.values())).log();

  LossEvaluator<double> evaluator(p, family, cfg.loss, cfg.epoch_length);
  LambdaState lambda;
  double step = cfg.step;
  double previous = std::numeric_limits<double>::infinity();
  double initial_loss = 0.0;

  CaseResult result;
  result.case_index = index;
  result.family = family;
  const BinaryMask start_mask = threshold(start);
  result.initial_hd = exact_hd_or_inf(truth, start_mask);
  result.initial_dsc = dsc(truth, start_mask);

  ProbMap<double> q = start;
  for (int it = 0; it < cfg.iterations; ++it) {
    const bool epoch_start = it % cfg.epoch_length == 0;
    LossEval<double> hd = evaluator.hd_term(q);
    LossEval<double> total = hd;
    if (family != LossFamily::Dsc) {
      const LossEval<double> dice = dsc_loss(p, q);
      if (epoch_start) {
        const double h = hd.value, d = dice.value;
        lambda = update_lambda(std::move(lambda), std::span<const double>(&h, 1), std::span<const double>(&d, 1));
      }
      total = detail::combine(std::move(hd), dice, lambda.lambda);
    }
    if (it == 0) initial_loss = total.value;
    if (!std::isfinite(total.value) || std::abs(total.value) > cfg.divergence_factor * std::max(1.0, std::abs(initial_loss))) {
      result.diverged = true;
      break;
    }
    // Within an epoch the surrogate is fixed, so an increase means the step is too long.
    if (!epoch_start && total.value > previous) step *= 0.5;
    previous = total.value;

    if (trajectory) {
      const BinaryMask q_bar = threshold(q);
      trajectory->push_back({index, family, it, total.value, family == LossFamily::Dsc ? 0.0 : lambda.lambda, step,
                             exact_hd_or_inf(truth, q_bar), q_bar.any() ? dsc(truth, q_bar) : 0.0});
    }

    const Eigen::ArrayXd qv = q.values();
    z -= step * total.grad.values() * qv * (1.0 - qv);
    q = ProbMap<double>(p.spec(), logistic(z));
    result.iterations_run = it + 1;
  }

  result.final_map = q;
  result.final_mask = threshold(q);
  result.final_hd = exact_hd_or_inf(truth, result.final_mask);
  result.final_dsc = result.final_mask.any() ? dsc(truth, result.final_mask) : 0.0;
  return result;
}

OptimizeReport run_optimize(const OptimizeConfig& cfg) {
  cfg.synth.validate();
  require(cfg.n_cases >= 1 && !cfg.families.empty(), ErrorCode::InvalidArgument,
          "optimize needs at least one case and one family");
  const int nf = static_cast<int>(cfg.families.size());
  const int jobs = cfg.n_cases * nf;
  std::vector<CaseResult> results(static_cast<std::size_t>(jobs));
  std::vector<std::vector<TrajectoryPoint>> traces(static_cast<std::size_t>(jobs));
  parallel_for(jobs, cfg.threads, [&](int j) {
    const auto slot = static_cast<std::size_t>(j);
    results[slot] = optimize_case(cfg, j / nf, cfg.families[static_cast<std::size_t>(j % nf)], &traces[slot]);
  });

  OptimizeReport report;
  report.results = std::move(results);
  for (auto& t : traces) report.trajectory.insert(report.trajectory.end(), t.begin(), t.end());

  // Per-family summary relative to the Dice-only run of the same case.
  const auto dsc_it = std::find(cfg.families.begin(), cfg.families.end(), LossFamily::Dsc);
  const int dsc_slot = dsc_it == cfg.families.end() ? -1 : static_cast<int>(dsc_it - cfg.families.begin());
  for (int f = 0; f < nf; ++f) {
    FamilySummary s;
    s.family = cfg.families[static_cast<std::size_t>(f)];
    int not_worse = 0;
    double dsc_delta = 0.0, baseline_hd = 0.0;
    for (int c = 0; c < cfg.n_cases; ++c) {
      const CaseResult& r = report.results[static_cast<std::size_t>(c * nf + f)];
      s.mean_hd += r.final_hd;
      s.mean_dsc += r.final_dsc;
      if (dsc_slot >= 0) {
        const CaseResult& base = report.results[static_cast<std::size_t>(c * nf + dsc_slot)];
        if (r.final_hd <= base.final_hd) ++not_worse;
        dsc_delta += r.final_dsc - base.final_dsc;
        baseline_hd += base.final_hd;
      }
    }
    const double n = cfg.n_cases;
    s.mean_hd /= n;
    s.mean_dsc /= n;
    if (dsc_slot >= 0) {
      s.share_hd_not_worse = not_worse / n;
      s.mean_dsc_delta = dsc_delta / n;
      s.hd_reduction_vs_dsc = baseline_hd > 0.0 ? 1.0 - s.mean_hd / (baseline_hd / n) : 0.0;
    }
    report.summary.push_back(s);
  }
  return report;
}

}  // namespace hausloss
