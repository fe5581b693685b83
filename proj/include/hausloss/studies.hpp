#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "hausloss/losses.hpp"
#include "hausloss/synth.hpp"

namespace hausloss {

struct LinearFit {
  double pearson = 0.0;
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares line y = slope * x + intercept and Pearson r of (x, y).
LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

/// Runs body(i) for i in [0, n) on `threads` workers; results must be
/// written to per-index slots so the outcome is independent of scheduling.
void parallel_for(int n, int threads, const std::function<void(int)>& body);

// ---------------------------------------------------------------------------
// Estimator / loss correlation study on a synthetic corpus.

struct CorrelationConfig {
  SynthConfig synth;
  int n_pairs = 200;
  std::vector<int> cv_estimator_radii;  // empty: 1, 2, ..., 30
  int er_k_cap = -1;
  int q_smoothing_radius = 1;  // blur applied to the perturbed mask before loss evaluation
  LossParams loss = LossParams::defaults(2);
  int threads = 1;
};

struct CorrelationRow {
  int index = 0;
  double hd_exact = 0.0;
  double hd95 = 0.0;
  double asd = 0.0;
  double dsc = 0.0;
  double hd_dt = 0.0;
  double hd_er = 0.0;
  bool hd_er_capped = false;
  double hd_cv = 0.0;
  double loss_dt = 0.0;
  double loss_dt_os = 0.0;
  double loss_er = 0.0;
  double loss_cv = 0.0;
};

struct CorrelationReport {
  std::vector<CorrelationRow> rows;
  std::map<std::string, LinearFit> fits;  // keyed by column name, x = exact HD
  double hd_min = 0.0;
  double hd_max = 0.0;
  double er_lower_bound_fraction = 0.0;  // share of pairs with hd_er <= exact + 2 spacing units
};

/// Columns that get a fitted line in the report.
const std::vector<std::string>& correlation_columns();

CorrelationReport run_correlation(const CorrelationConfig& cfg);

// ---------------------------------------------------------------------------
// Finite-difference checks of every family on random smooth map pairs.

struct GradcheckConfig {
  LossFamily family = LossFamily::Dt;
  int n_pairs = 10;
  int sites_per_pair = 50;
  double step = 1e-4;
  std::uint64_t seed = 2019;
  std::vector<Index> shape{32, 32};
  LossParams loss = LossParams::defaults(2);
};

struct GradcheckReport {
  std::vector<GradientCheckResult> pairs;
  double max_rel_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// 1e-6 for the Dice loss, 1e-4 for the frozen-surrogate families.
double gradcheck_tolerance(LossFamily family);

/// Soft reference and prediction maps built from a corpus pair: blurred
/// masks squeezed into (0, 1) plus a little smooth noise on q.
std::pair<ProbMap<double>, ProbMap<double>> random_map_pair(const GridSpec& spec, std::uint64_t seed, int index);

GradcheckReport run_gradcheck(const GradcheckConfig& cfg);

// ---------------------------------------------------------------------------
// Direct optimization of a logistic-parameterized probability map.

struct OptimizeConfig {
  SynthConfig synth;
  int n_cases = 20;
  int iterations = 60;
  int epoch_length = 10;  // lambda and q-side distance/kernel refresh cadence
  double step = 1000.0;   // initial gradient step in logit space, halved when the loss rises
  double init_clip = 0.02;
  std::vector<LossFamily> families{LossFamily::Dsc, LossFamily::Dt, LossFamily::Er, LossFamily::Cv};
  LossParams loss = LossParams::defaults(2);
  double divergence_factor = 1e6;
  int threads = 1;
};

struct TrajectoryPoint {
  int case_index = 0;
  LossFamily family = LossFamily::Dsc;
  int iteration = 0;
  double loss = 0.0;
  double lambda = 0.0;
  double step = 0.0;
  double hd = 0.0;
  double dsc = 0.0;
};

struct CaseResult {
  int case_index = 0;
  LossFamily family = LossFamily::Dsc;
  double initial_hd = 0.0;
  double initial_dsc = 0.0;
  double final_hd = 0.0;
  double final_dsc = 0.0;
  int iterations_run = 0;
  bool diverged = false;
  BinaryMask final_mask = BinaryMask::zeros(GridSpec());
  ProbMap<double> final_map = ProbMap<double>(GridSpec(), Eigen::ArrayXd::Zero(1));
};

struct FamilySummary {
  LossFamily family = LossFamily::Dsc;
  double mean_hd = 0.0;
  double mean_dsc = 0.0;
  double hd_reduction_vs_dsc = 0.0;     // 1 - mean_hd / mean_hd(dsc)
  double share_hd_not_worse = 0.0;      // share of cases with final hd <= dsc-only final hd
  double mean_dsc_delta = 0.0;          // mean(final dsc - dsc-only final dsc)
};

struct OptimizeReport {
  std::vector<TrajectoryPoint> trajectory;
  std::vector<CaseResult> results;  // case-major, families in config order
  std::vector<FamilySummary> summary;
};

/// Exact HD between p and the thresholded q, +inf when q thresholds empty.
double exact_hd_or_inf(const BinaryMask& p, const BinaryMask& q);

/// Starting probability map of case `index`: the blurred perturbation of
/// the truth, clipped to [clip, 1 - clip].
ProbMap<double> optimization_start(const SynthConfig& synth, int index, double clip);

CaseResult optimize_case(const OptimizeConfig& cfg, int index, LossFamily family,
                         std::vector<TrajectoryPoint>* trajectory = nullptr);

OptimizeReport run_optimize(const OptimizeConfig& cfg);

}  // namespace hausloss
