#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "config_json.hpp"
#include "hausloss/metrics.hpp"
#include "hausloss/npy.hpp"
#include "output.hpp"

#ifndef HAUSLOSS_VERSION
#define HAUSLOSS_VERSION "0.0.0"
#endif

namespace fs = std::filesystem;
using namespace hausloss;
using cli::Csv;
using cli::format_double;
using cli::write_atomic;
using cli::write_json;

namespace {

constexpr std::uint64_t kDefaultSeed = 2019;

struct Globals {
  std::optional<std::uint64_t> seed;
  int threads = 1;
  std::string out_dir = "hausloss-out";
};

// Everything a command records in its manifest besides argv.
struct Run {
  std::string command;
  json config = json::object();
  json inputs = json::array();
  json outputs = json::array();
  std::uint64_t seed = kDefaultSeed;
  std::string started_at;
  fs::path out_dir;

  fs::path output(const std::string& name) {
    outputs.push_back(name);
    return out_dir / name;
  }
};

struct Input {
  BinaryMask mask = BinaryMask::zeros(GridSpec());
  ProbMap<double> map = ProbMap<double>(GridSpec(), Eigen::ArrayXd::Zero(1));
};

std::vector<double> read_spacing(const std::vector<double>& flag, const std::string& sidecar) {
  if (!flag.empty()) return flag;
  if (sidecar.empty()) return {};
  std::ifstream in(sidecar);
  require(in.good(), ErrorCode::Io, "cannot open spacing file " + sidecar);
  json j;
  try {
    in >> j;
    return j.at("spacing").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "spacing file must look like {\"spacing\": [...]}: " + std::string(e.what()));
  }
}

Input load_input(const std::string& path, const std::vector<double>& spacing, double level) {
  const npy::Array a = npy::read(path);
  const GridSpec spec = npy::spec_of(a, spacing);
  Eigen::ArrayXd values = Eigen::Map<const Eigen::ArrayXd>(a.values.data(), static_cast<Index>(a.values.size()));
  Input in;
  in.map = ProbMap<double>(spec, values);
  in.mask = threshold(in.map, level);
  return in;
}

json read_config(const std::string& path) {
  if (path.empty()) return json::object();
  std::ifstream in(path);
  require(in.good(), ErrorCode::Io, "cannot open config " + path);
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "config is not valid JSON: " + std::string(e.what()));
  }
}

std::vector<Index> parse_shape(const std::vector<long long>& s) { return {s.begin(), s.end()}; }

// --- eval -------------------------------------------------------------------

struct EvalArgs {
  std::string truth, pred, spacing_file;
  std::vector<double> spacing;
  double threshold = 0.5;
  int k = 1;
};

json cmd_eval(const EvalArgs& a, Run& run) {
  const auto spacing = read_spacing(a.spacing, a.spacing_file);
  const Input p = load_input(a.truth, spacing, a.threshold);
  const Input q = load_input(a.pred, spacing, a.threshold);
  run.inputs = {a.truth, a.pred};
  run.config = {{"threshold", a.threshold}, {"k", a.k}, {"spacing", p.mask.spec().spacing()}};
  const MetricReport m = evaluate(p.mask, q.mask, a.k);
  json report = metric_json(m);
  write_json(run.output("eval.json"), report);
  Csv csv({"hd", "hd_directed_pq", "hd_directed_qp", "hd95", "hd90", "partial_hd", "partial_k", "modified_hd", "asd", "dsc"});
  csv.row() << m.hd << m.hd_directed_pq << m.hd_directed_qp << m.hd95 << m.hd90 << m.partial_hd << m.partial_k
            << m.modified_hd << m.asd << m.dsc;
  write_atomic(run.output("eval.csv"), csv.str());
  return report;
}

// --- loss -------------------------------------------------------------------

struct LossArgs {
  std::string truth, pred, spacing_file, family = "dt", base = "dt", grad_out;
  std::vector<double> spacing;
  std::optional<double> alpha, sigma;
  std::vector<int> radii;
  std::optional<int> k;
  double lambda = 1.0;
};

json cmd_loss(const LossArgs& a, Run& run) {
  const auto spacing = read_spacing(a.spacing, a.spacing_file);
  const Input p = load_input(a.truth, spacing, 0.5);
  const Input q = load_input(a.pred, spacing, 0.5);
  run.inputs = {a.truth, a.pred};

  LossParams params = LossParams::defaults(p.map.spec().rank());
  if (a.alpha) params.dt.alpha = params.er.alpha = params.cv.alpha = *a.alpha;
  if (a.sigma) params.dt.sigma = *a.sigma;
  if (!a.radii.empty()) params.cv.radii = a.radii;
  if (a.k) params.er.k_max = *a.k;

  const LossFamily family = parse_family(a.family);
  LossEval<double> out;
  if (family == LossFamily::Combined) {
    const LossFamily base = parse_family(a.base);
    require(base != LossFamily::Combined, ErrorCode::InvalidArgument, "--base must be a base family");
    LambdaState lambda;
    lambda.lambda = a.lambda;
    out = combined_loss(p.map, q.map, base, params, lambda);
  } else {
    out = family_loss(family, p.map, q.map, params);
  }
  run.config = {{"family", a.family}, {"base", a.base}, {"lambda", a.lambda}, {"params", params},
                {"spacing", p.map.spec().spacing()}};

  json report{{"family", std::string(to_string(out.family))},
              {"value", out.value},
              {"terms", out.terms},
              {"flags", out.flags}};
  if (!a.grad_out.empty()) {
    npy::write_field(a.grad_out, out.grad, npy::Dtype::F4);
    run.outputs.push_back(a.grad_out);
    report["gradient"] = a.grad_out;
  }
  write_json(run.output("loss.json"), report);
  return report;
}

// --- gradcheck --------------------------------------------------------------

struct GradcheckArgs {
  std::string family = "dt";
  int pairs = 10;
  int sites = 50;
  double step = 1e-4;
  std::vector<long long> shape{32, 32};
};

json cmd_gradcheck(const GradcheckArgs& a, Run& run) {
  GradcheckConfig cfg;
  cfg.family = parse_family(a.family);
  cfg.n_pairs = a.pairs;
  cfg.sites_per_pair = a.sites;
  cfg.step = a.step;
  cfg.seed = run.seed;
  cfg.shape = parse_shape(a.shape);
  cfg.loss = LossParams::defaults(static_cast<int>(cfg.shape.size()));
  run.config = {{"family", a.family}, {"pairs", a.pairs}, {"sites", a.sites}, {"step", a.step}, {"shape", cfg.shape},
                {"loss", cfg.loss}};
  const GradcheckReport r = run_gradcheck(cfg);
  json pairs = json::array();
  for (const auto& p : r.pairs) {
    pairs.push_back({{"max_rel_error", p.max_rel_error}, {"sites_checked", p.sites_checked}, {"kinks_skipped", p.kinks_skipped}});
  }
  json report{{"family", a.family}, {"max_rel_error", r.max_rel_error}, {"tolerance", r.tolerance}, {"pass", r.pass},
              {"pairs", pairs}};
  write_json(run.output("gradcheck.json"), report);
  return report;
}

// --- correlate --------------------------------------------------------------

json cmd_correlate(const std::string& config_path, const Globals& g, Run& run) {
  CorrelationConfig cfg;
  from_json(read_config(config_path), cfg);
  if (g.seed) cfg.synth.seed = *g.seed;
  cfg.threads = g.threads;
  run.seed = cfg.synth.seed;
  run.config = cfg;
  if (!config_path.empty()) run.inputs = {config_path};

  const CorrelationReport r = run_correlation(cfg);
  Csv csv({"index", "hd_exact", "hd95", "asd", "dsc", "hd_dt", "hd_er", "hd_er_capped", "hd_cv", "loss_dt", "loss_dt_os",
           "loss_er", "loss_cv"});
  for (const auto& row : r.rows) {
    csv.row() << row.index << row.hd_exact << row.hd95 << row.asd << row.dsc << row.hd_dt << row.hd_er
              << (row.hd_er_capped ? 1 : 0) << row.hd_cv << row.loss_dt << row.loss_dt_os << row.loss_er << row.loss_cv;
  }
  write_atomic(run.output("correlation_pairs.csv"), csv.str());

  json fits = json::object();
  for (const auto& [name, f] : r.fits) fits[name] = {{"pearson", f.pearson}, {"slope", f.slope}, {"intercept", f.intercept}};
  json report{{"n_pairs", r.rows.size()},
              {"hd_min", r.hd_min},
              {"hd_max", r.hd_max},
              {"er_lower_bound_fraction", r.er_lower_bound_fraction},
              {"fits", fits}};
  write_json(run.output("correlation.json"), report);
  return report;
}

// --- optimize ---------------------------------------------------------------

json cmd_optimize(const std::string& config_path, const Globals& g, Run& run) {
  OptimizeConfig cfg;
  from_json(read_config(config_path), cfg);
  if (g.seed) cfg.synth.seed = *g.seed;
  cfg.threads = g.threads;
  run.seed = cfg.synth.seed;
  run.config = cfg;
  if (!config_path.empty()) run.inputs = {config_path};

  const OptimizeReport r = run_optimize(cfg);
  Csv traj({"case", "family", "iteration", "loss", "lambda", "step", "hd", "dsc"});
  for (const auto& t : r.trajectory) {
    traj.row() << t.case_index << std::string(to_string(t.family)) << t.iteration << t.loss << t.lambda << t.step << t.hd
               << t.dsc;
  }
  write_atomic(run.output("optimize_trajectory.csv"), traj.str());

  Csv cases({"case", "family", "initial_hd", "initial_dsc", "final_hd", "final_dsc", "iterations_run", "diverged"});
  for (const auto& c : r.results) {
    cases.row() << c.case_index << std::string(to_string(c.family)) << c.initial_hd << c.initial_dsc << c.final_hd
                << c.final_dsc << c.iterations_run << (c.diverged ? 1 : 0);
    char name[64];
    std::snprintf(name, sizeof(name), "masks/case_%03d_%s.npy", c.case_index, std::string(to_string(c.family)).c_str());
    npy::write_mask(run.output(name), c.final_mask);
  }
  for (int i = 0; i < cfg.n_cases; ++i) {
    char name[64];
    std::snprintf(name, sizeof(name), "masks/case_%03d_truth.npy", i);
    npy::write_mask(run.output(name), generate_truth(cfg.synth, i));
  }
  write_atomic(run.output("optimize_cases.csv"), cases.str());

  Csv summary({"family", "mean_hd", "mean_dsc", "hd_reduction_vs_dsc", "share_hd_not_worse", "mean_dsc_delta"});
  json families = json::array();
  for (const auto& s : r.summary) {
    const std::string name(to_string(s.family));
    summary.row() << name << s.mean_hd << s.mean_dsc << s.hd_reduction_vs_dsc << s.share_hd_not_worse << s.mean_dsc_delta;
    families.push_back({{"family", name},
                        {"mean_hd", s.mean_hd},
                        {"mean_dsc", s.mean_dsc},
                        {"hd_reduction_vs_dsc", s.hd_reduction_vs_dsc},
                        {"share_hd_not_worse", s.share_hd_not_worse},
                        {"mean_dsc_delta", s.mean_dsc_delta}});
  }
  write_atomic(run.output("optimize_summary.csv"), summary.str());
  json report{{"n_cases", cfg.n_cases}, {"summary", families}};
  write_json(run.output("optimize_summary.json"), report);
  return report;
}

// --- synth ------------------------------------------------------------------

json cmd_synth(const std::string& config_path, int count, const Globals& g, Run& run) {
  SynthConfig cfg;
  const json j = read_config(config_path);
  if (!j.empty()) from_json(j, cfg);
  if (g.seed) cfg.seed = *g.seed;
  require(count >= 1, ErrorCode::InvalidArgument, "--count must be >= 1");
  run.seed = cfg.seed;
  run.config = {{"synth", cfg}, {"count", count}};
  if (!config_path.empty()) run.inputs = {config_path};

  std::vector<CorpusPair> pairs(static_cast<std::size_t>(count),
                                CorpusPair{BinaryMask::zeros(cfg.spec()), BinaryMask::zeros(cfg.spec())});
  parallel_for(count, g.threads, [&](int i) { pairs[static_cast<std::size_t>(i)] = corpus_pair(cfg, i); });

  Csv csv({"index", "truth_voxels", "perturbed_voxels", "hd", "dsc"});
  for (int i = 0; i < count; ++i) {
    const CorpusPair& pair = pairs[static_cast<std::size_t>(i)];
    char stem[64];
    std::snprintf(stem, sizeof(stem), "synth/pair_%04d", i);
    npy::write_mask(run.output(std::string(stem) + "_truth.npy"), pair.truth);
    npy::write_mask(run.output(std::string(stem) + "_perturbed.npy"), pair.perturbed);
    npy::write_field(run.output(std::string(stem) + "_soft.npy"), soften(pair.perturbed, cfg.smoothing_radius).grid());
    csv.row() << i << static_cast<long long>(pair.truth.count()) << static_cast<long long>(pair.perturbed.count())
              << hausdorff(boundary(pair.truth), boundary(pair.perturbed)) << dsc(pair.truth, pair.perturbed);
  }
  write_atomic(run.output("synth.csv"), csv.str());
  return {{"count", count}, {"seed", cfg.seed}};
}

void print_error(ErrorCode code, const std::string& message) {
  std::cout << json{{"error", {{"code", std::string(to_string(code))}, {"message", message}}}}.dump() << std::endl;
}

int run_cli(std::vector<std::string> args);

int replay(const std::string& manifest_path, const std::optional<std::string>& out_dir) {
  std::ifstream in(manifest_path);
  require(in.good(), ErrorCode::Io, "cannot open manifest " + manifest_path);
  json m;
  try {
    m = json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidArgument, "manifest is not valid JSON: " + std::string(e.what()));
  }
  require(m.contains("argv") && m["argv"].is_array(), ErrorCode::InvalidArgument, "manifest lacks an argv array");
  std::vector<std::string> args = m["argv"].get<std::vector<std::string>>();
  if (out_dir) {
    std::vector<std::string> kept;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--out-dir") {
        ++i;
        continue;
      }
      if (args[i].rfind("--out-dir=", 0) == 0) continue;
      kept.push_back(args[i]);
    }
    kept.insert(kept.begin(), {"--out-dir", *out_dir});
    args = std::move(kept);
  }
  return run_cli(std::move(args));
}

int run_cli(std::vector<std::string> args) {
  CLI::App app{"Exact Hausdorff metrics and differentiable Hausdorff-distance losses", "hausloss"};
  app.set_version_flag("--version", HAUSLOSS_VERSION);
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_value = kDefaultSeed;
  auto* seed_opt = app.add_option("--seed", seed_value, "RNG seed (overrides the config's synth seed)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out-dir", g.out_dir, "directory for reports and arrays");

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "exact metrics between a reference and a prediction");
  eval->add_option("truth", ea.truth)->required()->check(CLI::ExistingFile);
  eval->add_option("pred", ea.pred)->required()->check(CLI::ExistingFile);
  eval->add_option("--threshold", ea.threshold, "level for probability maps")->capture_default_str();
  eval->add_option("--k", ea.k, "rank of the partial HD")->capture_default_str();
  eval->add_option("--spacing", ea.spacing, "per-axis spacing")->delimiter(',');
  eval->add_option("--spacing-json", ea.spacing_file, "sidecar {\"spacing\": [...]}");

  LossArgs la;
  auto* loss = app.add_subcommand("loss", "loss value, term breakdown and gradient");
  loss->add_option("truth", la.truth)->required()->check(CLI::ExistingFile);
  loss->add_option("pred", la.pred)->required()->check(CLI::ExistingFile);
  loss->add_option("--family", la.family, "dsc|dt|dt-os|dt-gauss|er|cv|combined")->capture_default_str();
  loss->add_option("--base", la.base, "HD family used by --family combined")->capture_default_str();
  loss->add_option("--alpha", la.alpha, "distance exponent");
  loss->add_option("--sigma", la.sigma, "Gaussian width for dt-gauss");
  loss->add_option("--radii", la.radii, "kernel radii for cv")->delimiter(',');
  loss->add_option("--k", la.k, "number of erosions for er");
  loss->add_option("--lambda", la.lambda, "Dice weight for combined")->capture_default_str();
  loss->add_option("--grad-out", la.grad_out, "write the gradient as a float32 NPY file");
  loss->add_option("--spacing", la.spacing, "per-axis spacing")->delimiter(',');
  loss->add_option("--spacing-json", la.spacing_file, "sidecar {\"spacing\": [...]}");

  GradcheckArgs ga;
  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference check of one loss family");
  gradcheck->add_option("--family", ga.family)->capture_default_str();
  gradcheck->add_option("--pairs", ga.pairs)->capture_default_str();
  gradcheck->add_option("--sites", ga.sites)->capture_default_str();
  gradcheck->add_option("--step", ga.step)->capture_default_str();
  gradcheck->add_option("--shape", ga.shape)->delimiter(',')->capture_default_str();

  std::string correlate_config;
  auto* correlate = app.add_subcommand("correlate", "estimator and loss correlation study");
  correlate->add_option("config", correlate_config, "JSON config (defaults when omitted)")->check(CLI::ExistingFile);

  std::string optimize_config;
  auto* optimize = app.add_subcommand("optimize", "direct probability-map optimization demo");
  optimize->add_option("config", optimize_config, "JSON config (defaults when omitted)")->check(CLI::ExistingFile);

  std::string synth_config;
  int synth_count = 10;
  auto* synth = app.add_subcommand("synth", "write synthetic truth/prediction pairs");
  synth->add_option("config", synth_config, "JSON synth config (defaults when omitted)")->check(CLI::ExistingFile);
  synth->add_option("--count", synth_count)->capture_default_str();

  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path)->required()->check(CLI::ExistingFile);

  for (auto* sub : {eval, loss, gradcheck, correlate, optimize, synth, replay_cmd}) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    print_error(ErrorCode::InvalidArgument, e.what());
    return 2;
  }
  if (seed_opt->count() > 0) g.seed = seed_value;

  try {
    if (replay_cmd->parsed()) {
      const auto* out_opt = app.get_option("--out-dir");
      return replay(manifest_path, out_opt->count() > 0 ? std::optional<std::string>(g.out_dir) : std::nullopt);
    }
    Run run;
    run.started_at = cli::utc_timestamp();
    run.out_dir = g.out_dir;
    run.seed = g.seed.value_or(kDefaultSeed);
    fs::create_directories(run.out_dir);

    json result;
    if (eval->parsed()) {
      run.command = "eval";
      result = cmd_eval(ea, run);
    } else if (loss->parsed()) {
      run.command = "loss";
      result = cmd_loss(la, run);
    } else if (gradcheck->parsed()) {
      run.command = "gradcheck";
      result = cmd_gradcheck(ga, run);
    } else if (correlate->parsed()) {
      run.command = "correlate";
      result = cmd_correlate(correlate_config, g, run);
    } else if (optimize->parsed()) {
      run.command = "optimize";
      result = cmd_optimize(optimize_config, g, run);
    } else if (synth->parsed()) {
      run.command = "synth";
      result = cmd_synth(synth_config, synth_count, g, run);
    }

    json manifest{{"command", run.command},
                  {"argv", args},
                  {"config", run.config},
                  {"seed", run.seed},
                  {"threads", g.threads},
                  {"version", HAUSLOSS_VERSION},
                  {"started_at", run.started_at},
                  {"finished_at", cli::utc_timestamp()},
                  {"inputs", run.inputs},
                  {"outputs", run.outputs}};
    write_json(run.out_dir / "manifest.json", manifest);
    std::cout << result.dump() << std::endl;
    return 0;
  } catch (const Error& e) {
    print_error(e.code(), e.what());
    return 1;
  } catch (const fs::filesystem_error& e) {
    print_error(ErrorCode::Io, e.what());
    return 1;
  }
}

}  // namespace

int main(int argc, char** argv) { return run_cli(std::vector<std::string>(argv + 1, argv + argc)); }
