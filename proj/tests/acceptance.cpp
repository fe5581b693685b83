// Acceptance suite. Prints one PASS/FAIL line per criterion; with a numeric
// argument only that criterion runs. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include "cli_runner.hpp"
#include "hausloss/losses.hpp"
#include "hausloss/metrics.hpp"
#include "hausloss/npy.hpp"
#include "hausloss/studies.hpp"
#include "oracles.hpp"

using namespace hausloss;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1: exact metrics against the pairwise oracle.
Outcome exact_metrics() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2019);
  int mismatches = 0;
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const bool three = t % 10 >= 7;
    const GridSpec s = oracle::random_spec(rng, three ? 3 : 2, three ? 16 : 32, t % 2 == 1);
    const BinaryMask p = oracle::random_mask(rng, s), q = oracle::random_mask(rng, s);
    const auto bx = oracle::boundary(p), by = oracle::boundary(q);
    const BoundarySet x(s, bx), y(s, by);
    const int k = 1 + static_cast<int>(std::min(bx.size(), by.size()) / 4);
    const double pairs[][2] = {
        {hausdorff(x, y), oracle::hausdorff(s, bx, by)},
        {directed_hd(x, y), oracle::max_of(oracle::directed(s, bx, by))},
        {directed_hd(y, x), oracle::max_of(oracle::directed(s, by, bx))},
        {percentile_hd(x, y, 95.0), oracle::pooled_percentile(s, bx, by, 95.0)},
        {asd(x, y), oracle::asd(s, bx, by)},
        {partial_hd(x, y, k), oracle::partial(s, bx, by, k)},
        {modified_hd(x, y), oracle::modified(s, bx, by)},
    };
    for (const auto& v : pairs) {
      const double d = std::abs(v[0] - v[1]);
      worst = std::max(worst, d);
      if (d > 1e-9) ++mismatches;
    }
  }
  const double secs = seconds_since(t0);
  return {mismatches == 0 && secs < 30.0,
          fmt("200 pairs, %d mismatches, max |diff| %.3g, %.1f s (limit 30 s)", mismatches, worst, secs)};
}

// 2: distance transform against the exhaustive scan.
Outcome edt_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(2020);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const bool three = t % 10 >= 7;
    const GridSpec s = oracle::random_spec(rng, three ? 3 : 2, three ? 24 : 64, t % 2 == 1);
    const BinaryMask m = oracle::random_mask(rng, s, 0.005);
    const auto sites = oracle::boundary(m);
    const auto want = oracle::edt(s, sites);
    const DistanceMap got = edt_to_set(s, BoundarySet(s, sites));
    for (Index i = 0; i < s.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[static_cast<std::size_t>(i)]));
  }
  const double secs = seconds_since(t0);
  return {worst <= 1e-9 && secs < 60.0, fmt("100 masks, max |diff| %.3g, %.1f s (limit 60 s)", worst, secs)};
}

const CorrelationReport& corpus() {
  static const CorrelationReport report = [] {
    CorrelationConfig cfg;
    cfg.n_pairs = 200;
    return run_correlation(cfg);
  }();
  return report;
}

std::string range_note(const CorrelationReport& r) {
  return fmt("HD range [%.2f, %.2f]", r.hd_min, r.hd_max);
}

bool wide_range(const CorrelationReport& r) { return r.hd_min <= 1.0 && r.hd_max >= 15.0; }

Outcome thresholds(const std::vector<std::pair<std::string, double>>& want) {
  const auto& r = corpus();
  bool ok = wide_range(r) && r.rows.size() >= 200;
  std::string detail = fmt("%zu pairs, ", r.rows.size()) + range_note(r);
  for (const auto& [name, min_r] : want) {
    const double got = r.fits.at(name).pearson;
    ok = ok && got >= min_r;
    detail += fmt(", %s r=%.4f (>= %.2f)", name.c_str(), got, min_r);
  }
  return {ok, detail};
}

// 3 and 4: Pearson r on the default corpus.
Outcome estimator_correlation() { return thresholds({{"hd_dt", 0.99}, {"hd_cv", 0.97}, {"hd_er", 0.85}}); }
Outcome loss_correlation() { return thresholds({{"loss_dt", 0.85}, {"loss_cv", 0.80}, {"loss_er", 0.75}}); }

// 5: erosion estimate stays below exact HD + 2 spacing units.
Outcome er_lower_bound() {
  const auto& r = corpus();
  int over = 0;
  double worst = 0.0;
  for (const auto& row : r.rows) {
    if (row.hd_er > row.hd_exact + 2.0) ++over;
    worst = std::max(worst, row.hd_er - row.hd_exact);
  }
  const double frac = r.er_lower_bound_fraction;
  return {frac >= 0.95, fmt("%.1f%% of pairs within bound (need 95%%), %d over, worst excess %.2f", 100.0 * frac, over, worst)};
}

// 6: analytic gradients against central differences.
Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  bool ok = true;
  std::string detail;
  for (LossFamily f : {LossFamily::Dsc, LossFamily::Dt, LossFamily::DtOs, LossFamily::DtGauss, LossFamily::Er,
                       LossFamily::Cv}) {
    GradcheckConfig cfg;
    cfg.family = f;
    cfg.n_pairs = 10;
    cfg.sites_per_pair = 50;
    const GradcheckReport r = run_gradcheck(cfg);
    int checked = 0;
    for (const auto& p : r.pairs) checked += p.sites_checked;
    ok = ok && r.pass && checked == 500;
    detail += fmt("%s %.2g/%.0e ", std::string(to_string(f)).c_str(), r.max_rel_error, r.tolerance);
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 120.0;
  return {ok, detail + fmt("(10 pairs x 50 sites each, %.1f s, limit 120 s)", secs)};
}

// 7: lambda balances the two terms on the batch it was computed from.
Outcome lambda_identity() {
  double worst = 0.0;
  const LossParams params = LossParams::defaults(2);
  for (int b = 0; b < 20; ++b) {
    std::vector<std::pair<ProbMap<double>, ProbMap<double>>> batch;
    for (int i = 0; i < 2 + b % 5; ++i) batch.push_back(random_map_pair(GridSpec({32, 32}), 4000 + b, i));
    for (LossFamily f : {LossFamily::Dt, LossFamily::DtOs, LossFamily::DtGauss, LossFamily::Er, LossFamily::Cv}) {
      const LambdaState s = update_lambda(LambdaState{}, batch, f, params);
      double hd = 0.0, dice = 0.0;
      for (const auto& [p, q] : batch) {
        hd += family_loss(f, p, q, params).value;
        dice += dsc_loss(p, q).value;
      }
      const double n = static_cast<double>(batch.size());
      worst = std::max(worst, std::abs(s.lambda * (dice / n) - hd / n));
    }
  }
  return {worst <= 1e-12, fmt("100 batch updates, max |lambda*mean(dsc) - mean(hd)| = %.3g", worst)};
}

// 8: HD-based training beats Dice-only on HD without losing Dice.
Outcome hd_reduction() {
  const auto t0 = std::chrono::steady_clock::now();
  OptimizeConfig cfg;
  cfg.n_cases = 20;
  const OptimizeReport r = run_optimize(cfg);
  bool ok = true;
  std::string detail;
  for (const auto& s : r.summary) {
    if (s.family == LossFamily::Dsc) continue;
    const bool fam = s.share_hd_not_worse >= 0.8 && std::abs(s.mean_dsc_delta) <= 0.02;
    ok = ok && fam;
    detail += fmt("%s: HD not worse %.0f%%, mean DSC delta %+.3f, HD reduction %.0f%% [%s]; ",
                  std::string(to_string(s.family)).c_str(), 100.0 * s.share_hd_not_worse, s.mean_dsc_delta,
                  100.0 * s.hd_reduction_vs_dsc, fam ? "ok" : "fail");
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 600.0;
  return {ok, detail + fmt("%.1f s", secs)};
}

// 9: invariances of the exact metrics.
Outcome invariances() {
  std::mt19937_64 rng(2021);
  int translation = 0, scaling = 0, symmetry = 0, zero = 0;
  for (int t = 0; t < 100; ++t) {
    // Translation: shapes drawn on a small canvas and embedded at two offsets.
    const GridSpec inner = oracle::random_spec(rng, 2, 20, false);
    const GridSpec outer({inner.extent(0) + 12, inner.extent(1) + 12}, {0.7, 1.3});
    const BinaryMask a = oracle::random_mask(rng, inner), b = oracle::random_mask(rng, inner);
    auto embed = [&](const BinaryMask& m, Index di, Index dj) {
      BinaryMask::Array v = BinaryMask::Array::Zero(outer.size());
      for (Index i = 0; i < inner.size(); ++i) {
        const Coord c = inner.coord(i);
        v[outer.linear({0, c[1] + di, c[2] + dj})] = m.values()[i];
      }
      return BinaryMask(outer, v);
    };
    const Index di = static_cast<Index>(rng() % 12), dj = static_cast<Index>(rng() % 12);
    const MetricReport r0 = evaluate(embed(a, 0, 0), embed(b, 0, 0), 2);
    const MetricReport r1 = evaluate(embed(a, di, dj), embed(b, di, dj), 2);
    if (r0.hd == r1.hd && r0.hd95 == r1.hd95 && r0.asd == r1.asd && r0.modified_hd == r1.modified_hd &&
        r0.partial_hd == r1.partial_hd && r0.dsc == r1.dsc)
      ++translation;

    // Spacing: power-of-two factors keep every intermediate exact.
    const GridSpec s = oracle::random_spec(rng, t % 4 ? 2 : 3, t % 4 ? 24 : 10, true);
    const BinaryMask p = oracle::random_mask(rng, s), q = oracle::random_mask(rng, s);
    const double c = std::ldexp(1.0, static_cast<int>(rng() % 7) - 3);
    std::vector<double> sc;
    for (double x : s.spacing()) sc.push_back(c * x);
    const MetricReport m0 = evaluate(p, q, 2);
    const MetricReport m1 = evaluate(p.with_spacing(sc), q.with_spacing(sc), 2);
    if (m1.hd == c * m0.hd && m1.hd95 == c * m0.hd95 && m1.asd == c * m0.asd && m1.partial_hd == c * m0.partial_hd &&
        m1.modified_hd == c * m0.modified_hd && m1.dsc == m0.dsc)
      ++scaling;

    if (evaluate(p, q).hd == evaluate(q, p).hd) ++symmetry;

    // Zero iff identical: the same mask, and a copy with one site flipped.
    BinaryMask::Array v = p.values();
    const auto flip = static_cast<Index>(rng() % static_cast<std::uint64_t>(s.size()));
    v[flip] = 1 - v[flip];
    const BinaryMask near(s, v);
    const bool same_zero = evaluate(p, p).hd == 0.0;
    const bool diff_pos = !near.any() || evaluate(p, near).hd > 0.0;
    const bool rand_ok = (evaluate(p, q).hd == 0.0) == (p == q);
    if (same_zero && diff_pos && rand_ok) ++zero;
  }
  const bool ok = translation == 100 && scaling == 100 && symmetry == 100 && zero == 100;
  return {ok, fmt("translation %d/100, spacing %d/100, symmetry %d/100, zero-iff-identical %d/100", translation, scaling,
                  symmetry, zero)};
}

// 10: replaying a manifest reproduces every report byte for byte.
Outcome determinism() {
  const fs::path root = cli_test::fresh_dir("acceptance_determinism");
  const GridSpec s({32, 32});
  const auto [p, q] = random_map_pair(s, 11, 0);
  npy::write_field(root / "p.npy", p.grid());
  npy::write_field(root / "q.npy", q.grid());
  std::ofstream(root / "opt.json") << R"({"n_cases": 4, "iterations": 30})";
  std::ofstream(root / "cor.json") << R"({"n_pairs": 40})";
  const std::string P = (root / "p.npy").string(), Q = (root / "q.npy").string();
  const std::vector<std::pair<std::string, std::string>> commands{
      {"eval", "eval " + P + " " + Q},
      {"loss", "loss " + P + " " + Q + " --family combined --base cv --lambda 0.5 --grad-out " + (root / "g.npy").string()},
      {"gradcheck", "gradcheck --family er --pairs 3"},
      {"correlate", "correlate " + (root / "cor.json").string() + " --threads 3"},
      {"optimize", "optimize " + (root / "opt.json").string() + " --threads 2"},
      {"synth", "synth --count 4 --seed 99"},
  };
  int identical = 0, compared = 0;
  std::string failures;
  for (const auto& [name, args] : commands) {
    const fs::path a = root / (name + "_a"), b = root / (name + "_b");
    const auto first = cli_test::run(args + " --out-dir " + a.string());
    const auto second = cli_test::run("replay " + (a / "manifest.json").string() + " --out-dir " + b.string());
    if (first.status != 0 || second.status != 0) {
      failures += name + "(exit) ";
      continue;
    }
    bool same = first.out == second.out;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
      if (!e.is_regular_file() || e.path().filename() == "manifest.json") continue;
      ++compared;
      const fs::path other = b / fs::relative(e.path(), a);
      same = same && fs::exists(other) && cli_test::slurp(e.path()) == cli_test::slurp(other);
    }
    if (same) ++identical;
    else failures += name + " ";
  }
  return {identical == static_cast<int>(commands.size()),
          fmt("%d/%zu commands byte-identical on replay (%d files compared)%s%s", identical, commands.size(), compared,
              failures.empty() ? "" : ", differing: ", failures.c_str())};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"exact metrics match brute force", exact_metrics}},
      {2, {"distance transform is exact", edt_exactness}},
      {3, {"estimator correlations", estimator_correlation}},
      {4, {"loss correlations", loss_correlation}},
      {5, {"erosion estimate lower bound", er_lower_bound}},
      {6, {"gradient checks", gradients}},
      {7, {"lambda schedule identity", lambda_identity}},
      {8, {"HD reduction versus Dice-only", hd_reduction}},
      {9, {"metric invariances", invariances}},
      {10, {"CLI determinism", determinism}},
  };
  std::optional<int> only;
  if (argc > 1) only = std::atoi(argv[1]);
  int failures = 0;
  for (const auto& [id, entry] : criteria) {
    if (only && *only != id) continue;
    Outcome o;
    try {
      o = entry.second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    std::printf("AC%-2d %s  %s: %s\n", id, o.pass ? "PASS" : "FAIL", entry.first, o.detail.c_str());
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures;
}
