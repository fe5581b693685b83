#include "hausloss/synth.hpp"

#include <cmath>
#include <string>

#include "hausloss/edt.hpp"
#include "hausloss/hd_cv.hpp"
#include "hausloss/random.hpp"

namespace hausloss {

void SynthConfig::validate() const {
  require(rank == 2 || rank == 3, ErrorCode::InvalidArgument, "synth rank must be 2 or 3");
  require(static_cast<int>(shape.size()) == rank, ErrorCode::InvalidArgument, "synth shape must match rank");
  for (Index e : shape) require(e >= 16, ErrorCode::InvalidArgument, "synth extents must be >= 16");
  require(n_blobs >= 1, ErrorCode::InvalidArgument, "n_blobs must be >= 1");
  require(blob_radius_min > 0.0 && blob_radius_max >= blob_radius_min, ErrorCode::InvalidArgument,
          "blob radius range must be positive and ordered");
  require(fg_fraction_min >= 0.0 && fg_fraction_max <= 1.0 && fg_fraction_min < fg_fraction_max,
          ErrorCode::InvalidArgument, "foreground fraction bounds must be ordered within [0, 1]");
  require(border_margin >= 0 && smoothing_radius >= 0 && max_attempts >= 1, ErrorCode::InvalidArgument,
          "margins, radii and attempts must be nonnegative");
  const auto& pc = perturbation;
  require(pc.dilate_erode_min >= 0 && pc.dilate_erode_max >= pc.dilate_erode_min && pc.translate >= 0 &&
              pc.boundary_noise_amp >= 0.0 && pc.boundary_noise_patches >= 0,
          ErrorCode::InvalidArgument, "perturbation ranges must be nonnegative and ordered");
}

int count_components(const BinaryMask& mask) {
  const GridSpec& spec = mask.spec();
  const auto offsets = face_offsets(spec.rank());
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(spec.size()), 0);
  std::vector<Index> stack;
  int components = 0;
  for (Index i = 0; i < spec.size(); ++i) {
    if (!mask[i] || seen[i]) continue;
    ++components;
    seen[i] = 1;
    stack.push_back(i);
    while (!stack.empty()) {
      const Coord c = spec.coord(stack.back());
      stack.pop_back();
      for (const Coord& o : offsets) {
        const Coord n{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
        if (!spec.contains(n)) continue;
        const Index j = spec.linear(n);
        if (mask[j] && !seen[j]) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
  }
  return components;
}

BinaryMask translate(const BinaryMask& mask, const std::vector<Index>& offset) {
  const GridSpec& spec = mask.spec();
  const Coord shift = spec.padded(offset);
  Grid<std::uint8_t> out(spec, 0);
  for (Index i = 0; i < spec.size(); ++i) {
    if (!mask[i]) continue;
    const Coord c = spec.coord(i);
    const Coord n{c[0] + shift[0], c[1] + shift[1], c[2] + shift[2]};
    if (spec.contains(n)) out.at(n) = 1;
  }
  return BinaryMask(std::move(out));
}

namespace {

bool within_margin(const BinaryMask& mask, int margin) {
  const GridSpec& spec = mask.spec();
  const Index lead = 3 - spec.rank();
  for (Index i = 0; i < spec.size(); ++i) {
    if (!mask[i]) continue;
    const Coord c = spec.coord(i);
    for (Index a = lead; a < 3; ++a) {
      if (c[a] < margin || c[a] >= spec.extents3()[a] - margin) return false;
    }
  }
  return true;
}

BinaryMask dilate_euclidean(const BinaryMask& mask, double radius) {
  if (!mask.any()) return mask;
  const DistanceMap d = foreground_dt(BinaryMask(mask.spec().with_unit_spacing(), mask.values()));
  return BinaryMask(mask.spec(), (d.values() <= radius).cast<std::uint8_t>().eval());
}

BinaryMask erode_euclidean(const BinaryMask& mask, double radius) {
  const DistanceMap d = background_dt(BinaryMask(mask.spec().with_unit_spacing(), mask.values()));
  return BinaryMask(mask.spec(), (d.values() > radius).cast<std::uint8_t>().eval());
}

// Sets (value = 1) or clears (value = 0) a Euclidean ball of `radius`.
void paint_ball(Grid<std::uint8_t>& g, const Coord& centre, double radius, std::uint8_t value) {
  const GridSpec& spec = g.spec();
  const auto r = static_cast<Index>(std::floor(radius));
  const Index zr = spec.rank() == 3 ? r : 0;
  for (Index dz = -zr; dz <= zr; ++dz) {
    for (Index dy = -r; dy <= r; ++dy) {
      for (Index dx = -r; dx <= r; ++dx) {
        if (static_cast<double>(dz * dz + dy * dy + dx * dx) > radius * radius) continue;
        const Coord n{centre[0] + dz, centre[1] + dy, centre[2] + dx};
        if (spec.contains(n)) g.at(n) = value;
      }
    }
  }
}

}  // namespace

BinaryMask generate_truth(const SynthConfig& cfg, std::int64_t index) {
  cfg.validate();
  const GridSpec spec = cfg.spec();
  const Index lead = 3 - spec.rank();
  for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
    Rng rng(cfg.seed, static_cast<std::uint64_t>(index), "truth/" + std::to_string(attempt));
    struct Bump {
      std::array<double, 3> centre;
      double inv_two_var;
      double height;
    };
    std::vector<Bump> bumps;
    const int n = static_cast<int>(rng.integer(1, cfg.n_blobs));
    for (int b = 0; b < n; ++b) {
      Bump bump{{0.0, 0.0, 0.0}, 0.0, rng.uniform(0.8, 1.2)};
      const double radius = rng.uniform(cfg.blob_radius_min, cfg.blob_radius_max);
      bump.inv_two_var = 1.0 / (2.0 * radius * radius);
      for (Index a = lead; a < 3; ++a) {
        const double lo = cfg.border_margin + radius;
        const double hi = static_cast<double>(spec.extents3()[a]) - 1.0 - cfg.border_margin - radius;
        bump.centre[a] = lo < hi ? rng.uniform(lo, hi) : 0.5 * static_cast<double>(spec.extents3()[a] - 1);
      }
      bumps.push_back(bump);
    }

    Grid<std::uint8_t> g(spec, 0);
    for (Index i = 0; i < spec.size(); ++i) {
      const Coord c = spec.coord(i);
      double field = 0.0;
      for (const Bump& b : bumps) {
        double r2 = 0.0;
        for (Index a = lead; a < 3; ++a) {
          const double d = static_cast<double>(c[a]) - b.centre[a];
          r2 += d * d;
        }
        field += b.height * std::exp(-r2 * b.inv_two_var);
      }
      g[i] = field >= 0.5 ? 1 : 0;
    }
    BinaryMask mask(std::move(g));
    const double fraction = static_cast<double>(mask.count()) / static_cast<double>(spec.size());
    if (fraction < cfg.fg_fraction_min || fraction > cfg.fg_fraction_max) continue;
    if (count_components(mask) != 1) continue;
    if (!within_margin(mask, cfg.border_margin)) continue;
    if (mask.count() == spec.size()) continue;
    return mask;
  }
  throw Error(ErrorCode::GenerationFailed,
              "no valid truth mask for index " + std::to_string(index) + " after " +
                  std::to_string(cfg.max_attempts) + " attempts");
}

BinaryMask perturb(const BinaryMask& truth, const SynthConfig& cfg, std::int64_t index) {
  cfg.validate();
  const auto& pc = cfg.perturbation;
  if (pc.is_zero()) return truth;
  Rng rng(cfg.seed, static_cast<std::uint64_t>(index), "perturb");
  const GridSpec& spec = truth.spec();

  std::vector<Index> shift;
  for (int a = 0; a < spec.rank(); ++a) shift.push_back(rng.integer(-pc.translate, pc.translate));
  BinaryMask out = translate(truth, shift);
  if (!out.any()) out = truth;

  const auto steps = static_cast<double>(rng.integer(pc.dilate_erode_min, pc.dilate_erode_max));
  const bool grow = rng.uniform() < 0.5;
  if (steps > 0.0) {
    BinaryMask morphed = grow ? dilate_euclidean(out, steps) : erode_euclidean(out, steps);
    if (morphed.any()) out = std::move(morphed);
  }

  if (pc.boundary_noise_amp >= 1.0 && pc.boundary_noise_patches > 0) {
    const int patches = static_cast<int>(rng.integer(1, pc.boundary_noise_patches));
    for (int k = 0; k < patches; ++k) {
      const BoundarySet edge = boundary(out);
      const Index site = edge.sites()[static_cast<std::size_t>(rng.integer(0, static_cast<long long>(edge.size()) - 1))];
      const double radius = rng.uniform(1.0, pc.boundary_noise_amp);
      const bool add = rng.uniform() < 0.5;
      Grid<std::uint8_t> g = out.grid();
      paint_ball(g, spec.coord(site), radius, add ? 1 : 0);
      BinaryMask candidate(std::move(g));
      if (candidate.any()) out = std::move(candidate);
    }
  }
  return out;
}

ProbMap<double> soften(const BinaryMask& mask, int radius) {
  require(radius >= 0, ErrorCode::InvalidArgument, "smoothing radius must be >= 0");
  if (radius == 0) return ProbMap<double>::from_mask(mask);
  const Grid<double> blurred = convolve(mask.grid().cast<double>(), BallKernel(mask.spec().rank(), radius));
  return ProbMap<double>(mask.spec(), blurred.values().min(1.0).max(0.0).eval());
}

CorpusPair corpus_pair(const SynthConfig& cfg, std::int64_t index) {
  BinaryMask truth = generate_truth(cfg, index);
  BinaryMask perturbed = perturb(truth, cfg, index);
  return {std::move(truth), std::move(perturbed)};
}

}  // namespace hausloss
