#pragma once

#include <cstdint>
#include <vector>

#include "hausloss/grid.hpp"

namespace hausloss {

struct PerturbationConfig {
  int dilate_erode_min = 0;   // Euclidean dilation/erosion radius range (pixels);
  int dilate_erode_max = 1;   // the sign is drawn per item
  int translate = 1;          // per-axis shift drawn from [-translate, translate]
  double boundary_noise_amp = 15.0;  // largest radius of a local boundary bump or bite
  int boundary_noise_patches = 1;   // 1 to this many bumps/bites per item

  bool is_zero() const {
    return dilate_erode_max == 0 && translate == 0 && (boundary_noise_amp < 1.0 || boundary_noise_patches == 0);
  }
};

/// Deterministic corpus recipe. Every item is a pure function of
/// (config, index).
struct SynthConfig {
  std::uint64_t seed = 2019;
  int rank = 2;
  std::vector<Index> shape{64, 64};
  int n_blobs = 3;
  double blob_radius_min = 8.0;
  double blob_radius_max = 13.0;
  double fg_fraction_min = 0.04;
  double fg_fraction_max = 0.45;
  int border_margin = 6;  // truth foreground stays this far from the grid edge
  PerturbationConfig perturbation;
  int smoothing_radius = 1;
  int max_attempts = 64;

  void validate() const;
  GridSpec spec() const { return GridSpec(shape); }
};

/// Thresholded sum of Gaussian bumps with one face-connected foreground
/// component. Throws GenerationFailed when no attempt satisfies the bounds.
BinaryMask generate_truth(const SynthConfig& cfg, std::int64_t index);

/// Random translation, Euclidean dilation or erosion, then local boundary
/// bumps and bites. The result always has foreground.
BinaryMask perturb(const BinaryMask& truth, const SynthConfig& cfg, std::int64_t index);

/// Normalized disk/ball blur; radius 0 returns the mask unchanged.
ProbMap<double> soften(const BinaryMask& mask, int radius);

struct CorpusPair {
  BinaryMask truth;
  BinaryMask perturbed;
};

CorpusPair corpus_pair(const SynthConfig& cfg, std::int64_t index);

/// Number of face-connected foreground components.
int count_components(const BinaryMask& mask);

/// Integer shift with zero fill (offset in unpadded axis order).
BinaryMask translate(const BinaryMask& mask, const std::vector<Index>& offset);

}  // namespace hausloss
