#pragma once

#include <cstdint>
#include <vector>

#include "patchfuse/grid.hpp"
#include "patchfuse/merging.hpp"
#include "patchfuse/patch_layout.hpp"

namespace patchfuse {

struct NoiseParams {
  double label_flip_prob = 0.0;  // per-pixel chance of a random other label
  int blur_radius = 0;           // box blur of the one-hot channels
  double temperature = 0.0;      // softmax softening; 0 keeps exact one-hot
};

// Axis-aligned rectangle scenes: depth ranks are consistent with the
// bbox-bottom row (lower in the image = nearer), occlusion follows depth.
struct SceneSpec {
  int image_w = 192;
  int image_h = 128;
  int n_instances = 3;  // at most n_max
  int min_side = 28;
  int max_side = 64;
  NoiseParams noise;
  std::uint64_t seed = 1;
  int n_max = kDefaultNMax;

  // layout validity constraints, enforced by rejection sampling: every
  // visible 4-connected fragment of an instance keeps at least
  // min_fragment_px pixels and the scene splits into at most max_fragments
  // fragments overall
  int min_fragment_px = 1;
  int max_fragments = kDefaultNMax;
};

struct Scene {
  LabelMap gt;                  // labels are depth ranks 1..n
  std::vector<Rect> instances;  // instances[i] belongs to label i+1
};

// Deterministic per seed; throws TooManyInstances when n_instances > n_max.
Scene generate_scene(const SceneSpec& spec);

// Emulates patch-level predictors: per patch the GT crop is re-ranked to
// local consecutive labels (the patch only sees the instances intersecting
// it), one-hot encoded, optionally blurred, flipped, temperature-softened,
// and average-pooled down by `downsample`.
std::vector<PatchPrediction> corrupt_to_patches(const LabelMap& gt, const LayoutConfig& layout,
                                                const NoiseParams& noise, int downsample,
                                                std::uint64_t seed, int n_patch_labels = 6);

}  // namespace patchfuse
