#pragma once

#include <cstdint>
#include <vector>

#include "patchfuse/components.hpp"
#include "patchfuse/energy.hpp"
#include "patchfuse/inference.hpp"
#include "patchfuse/io.hpp"
#include "patchfuse/merging.hpp"

namespace patchfuse {

struct FuseParams {
  EnergyWeights weights;
  int long_edge_samples = 20000;
  std::uint64_t energy_seed = 7;
  int n_max = kDefaultNMax;
  int max_sweeps = 5;
  double epsilon = 1e-12;
  bool run_postprocess = true;
  int min_size = 200;
};

FuseParams fuse_params_from(const RunConfig& cfg, bool run_postprocess = true);

struct FuseResult {
  LabelMap pred;
  LabelMap merged;  // cross-patch argmax before inference
  LabelMap init;    // component-order initialization
  MinimizeResult opt;
  bool postprocessed = false;
  int n_components = 0;
  std::size_t n_long_edges = 0;
};

// merge -> connected components -> energy model -> swap minimization ->
// optional post-processing. Predictions are prepared in place.
FuseResult fuse(std::vector<PatchPrediction>& preds, int image_w, int image_h,
                const FuseParams& params);

}  // namespace patchfuse
