#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "patchfuse/grid.hpp"
#include "patchfuse/patch_layout.hpp"

namespace patchfuse {

// One patch-level prediction: footprint, the native (possibly coarser)
// probability tensor, and fields derived by prepare_prediction().
struct PatchPrediction {
  PatchSpec spec;
  ProbTensor probs;      // native resolution, dims <= rect dims
  ProbTensor averaged;   // rect resolution, component-averaged
  LabelMap argmax;       // rect resolution, the patch's own floor map

  bool prepared() const { return !averaged.empty(); }
};

// Upsamples the native tensor to the patch footprint, caches its argmax map,
// and applies component averaging. Idempotent.
void prepare_prediction(PatchPrediction& pred);

// Replaces every pixel's distribution by the mean over its 4-connected
// component in the argmax map, computed separately per foreground label.
// Background pixels keep their original vectors.
ProbTensor component_average(const ProbTensor& probs, const LabelMap& argmax);

// Per pixel: all covering patches' floor labels plus the winning label of the
// component-averaged distributions across patches.
struct MergedMap {
  LabelMap label_map;
  std::vector<std::uint32_t> floor_offset;                 // CSR over pixels
  std::vector<std::pair<std::uint16_t, Label>> floors;     // (patch id, floor)

  std::size_t floor_count(std::size_t p) const {
    return floor_offset[p + 1] - floor_offset[p];
  }
};

// Maximizing (label, patch) pair per pixel over component-averaged
// distributions; ties break toward the smaller label, then the smaller patch
// index. Uncovered pixels stay background with no floor entries.
MergedMap merge_patches(std::vector<PatchPrediction>& preds, int image_w, int image_h);

}  // namespace patchfuse
