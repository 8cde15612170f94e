#pragma once

#include <array>
#include <string>
#include <vector>

#include "patchfuse/grid.hpp"

namespace patchfuse {

enum class ScaleId : int { large = 0, medium = 1, small = 2 };

const char* to_string(ScaleId s);
ScaleId scale_from_string(const std::string& s);  // FormatError on unknown name

struct PatchSpec {
  Rect rect;
  ScaleId scale = ScaleId::large;
};

// Placement of the multi-scale patch stride. Large patches tile everything
// below horizon_y; medium/small patches tile only a horizontal band around
// horizon_y, where far-away instances are expected. A patch size of 0
// disables that scale.
struct LayoutConfig {
  int image_w = 0;
  int image_h = 0;
  int horizon_y = 0;
  std::array<int, 3> patch_sizes{192, 96, 48};     // indexed by ScaleId
  std::array<int, 3> strides{96, 48, 24};
  std::array<int, 3> band_half_heights{0, 48, 24}; // unused for large

  int patch_size(ScaleId s) const { return patch_sizes[std::size_t(int(s))]; }
  int stride(ScaleId s) const { return strides[std::size_t(int(s))]; }
  int band_half_height(ScaleId s) const { return band_half_heights[std::size_t(int(s))]; }
};

// Deterministic tiling; throws EmptyLayout when no patch of any enabled
// scale fits, ConfigError on an invalid config.
std::vector<PatchSpec> tile_patches(const LayoutConfig& cfg);

// Align-corners bilinear interpolation of every channel, then per-pixel
// renormalization. Target must be at least as large as the source.
ProbTensor upsample_bilinear(const ProbTensor& src, int target_w, int target_h);

}  // namespace patchfuse
