#pragma once

#include <cstdint>
#include <vector>

#include "patchfuse/grid.hpp"

namespace patchfuse {

struct Component {
  int id = 0;
  std::vector<std::int32_t> pixels;
  Rect bbox;
  int order = 0;  // 1-based depth rank, 1 = nearest; 0 = not yet ordered
};

// Foreground connected components of a label map. Background is never a
// component; two pixels connect only when 4-adjacent with equal labels.
struct ComponentSet {
  int width = 0;
  int height = 0;
  std::vector<Component> components;
  std::vector<std::int32_t> pixel_to_component;  // -1 for background
};

ComponentSet label_components(const LabelMap& m);

// Assigns depth ranks by bbox bottom row: the component reaching lowest in
// the image gets order 1. Ties break by bbox center column, then id.
// Components beyond n_max are clamped to order n_max (with a warning).
ComponentSet order_components(ComponentSet cs, int n_max = kDefaultNMax);

}  // namespace patchfuse
