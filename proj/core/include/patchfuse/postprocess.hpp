#pragma once

#include "patchfuse/grid.hpp"

namespace patchfuse {

// Clears every 4-connected same-label foreground component smaller than
// min_size pixels.
LabelMap remove_small(const LabelMap& m, int min_size = 200);

// Fills enclosed background regions whose 8-neighborhood boundary carries a
// single foreground label; regions touching the border or bounded by several
// labels stay untouched.
LabelMap fill_holes(const LabelMap& m);

// Splits disconnected same-label groups into separate instances and assigns
// labels 1..K by descending bbox-center row (lowest center = nearest = 1),
// clamped to n_max.
LabelMap relabel_reorder(const LabelMap& m, int n_max = kDefaultNMax);

// remove_small, then fill_holes, then relabel_reorder; idempotent.
LabelMap postprocess(const LabelMap& m, int min_size = 200, int n_max = kDefaultNMax);

}  // namespace patchfuse
