#include "patchfuse/patch_layout.hpp"

#include <algorithm>
#include <cmath>

namespace patchfuse {

const char* to_string(ScaleId s) {
  switch (s) {
    case ScaleId::large: return "large";
    case ScaleId::medium: return "medium";
    case ScaleId::small: return "small";
  }
  return "?";
}

ScaleId scale_from_string(const std::string& s) {
  if (s == "large") return ScaleId::large;
  if (s == "medium") return ScaleId::medium;
  if (s == "small") return ScaleId::small;
  throw FormatError("unknown scale id '" + s + "'");
}

namespace {

// 1-D tile positions over [lo, hi): stride steps plus one edge-aligned
// position when a remainder would otherwise stay uncovered. A region smaller
// than the patch yields a single clipped position.
std::vector<std::pair<int, int>> tile_axis(int lo, int hi, int size, int stride) {
  std::vector<std::pair<int, int>> out;  // (position, extent)
  const int extent = hi - lo;
  if (extent <= 0) return out;
  if (extent <= size) {
    out.emplace_back(lo, extent);
    return out;
  }
  int pos = lo;
  for (; pos + size <= hi; pos += stride) out.emplace_back(pos, size);
  if (out.back().first + size < hi) out.emplace_back(hi - size, size);
  return out;
}

void tile_scale(const LayoutConfig& cfg, ScaleId scale, int y_lo, int y_hi,
                std::vector<PatchSpec>& out) {
  const int size = cfg.patch_size(scale);
  if (size <= 0) return;
  const int stride = cfg.stride(scale);
  const auto xs = tile_axis(0, cfg.image_w, size, stride);
  const auto ys = tile_axis(y_lo, y_hi, size, stride);
  for (const auto& [y0, h] : ys) {
    for (const auto& [x0, w] : xs) {
      out.push_back({Rect{x0, y0, w, h}, scale});
    }
  }
}

}  // namespace

std::vector<PatchSpec> tile_patches(const LayoutConfig& cfg) {
  if (cfg.image_w <= 0 || cfg.image_h <= 0) throw ConfigError("layout: image dimensions must be positive");
  for (int s = 0; s < 3; ++s) {
    if (cfg.patch_sizes[std::size_t(s)] > 0 && cfg.strides[std::size_t(s)] < 1) {
      throw ConfigError("layout: strides must be >= 1");
    }
  }
  // size ordering only applies to the scales that are enabled
  int prev = 0;
  for (int s = 0; s < 3; ++s) {
    const int size = cfg.patch_sizes[std::size_t(s)];
    if (size <= 0) continue;
    if (prev > 0 && size >= prev) {
      throw ConfigError("layout: patch sizes must strictly decrease from large to small");
    }
    prev = size;
  }

  std::vector<PatchSpec> out;
  tile_scale(cfg, ScaleId::large, cfg.horizon_y, cfg.image_h, out);
  for (ScaleId s : {ScaleId::medium, ScaleId::small}) {
    if (cfg.patch_size(s) <= 0) continue;
    const int bh = cfg.band_half_height(s);
    const int y_lo = std::max(0, cfg.horizon_y - bh);
    const int y_hi = std::min(cfg.image_h, cfg.horizon_y + bh + 1);
    tile_scale(cfg, s, y_lo, y_hi, out);
  }
  if (out.empty()) throw EmptyLayout("no patch fits the configured layout");
  return out;
}

ProbTensor upsample_bilinear(const ProbTensor& src, int target_w, int target_h) {
  if (target_w < src.width() || target_h < src.height()) {
    throw DimensionError("upsample target smaller than source");
  }
  if (target_w == src.width() && target_h == src.height()) return src;

  const int sw = src.width(), sh = src.height(), L = src.n_labels();
  ProbTensor dst(target_w, target_h, L);

  const double fx = target_w > 1 ? double(sw - 1) / double(target_w - 1) : 0.0;
  const double fy = target_h > 1 ? double(sh - 1) / double(target_h - 1) : 0.0;

  for (int y = 0; y < target_h; ++y) {
    const double sy = fy * y;
    const int y0 = std::min(int(sy), sh - 1);
    const int y1 = std::min(y0 + 1, sh - 1);
    const double wy = sy - y0;
    for (int x = 0; x < target_w; ++x) {
      const double sx = fx * x;
      const int x0 = std::min(int(sx), sw - 1);
      const int x1 = std::min(x0 + 1, sw - 1);
      const double wx = sx - x0;
      double sum = 0.0;
      for (int l = 0; l < L; ++l) {
        const double v00 = src.at(x0, y0, l), v10 = src.at(x1, y0, l);
        const double v01 = src.at(x0, y1, l), v11 = src.at(x1, y1, l);
        const double v = (1 - wy) * ((1 - wx) * v00 + wx * v10) +
                         wy * ((1 - wx) * v01 + wx * v11);
        dst.at(x, y, l) = float(v);
        sum += v;
      }
      if (sum > 0.0) {
        for (int l = 0; l < L; ++l) dst.at(x, y, l) = float(dst.at(x, y, l) / sum);
      } else {
        for (int l = 0; l < L; ++l) dst.at(x, y, l) = 1.0f / float(L);
      }
    }
  }
  return dst;
}

}  // namespace patchfuse
