#include "patchfuse/synthdata.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "patchfuse/components.hpp"
#include "patchfuse/rng.hpp"

namespace patchfuse {

Scene generate_scene(const SceneSpec& spec) {
  if (spec.n_instances < 0 || spec.n_instances > spec.n_max) {
    throw TooManyInstances("n_instances=" + std::to_string(spec.n_instances) +
                           " exceeds n_max=" + std::to_string(spec.n_max));
  }
  if (spec.image_w <= 0 || spec.image_h <= 0) throw DimensionError("scene dimensions must be positive");
  if (spec.min_side < 1 || spec.max_side < spec.min_side ||
      spec.max_side > std::min(spec.image_w, spec.image_h)) {
    throw ConfigError("scene: instance side range does not fit the image");
  }

  Rng rng(spec.seed);
  const int n = spec.n_instances;

  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<Rect> rects;
    rects.reserve(std::size_t(n));
    for (int i = 0; i < n; ++i) {
      const int w = rng.next_int(spec.min_side, spec.max_side);
      const int h = rng.next_int(spec.min_side, spec.max_side);
      const int x0 = rng.next_int(0, spec.image_w - w);
      const int y0 = rng.next_int(0, spec.image_h - h);
      rects.push_back({x0, y0, w, h});
    }
    // depth rank by bottom row, nearest (lowest in the image) first;
    // equal bottoms would make the ordering ambiguous, so resample
    std::sort(rects.begin(), rects.end(),
              [](const Rect& a, const Rect& b) { return a.y1() > b.y1(); });
    bool distinct = true;
    for (int i = 0; i + 1 < n; ++i) {
      if (rects[std::size_t(i)].y1() == rects[std::size_t(i + 1)].y1()) distinct = false;
    }
    if (!distinct) continue;

    Scene scene;
    scene.gt = LabelMap(spec.image_w, spec.image_h);
    scene.instances = rects;
    for (int i = n - 1; i >= 0; --i) {  // paint far to near
      const Rect& r = rects[std::size_t(i)];
      for (int y = r.y0; y < r.y1(); ++y) {
        for (int x = r.x0; x < r.x1(); ++x) {
          scene.gt.at(x, y) = Label(i + 1);
        }
      }
    }

    // layout validity: every instance stays visible, fragments are not too
    // small and not too many
    const ComponentSet cs = label_components(scene.gt);
    if (int(cs.components.size()) > spec.max_fragments) continue;
    bool ok = true;
    std::vector<int> visible(std::size_t(n), 0);
    for (const Component& c : cs.components) {
      if (int(c.pixels.size()) < spec.min_fragment_px) ok = false;
      visible[std::size_t(scene.gt[std::size_t(c.pixels[0])] - 1)] += int(c.pixels.size());
    }
    for (int i = 0; i < n; ++i) {
      if (visible[std::size_t(i)] == 0) ok = false;
    }
    if (!ok) continue;
    return scene;
  }
  throw Error("generate_scene: no valid layout found for this spec/seed");
}

namespace {

void box_blur(ProbTensor& t, int radius) {
  if (radius <= 0) return;
  const int w = t.width(), h = t.height(), L = t.n_labels();
  ProbTensor src = t;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int x_lo = std::max(0, x - radius), x_hi = std::min(w - 1, x + radius);
      const int y_lo = std::max(0, y - radius), y_hi = std::min(h - 1, y + radius);
      const double inv = 1.0 / (double(x_hi - x_lo + 1) * double(y_hi - y_lo + 1));
      for (int l = 0; l < L; ++l) {
        double s = 0.0;
        for (int yy = y_lo; yy <= y_hi; ++yy) {
          for (int xx = x_lo; xx <= x_hi; ++xx) s += src.at(xx, yy, l);
        }
        t.at(x, y, l) = float(s * inv);
      }
    }
  }
}

void soften(ProbTensor& t, double temperature) {
  if (temperature <= 0.0) return;
  const int L = t.n_labels();
  for (std::size_t p = 0; p < t.n_pixels(); ++p) {
    auto v = t.pixel(p);
    double sum = 0.0;
    for (int l = 0; l < L; ++l) {
      const double e = std::exp(double(v[std::size_t(l)]) / temperature);
      v[std::size_t(l)] = float(e);
      sum += e;
    }
    for (int l = 0; l < L; ++l) v[std::size_t(l)] = float(v[std::size_t(l)] / sum);
  }
}

ProbTensor pool_down(const ProbTensor& t, int factor) {
  if (factor <= 1) return t;
  const int w = t.width(), h = t.height(), L = t.n_labels();
  const int ow = (w + factor - 1) / factor, oh = (h + factor - 1) / factor;
  ProbTensor out(ow, oh, L);
  for (int oy = 0; oy < oh; ++oy) {
    for (int ox = 0; ox < ow; ++ox) {
      const int x_lo = ox * factor, x_hi = std::min(w, x_lo + factor);
      const int y_lo = oy * factor, y_hi = std::min(h, y_lo + factor);
      const double inv = 1.0 / (double(x_hi - x_lo) * double(y_hi - y_lo));
      for (int l = 0; l < L; ++l) {
        double s = 0.0;
        for (int yy = y_lo; yy < y_hi; ++yy) {
          for (int xx = x_lo; xx < x_hi; ++xx) s += t.at(xx, yy, l);
        }
        out.at(ox, oy, l) = float(s * inv);
      }
    }
  }
  return out;
}

}  // namespace

std::vector<PatchPrediction> corrupt_to_patches(const LabelMap& gt, const LayoutConfig& layout,
                                                const NoiseParams& noise, int downsample,
                                                std::uint64_t seed, int n_patch_labels) {
  if (layout.image_w != gt.width() || layout.image_h != gt.height()) {
    throw DimensionError("corrupt_to_patches: layout does not match the GT map");
  }
  if (n_patch_labels < 2) throw ConfigError("n_patch_labels must be at least 2");

  const std::vector<PatchSpec> specs = tile_patches(layout);
  const Rng base(seed);
  std::vector<PatchPrediction> preds;
  preds.reserve(specs.size());

  for (std::size_t z = 0; z < specs.size(); ++z) {
    const Rect r = specs[z].rect;
    Rng rng = base.child(z);

    // the patch sees only the instances intersecting it: re-rank to local
    // consecutive labels, which keeps the local prediction at or below the
    // global one
    std::vector<int> local_of(256, 0);
    {
      std::vector<std::uint8_t> present(256, 0);
      for (int y = r.y0; y < r.y1(); ++y) {
        for (int x = r.x0; x < r.x1(); ++x) present[gt.at(x, y)] = 1;
      }
      int next = 1;
      for (int l = 1; l < 256; ++l) {
        if (present[std::size_t(l)]) local_of[std::size_t(l)] = std::min(next++, n_patch_labels - 1);
      }
    }

    std::vector<Label> local(std::size_t(r.w) * std::size_t(r.h));
    for (int y = 0; y < r.h; ++y) {
      for (int x = 0; x < r.w; ++x) {
        local[pixel_index(x, y, r.w)] = Label(local_of[gt.at(r.x0 + x, r.y0 + y)]);
      }
    }
    if (noise.label_flip_prob > 0.0) {
      for (auto& l : local) {
        if (rng.next_unit() < noise.label_flip_prob) {
          const int other = int(rng.next_below(std::uint64_t(n_patch_labels - 1)));
          l = Label(other >= int(l) ? other + 1 : other);
        }
      }
    }

    ProbTensor probs(r.w, r.h, n_patch_labels);
    for (std::size_t p = 0; p < local.size(); ++p) {
      probs.pixel(p)[local[p]] = 1.0f;
    }
    box_blur(probs, noise.blur_radius);
    soften(probs, noise.temperature);
    PatchPrediction pred;
    pred.spec = specs[z];
    pred.probs = pool_down(probs, downsample);
    preds.push_back(std::move(pred));
  }
  return preds;
}

}  // namespace patchfuse
