#include "patchfuse/merging.hpp"

#include <algorithm>

#include "patchfuse/components.hpp"
#include "patchfuse/parallel.hpp"

namespace patchfuse {

ProbTensor component_average(const ProbTensor& probs, const LabelMap& argmax) {
  if (probs.width() != argmax.width() || probs.height() != argmax.height()) {
    throw DimensionError("component_average: tensor and argmax dims differ");
  }
  const ComponentSet cs = label_components(argmax);
  ProbTensor out = probs;
  const int L = probs.n_labels();
  std::vector<double> mean(std::size_t(L), 0.0);
  for (const Component& c : cs.components) {
    std::fill(mean.begin(), mean.end(), 0.0);
    for (const std::int32_t p : c.pixels) {
      const auto v = probs.pixel(std::size_t(p));
      for (int l = 0; l < L; ++l) mean[std::size_t(l)] += v[std::size_t(l)];
    }
    const double inv = 1.0 / double(c.pixels.size());
    for (int l = 0; l < L; ++l) mean[std::size_t(l)] *= inv;
    for (const std::int32_t p : c.pixels) {
      auto v = out.pixel(std::size_t(p));
      for (int l = 0; l < L; ++l) v[std::size_t(l)] = float(mean[std::size_t(l)]);
    }
  }
  return out;
}

void prepare_prediction(PatchPrediction& pred) {
  if (pred.prepared()) return;
  const Rect r = pred.spec.rect;
  if (pred.probs.width() > r.w || pred.probs.height() > r.h) {
    throw DimensionError("patch tensor larger than its footprint");
  }
  ProbTensor up = upsample_bilinear(pred.probs, r.w, r.h);
  pred.argmax = argmax_map(up);
  pred.averaged = component_average(up, pred.argmax);
}

MergedMap merge_patches(std::vector<PatchPrediction>& preds, int image_w, int image_h) {
  if (preds.size() > 0xFFFF) throw DimensionError("more than 65535 patches");
  for (auto& pred : preds) {
    if (!pred.spec.rect.inside_image(image_w, image_h)) {
      throw DimensionError("patch footprint outside the image");
    }
  }
  parallel_chunks(preds.size(), 1, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) prepare_prediction(preds[i]);
  });

  const std::size_t n_px = std::size_t(image_w) * std::size_t(image_h);
  MergedMap merged;
  merged.label_map = LabelMap(image_w, image_h);
  merged.floor_offset.assign(n_px + 1, 0);

  // counting pass for the CSR floor lists
  for (const auto& pred : preds) {
    const Rect r = pred.spec.rect;
    for (int y = r.y0; y < r.y1(); ++y) {
      for (int x = r.x0; x < r.x1(); ++x) {
        ++merged.floor_offset[pixel_index(x, y, image_w) + 1];
      }
    }
  }
  for (std::size_t p = 0; p < n_px; ++p) merged.floor_offset[p + 1] += merged.floor_offset[p];
  merged.floors.resize(merged.floor_offset[n_px]);

  std::vector<std::uint32_t> cursor(merged.floor_offset.begin(), merged.floor_offset.end() - 1);
  std::vector<float> best_prob(n_px, -1.0f);
  std::vector<Label> best_label(n_px, 0);
  std::vector<std::uint16_t> best_patch(n_px, 0);

  for (std::size_t zi = 0; zi < preds.size(); ++zi) {
    const auto& pred = preds[zi];
    const Rect r = pred.spec.rect;
    const int L = pred.averaged.n_labels();
    for (int y = r.y0; y < r.y1(); ++y) {
      for (int x = r.x0; x < r.x1(); ++x) {
        const std::size_t p = pixel_index(x, y, image_w);
        const std::size_t lp = pixel_index(x - r.x0, y - r.y0, r.w);
        merged.floors[cursor[p]++] = {std::uint16_t(zi), pred.argmax[lp]};
        const auto v = pred.averaged.pixel(lp);
        for (int l = 0; l < L; ++l) {
          const float prob = v[std::size_t(l)];
          const bool better =
              prob > best_prob[p] ||
              (prob == best_prob[p] &&
               (l < int(best_label[p]) ||
                (l == int(best_label[p]) && std::uint16_t(zi) < best_patch[p])));
          if (better) {
            best_prob[p] = prob;
            best_label[p] = Label(l);
            best_patch[p] = std::uint16_t(zi);
          }
        }
      }
    }
  }

  for (std::size_t p = 0; p < n_px; ++p) {
    merged.label_map[p] = best_prob[p] >= 0.0f ? best_label[p] : Label(0);
  }
  return merged;
}

}  // namespace patchfuse
