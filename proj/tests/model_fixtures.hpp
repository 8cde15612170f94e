#pragma once

// Random pipeline states for property tests, built through the public API so
// floors/orders/edges always have realistic structure.

#include "patchfuse/components.hpp"
#include "patchfuse/energy.hpp"
#include "patchfuse/merging.hpp"
#include "patchfuse/rng.hpp"

namespace fixtures {

inline patchfuse::PatchPrediction random_patch(patchfuse::Rect r, int n_labels,
                                               patchfuse::Rng& rng) {
  patchfuse::ProbTensor t(r.w, r.h, n_labels);
  for (std::size_t p = 0; p < t.n_pixels(); ++p) {
    auto v = t.pixel(p);
    const int lead = rng.next_int(0, n_labels - 1);
    double sum = 0.0;
    for (int l = 0; l < n_labels; ++l) {
      v[std::size_t(l)] = float(rng.next_unit() * 0.5 + (l == lead ? 1.0 : 0.0));
      sum += v[std::size_t(l)];
    }
    for (int l = 0; l < n_labels; ++l) v[std::size_t(l)] = float(v[std::size_t(l)] / sum);
  }
  patchfuse::PatchPrediction pred;
  pred.spec.rect = r;
  pred.probs = std::move(t);
  return pred;
}

struct ModelFixture {
  patchfuse::MergedMap merged;
  patchfuse::ComponentSet components;
  patchfuse::EnergyModel model;
};

inline ModelFixture random_model(int w, int h, int n_max, patchfuse::Rng& rng,
                                 int long_edge_samples = 50) {
  std::vector<patchfuse::PatchPrediction> preds;
  const int n_patches = rng.next_int(1, 3);
  preds.push_back(random_patch({0, 0, w, h}, n_max + 1, rng));  // full coverage
  for (int i = 1; i < n_patches; ++i) {
    const int pw = rng.next_int(1, w), ph = rng.next_int(1, h);
    const int x0 = rng.next_int(0, w - pw), y0 = rng.next_int(0, h - ph);
    preds.push_back(random_patch({x0, y0, pw, ph}, n_max + 1, rng));
  }

  ModelFixture f;
  f.merged = patchfuse::merge_patches(preds, w, h);
  f.components =
      patchfuse::order_components(patchfuse::label_components(f.merged.label_map), n_max);
  patchfuse::EnergyWeights weights;
  weights.lambda_cnn = rng.next_range(0.2, 1.5);
  weights.lambda_cco = rng.next_range(0.2, 1.5);
  weights.lambda_long = rng.next_range(0.2, 1.5);
  weights.lambda_short = rng.next_range(0.1, 0.8);
  f.model = patchfuse::build_energy_model(f.merged, f.components, weights, long_edge_samples,
                                          rng.next_u64(), n_max);
  return f;
}

}  // namespace fixtures
