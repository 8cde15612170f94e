#include "patchfuse/pipeline.hpp"

#include "patchfuse/postprocess.hpp"

namespace patchfuse {

FuseParams fuse_params_from(const RunConfig& cfg, bool run_postprocess) {
  FuseParams p;
  p.weights = cfg.energy.weights;
  p.long_edge_samples = cfg.energy.long_edge_samples;
  p.energy_seed = cfg.energy.seed;
  p.n_max = cfg.energy.n_max;
  p.max_sweeps = cfg.inference.max_sweeps;
  p.epsilon = cfg.inference.epsilon;
  p.run_postprocess = run_postprocess;
  p.min_size = cfg.postprocess.min_size;
  return p;
}

FuseResult fuse(std::vector<PatchPrediction>& preds, int image_w, int image_h,
                const FuseParams& params) {
  FuseResult res;

  const MergedMap merged = merge_patches(preds, image_w, image_h);
  res.merged = merged.label_map;

  const ComponentSet cs = order_components(label_components(merged.label_map), params.n_max);
  res.n_components = int(cs.components.size());

  const EnergyModel model = build_energy_model(merged, cs, params.weights,
                                               params.long_edge_samples, params.energy_seed,
                                               params.n_max);
  res.n_long_edges = model.long_edges.size();

  res.init = order_initialization(cs);
  res.opt = minimize(res.init, model, SwapSchedule::all_pairs(params.n_max, params.max_sweeps),
                     params.epsilon);

  if (params.run_postprocess) {
    res.pred = postprocess(res.opt.labels, params.min_size, params.n_max);
    res.postprocessed = true;
  } else {
    res.pred = res.opt.labels;
  }
  return res;
}

}  // namespace patchfuse
