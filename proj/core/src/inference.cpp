#include "patchfuse/inference.hpp"

#include <algorithm>

namespace patchfuse {

SwapSchedule SwapSchedule::all_pairs(int n_max, int max_sweeps) {
  SwapSchedule s;
  s.max_sweeps = max_sweeps;
  for (int a = 0; a <= n_max; ++a) {
    for (int b = a + 1; b <= n_max; ++b) {
      s.label_pairs.emplace_back(Label(a), Label(b));
    }
  }
  return s;
}

SwapProblem build_swap_energy(const LabelMap& current, Label alpha, Label beta,
                              const EnergyModel& model) {
  if (current.width() != model.width || current.height() != model.height) {
    throw DimensionError("build_swap_energy: label map does not match the model");
  }
  const std::size_t n_px = model.n_pixels();

  SwapProblem out;
  std::vector<std::int32_t> var_of(n_px, -1);
  for (std::size_t p = 0; p < n_px; ++p) {
    if (current[p] == alpha || current[p] == beta) {
      var_of[p] = std::int32_t(out.pixels.size());
      out.pixels.push_back(std::int32_t(p));
    }
  }
  out.energy = BinaryEnergy(int(out.pixels.size()));

  const int ya = int(alpha), yb = int(beta);

  for (std::size_t p = 0; p < n_px; ++p) {
    const std::int32_t v = var_of[p];
    if (v >= 0) {
      out.energy.add_unary(v, e_cnn(model, p, ya) + e_cco(model, p, ya),
                           e_cnn(model, p, yb) + e_cco(model, p, yb));
    } else {
      const int y = int(current[p]);
      out.frozen_constant += e_cnn(model, p, y) + e_cco(model, p, y);
    }
  }

  const double ls = model.weights.lambda_short;
  auto add_short = [&](std::size_t p, std::size_t q, bool agree) {
    const std::int32_t vp = var_of[p], vq = var_of[q];
    if (vp >= 0 && vq >= 0) {
      out.energy.add_pairwise(vp, vq, e_short(ya, ya, agree, ls), e_short(ya, yb, agree, ls),
                              e_short(yb, ya, agree, ls), e_short(yb, yb, agree, ls));
    } else if (vp >= 0) {
      const int yq = int(current[q]);
      out.energy.add_unary(vp, e_short(ya, yq, agree, ls), e_short(yb, yq, agree, ls));
    } else if (vq >= 0) {
      const int yp = int(current[p]);
      out.energy.add_unary(vq, e_short(yp, ya, agree, ls), e_short(yp, yb, agree, ls));
    } else {
      out.frozen_constant += e_short(int(current[p]), int(current[q]), agree, ls);
    }
  };
  const int w = model.width;
  for (std::size_t p = 0; p < n_px; ++p) {
    const int x = int(p % std::size_t(w));
    if (x + 1 < w) add_short(p, p + 1, model.agree_right[p] != 0);
    if (p + std::size_t(w) < n_px) add_short(p, p + std::size_t(w), model.agree_down[p] != 0);
  }

  for (const LongEdge& e : model.long_edges) {
    const std::size_t pn = std::size_t(e.near_px), pf = std::size_t(e.far_px);
    const std::int32_t vn = var_of[pn], vf = var_of[pf];
    const int on = int(e.near_order), of = int(e.far_order);
    if (vn >= 0 && vf >= 0) {
      out.energy.add_pairwise(vn, vf, e_long(ya, ya, on, of, e.weight),
                              e_long(ya, yb, on, of, e.weight),
                              e_long(yb, ya, on, of, e.weight),
                              e_long(yb, yb, on, of, e.weight));
    } else if (vn >= 0) {
      const int yf = int(current[pf]);
      out.energy.add_unary(vn, e_long(ya, yf, on, of, e.weight), e_long(yb, yf, on, of, e.weight));
    } else if (vf >= 0) {
      const int yn = int(current[pn]);
      out.energy.add_unary(vf, e_long(yn, ya, on, of, e.weight), e_long(yn, yb, on, of, e.weight));
    } else {
      out.frozen_constant +=
          e_long(int(current[pn]), int(current[pf]), on, of, e.weight);
    }
  }

  return out;
}

LabelMap apply_move(const LabelMap& current, Label alpha, Label beta,
                    const PartialLabeling& labeling, const std::vector<std::int32_t>& pixels) {
  if (labeling.size() != pixels.size()) {
    throw DimensionError("apply_move: labeling does not match the participating pixels");
  }
  LabelMap out = current;
  for (std::size_t v = 0; v < pixels.size(); ++v) {
    if (labeling[v] == BinaryLabel::zero) {
      out[std::size_t(pixels[v])] = alpha;
    } else if (labeling[v] == BinaryLabel::one) {
      out[std::size_t(pixels[v])] = beta;
    }
    // unlabeled pixels keep their current label
  }
  return out;
}

LabelMap order_initialization(const ComponentSet& cs) {
  LabelMap init(cs.width, cs.height);
  for (const Component& c : cs.components) {
    for (const std::int32_t p : c.pixels) init[std::size_t(p)] = Label(c.order);
  }
  return init;
}

MinimizeResult minimize(const LabelMap& init, const EnergyModel& model,
                        const SwapSchedule& sched, double accept_eps) {
  MinimizeResult res;
  res.labels = init;
  res.initial_energy = total_energy(init, model);
  double current_energy = res.initial_energy;

  for (int sweep = 0; sweep < sched.max_sweeps; ++sweep) {
    bool any_accepted = false;
    for (const auto& [alpha, beta] : sched.label_pairs) {
      SwapProblem prob = build_swap_energy(res.labels, alpha, beta, model);
      if (prob.pixels.empty()) continue;
      const QpboResult q = solve_qpbo(prob.energy);
      if (q.n_labeled == 0) continue;
      LabelMap proposal = apply_move(res.labels, alpha, beta, q.labels, prob.pixels);
      const double proposed_energy = total_energy(proposal, model);
      if (current_energy - proposed_energy > accept_eps) {
        res.labels = std::move(proposal);
        current_energy = proposed_energy;
        res.trace.push_back(proposed_energy);
        ++res.moves_accepted;
        any_accepted = true;
      }
    }
    ++res.sweeps_run;
    if (!any_accepted) break;
  }

  res.final_energy = current_energy;
  return res;
}

}  // namespace patchfuse
