#include "patchfuse/energy.hpp"

#include <algorithm>
#include <unordered_set>

#include "patchfuse/parallel.hpp"
#include "patchfuse/rng.hpp"

namespace patchfuse {

double e_cnn(const EnergyModel& m, std::size_t p, int y) {
  int satisfied = 0;
  for (std::uint32_t i = m.floor_offset[p]; i < m.floor_offset[p + 1]; ++i) {
    if (y >= int(m.floor_label[i])) ++satisfied;
  }
  return -m.weights.lambda_cnn * double(satisfied);
}

double e_cco(const EnergyModel& m, std::size_t p, int y) {
  const int o = int(m.order[p]);
  if (o == 0) return 0.0;
  return y >= o ? -m.weights.lambda_cco : 0.0;
}

std::vector<LongEdge> sample_long_edges(const ComponentSet& cs, int k, std::uint64_t seed) {
  std::vector<LongEdge> edges;
  const Rng base(seed);
  std::uint64_t pair_stream = 0;
  for (std::size_t i = 0; i < cs.components.size(); ++i) {
    for (std::size_t j = i + 1; j < cs.components.size(); ++j, ++pair_stream) {
      const Component& a = cs.components[i];
      const Component& b = cs.components[j];
      // equal (clamped) orders leave the depth condition unsatisfiable, so
      // every sampled connection would contribute exactly zero; skip the pair
      if (a.order == b.order) continue;
      const std::uint64_t total = std::uint64_t(a.pixels.size()) * b.pixels.size();
      const std::uint64_t want = std::min<std::uint64_t>(std::uint64_t(std::max(k, 0)), total);
      if (want == 0) continue;
      Rng rng = base.child(pair_stream);

      const Component& near = a.order < b.order ? a : b;
      const Component& far = a.order < b.order ? b : a;
      const double w = 1.0 / double(want);

      auto emit = [&](std::uint64_t flat) {
        const std::int32_t pa = a.pixels[std::size_t(flat / b.pixels.size())];
        const std::int32_t pb = b.pixels[std::size_t(flat % b.pixels.size())];
        const std::int32_t pn = (&near == &a) ? pa : pb;
        const std::int32_t pf = (&near == &a) ? pb : pa;
        edges.push_back({pn, pf, std::uint16_t(near.order), std::uint16_t(far.order), w});
      };

      if (want == total) {
        for (std::uint64_t f = 0; f < total; ++f) emit(f);
      } else {
        // Floyd's algorithm: exactly `want` distinct flat indices
        std::unordered_set<std::uint64_t> chosen;
        chosen.reserve(std::size_t(want) * 2);
        for (std::uint64_t t = total - want; t < total; ++t) {
          const std::uint64_t r = rng.next_below(t + 1);
          if (!chosen.insert(r).second) chosen.insert(t);
        }
        std::vector<std::uint64_t> flats(chosen.begin(), chosen.end());
        std::sort(flats.begin(), flats.end());
        for (const std::uint64_t f : flats) emit(f);
      }
    }
  }
  return edges;
}

EnergyModel build_energy_model(const MergedMap& merged, const ComponentSet& cs,
                               const EnergyWeights& weights, int long_edge_samples,
                               std::uint64_t seed, int n_max) {
  EnergyModel m;
  m.width = merged.label_map.width();
  m.height = merged.label_map.height();
  m.n_max = n_max;
  m.weights = weights;
  m.floor_offset = merged.floor_offset;
  m.floor_label.resize(merged.floors.size());
  for (std::size_t i = 0; i < merged.floors.size(); ++i) {
    m.floor_label[i] = merged.floors[i].second;
  }

  const std::size_t n_px = m.n_pixels();
  m.order.assign(n_px, 0);
  m.comp_of.assign(n_px, -1);
  for (std::size_t p = 0; p < n_px; ++p) {
    const std::int32_t c = cs.pixel_to_component[p];
    m.comp_of[p] = c;
    if (c >= 0) m.order[p] = std::uint16_t(cs.components[std::size_t(c)].order);
  }

  m.long_edges = sample_long_edges(cs, long_edge_samples, seed);
  for (LongEdge& e : m.long_edges) e.weight *= weights.lambda_long;

  m.agree_right.assign(n_px, 0);
  m.agree_down.assign(n_px, 0);
  const LabelMap& lm = merged.label_map;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      const std::size_t p = pixel_index(x, y, m.width);
      if (x + 1 < m.width) m.agree_right[p] = lm[p] == lm[p + 1] ? 1 : 0;
      if (y + 1 < m.height) m.agree_down[p] = lm[p] == lm[p + std::size_t(m.width)] ? 1 : 0;
    }
  }
  return m;
}

double total_energy(const LabelMap& lm, const EnergyModel& m) {
  if (lm.width() != m.width || lm.height() != m.height) {
    throw DimensionError("total_energy: label map does not match the model");
  }
  const std::size_t n_px = m.n_pixels();
  constexpr std::size_t kChunk = 16384;

  const double unary = chunked_sum(n_px, kChunk, [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t p = begin; p < end; ++p) {
      const int y = int(lm[p]);
      s += e_cnn(m, p, y) + e_cco(m, p, y);
    }
    return s;
  });

  const double longr =
      chunked_sum(m.long_edges.size(), kChunk, [&](std::size_t begin, std::size_t end) {
        double s = 0.0;
        for (std::size_t i = begin; i < end; ++i) {
          const LongEdge& e = m.long_edges[i];
          s += e_long(int(lm[std::size_t(e.near_px)]), int(lm[std::size_t(e.far_px)]),
                      int(e.near_order), int(e.far_order), e.weight);
        }
        return s;
      });

  const int w = m.width;
  const double shortr = chunked_sum(n_px, kChunk, [&](std::size_t begin, std::size_t end) {
    double s = 0.0;
    for (std::size_t p = begin; p < end; ++p) {
      const int x = int(p % std::size_t(w));
      if (x + 1 < w) {
        s += e_short(int(lm[p]), int(lm[p + 1]), m.agree_right[p] != 0, m.weights.lambda_short);
      }
      if (p + std::size_t(w) < n_px) {
        s += e_short(int(lm[p]), int(lm[p + std::size_t(w)]), m.agree_down[p] != 0,
                     m.weights.lambda_short);
      }
    }
    return s;
  });

  return unary + longr + shortr;
}

}  // namespace patchfuse
