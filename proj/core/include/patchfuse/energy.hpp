#pragma once

#include <cstdint>
#include <vector>

#include "patchfuse/components.hpp"
#include "patchfuse/grid.hpp"
#include "patchfuse/merging.hpp"

namespace patchfuse {

struct EnergyWeights {
  double lambda_cnn = 1.0;
  double lambda_cco = 1.0;
  // Per component pair, the sampled connections share lambda_long between
  // them, so a pair contributes at most lambda_long in magnitude no matter
  // how many edges were drawn.
  double lambda_long = 1.0;
  double lambda_short = 0.5;
};

// One sampled cross-component connection, stored nearer-first so the depth
// condition is structural.
struct LongEdge {
  std::int32_t near_px = 0;
  std::int32_t far_px = 0;
  std::uint16_t near_order = 0;
  std::uint16_t far_order = 0;
  double weight = 0.0;
};

// Everything the labeling energy needs, fixed once per image: per-pixel patch
// floors, component orders, sampled long-range connections, and the
// short-range agreement pattern of the merged map.
struct EnergyModel {
  int width = 0;
  int height = 0;
  int n_max = kDefaultNMax;
  EnergyWeights weights;

  std::vector<std::uint32_t> floor_offset;  // CSR over pixels
  std::vector<Label> floor_label;
  std::vector<std::uint16_t> order;         // O(p); 0 = background
  std::vector<std::int32_t> comp_of;        // -1 = background
  std::vector<LongEdge> long_edges;
  std::vector<std::uint8_t> agree_right;    // p vs p+1, last column unused
  std::vector<std::uint8_t> agree_down;     // p vs p+width, last row unused

  std::size_t n_pixels() const { return std::size_t(width) * std::size_t(height); }
};

// Unary terms. e_cnn sums -lambda_cnn over the covering patches whose floor
// is satisfied; e_cco pays -lambda_cco when the label reaches the component
// order, and 0 on background pixels.
double e_cnn(const EnergyModel& m, std::size_t p, int y);
double e_cco(const EnergyModel& m, std::size_t p, int y);

// Pairwise terms as plain functions of the endpoint labels.
inline double e_long(int y_near, int y_far, int o_near, int o_far, double weight) {
  return (y_far > y_near && y_near != 0 && o_far > o_near) ? -weight : 0.0;
}
inline double e_short(int y_p, int y_q, bool agree, double lambda_short) {
  if (agree) return y_p != y_q ? lambda_short : 0.0;
  return y_p == y_q ? lambda_short : 0.0;
}

// Uniformly samples up to k distinct pixel pairs per unordered component
// pair, without replacement, deterministically per seed. Edge weights are
// normalized to 1/(edges in the pair).
std::vector<LongEdge> sample_long_edges(const ComponentSet& cs, int k, std::uint64_t seed);

EnergyModel build_energy_model(const MergedMap& merged, const ComponentSet& cs,
                               const EnergyWeights& weights, int long_edge_samples,
                               std::uint64_t seed, int n_max = kDefaultNMax);

// Exact total over all pixels and edges; deterministic for any thread count.
double total_energy(const LabelMap& m, const EnergyModel& model);

}  // namespace patchfuse
