#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "patchfuse/energy.hpp"
#include "patchfuse/grid.hpp"
#include "patchfuse/qpbo.hpp"

namespace patchfuse {

struct SwapSchedule {
  std::vector<std::pair<Label, Label>> label_pairs;  // alpha < beta
  int max_sweeps = 5;

  // Every pair 0 <= alpha < beta <= n_max, lexicographic.
  static SwapSchedule all_pairs(int n_max, int max_sweeps = 5);
};

// Binary subproblem of one alpha-beta move: bit 0 = alpha, bit 1 = beta.
// frozen_constant carries all terms that touch no participating pixel, so
// energy_of(energy, b) + frozen_constant equals the full map energy.
struct SwapProblem {
  BinaryEnergy energy{0};
  std::vector<std::int32_t> pixels;  // variable index -> pixel
  double frozen_constant = 0.0;
};

SwapProblem build_swap_energy(const LabelMap& current, Label alpha, Label beta,
                              const EnergyModel& model);

// Labeled variables move to alpha/beta; unlabeled ones keep their current
// label, as do non-participating pixels.
LabelMap apply_move(const LabelMap& current, Label alpha, Label beta,
                    const PartialLabeling& labeling,
                    const std::vector<std::int32_t>& pixels);

// Component-order initialization: every pixel starts at its component's
// depth rank, background at 0.
LabelMap order_initialization(const ComponentSet& cs);

struct MinimizeResult {
  LabelMap labels;
  std::vector<double> trace;  // energy after each accepted move
  double initial_energy = 0.0;
  double final_energy = 0.0;
  int sweeps_run = 0;
  int moves_accepted = 0;
};

// Sweeps the schedule, solving each move with QPBO and accepting it only when
// the full energy drops by more than accept_eps. Stops after a sweep with no
// accepted move.
MinimizeResult minimize(const LabelMap& init, const EnergyModel& model,
                        const SwapSchedule& sched, double accept_eps = 1e-12);

}  // namespace patchfuse
