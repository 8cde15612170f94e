#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "patchfuse/error.hpp"

namespace patchfuse {

struct PairwiseTerm {
  int u = 0;
  int v = 0;
  double e00 = 0, e01 = 0, e10 = 0, e11 = 0;
};

// Energy over binary variables: sum of unary terms plus arbitrary (possibly
// non-submodular) pairwise terms.
struct BinaryEnergy {
  int n_vars = 0;
  std::vector<std::array<double, 2>> unary;  // (theta_0, theta_1) per variable
  std::vector<PairwiseTerm> pairwise;

  explicit BinaryEnergy(int n = 0) : n_vars(n), unary(std::size_t(n), {0.0, 0.0}) {}

  void add_unary(int var, double theta0, double theta1);
  void add_pairwise(int u, int v, double e00, double e01, double e10, double e11);
};

enum class BinaryLabel : std::uint8_t { zero = 0, one = 1, unlabeled = 2 };

using PartialLabeling = std::vector<BinaryLabel>;

struct QpboResult {
  PartialLabeling labels;
  double lower_bound = 0.0;  // roof-duality bound on the minimum energy
  int n_labeled = 0;
};

// Roof duality: reparameterize each term over a doubled network (one node per
// literal and one per its negation), solve one max-flow, and read labels off
// the source-reachability min cut. A variable is labeled only when its two
// nodes land on opposite sides; fixing labeled variables to the returned
// values and minimizing over the rest still attains a global minimum.
QpboResult solve_qpbo(const BinaryEnergy& e);

double energy_of(const BinaryEnergy& e, const std::vector<std::uint8_t>& assignment);

}  // namespace patchfuse
