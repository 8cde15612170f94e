#pragma once

#include <cstdint>
#include <vector>

#include "patchfuse/error.hpp"

namespace patchfuse {

// s-t max-flow / min-cut on a sparse graph with real capacities.
// Boykov-Kolmogorov style augmenting search with search-tree reuse, which is
// what works well on the grid-shaped graphs the swap inference produces.
//
// Usage is one-shot: add terminals/arcs, call solve() once, then query sides.
class FlowGraph {
 public:
  enum class Side : std::uint8_t { source, sink };

  explicit FlowGraph(int n_nodes);

  // Capacities accumulate over repeated calls for the same endpoints.
  void add_terminal(int node, double cap_source, double cap_sink);
  void add_arc(int u, int v, double cap_uv, double cap_vu);

  // Returns the max-flow value (= min-cut capacity).
  double solve();

  // Minimum cut with the convention that exactly the nodes reachable from the
  // source in the residual graph are source-side.
  Side side(int node) const;
  bool reachable_from_source(int node) const;
  bool reaches_sink(int node) const;

  int n_nodes() const { return int(cap_src_.size()); }
  double flow_value() const { return flow_; }

 private:
  struct Arc {
    int head;     // target node
    int next;     // next arc out of the tail node, -1 terminates
    double r;     // residual capacity
  };

  static constexpr int kNone = -1;      // no parent (free node)
  static constexpr int kTerminal = -2;  // parent is s or t
  static constexpr int kOrphan = -3;    // temporarily detached during adoption
  static constexpr double kEps = 1e-12;

  enum : std::uint8_t { kFree = 0, kSource = 1, kSink = 2 };

  int sister(int a) const { return a ^ 1; }
  int parent_node(int v) const;
  void activate(int v);
  int pop_active();
  void augment(int connector);
  void process_orphan(int u);
  int origin_distance(int v);
  void compute_reachability();

  void check_node(int node) const;

  // build state
  std::vector<double> cap_src_, cap_snk_;
  std::vector<int> first_;
  std::vector<Arc> arcs_;
  bool solved_ = false;
  double flow_ = 0.0;

  // solver state
  std::vector<double> tr_;  // terminal residual: >0 from source, <0 toward sink
  std::vector<int> parent_;
  std::vector<std::uint8_t> tree_;
  std::vector<std::uint8_t> in_active_;
  std::vector<int> active_;
  std::size_t active_head_ = 0;
  std::vector<int> orphans_;
  std::vector<std::uint32_t> ts_;
  std::vector<int> dist_;
  std::uint32_t time_ = 0;

  std::vector<std::uint8_t> reach_src_, reach_snk_;
};

}  // namespace patchfuse
