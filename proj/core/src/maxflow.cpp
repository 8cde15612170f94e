#include "patchfuse/maxflow.hpp"

#include <algorithm>
#include <climits>
#include <string>

namespace patchfuse {

long long g_bk_augments = 0, g_bk_orphans = 0, g_bk_grow_visits = 0, g_bk_origin_steps = 0;

FlowGraph::FlowGraph(int n_nodes) {
  if (n_nodes < 0) throw BadIndex("negative node count");
  cap_src_.assign(std::size_t(n_nodes), 0.0);
  cap_snk_.assign(std::size_t(n_nodes), 0.0);
  first_.assign(std::size_t(n_nodes), kNone);
}

void FlowGraph::check_node(int node) const {
  if (node < 0 || node >= n_nodes()) {
    throw BadIndex("node " + std::to_string(node) + " out of range [0, " +
                   std::to_string(n_nodes()) + ")");
  }
}

void FlowGraph::add_terminal(int node, double cap_source, double cap_sink) {
  if (solved_) throw Error("FlowGraph::add_terminal after solve");
  check_node(node);
  if (cap_source < 0.0 || cap_sink < 0.0) throw NegativeCapacity("terminal capacity < 0");
  cap_src_[std::size_t(node)] += cap_source;
  cap_snk_[std::size_t(node)] += cap_sink;
}

void FlowGraph::add_arc(int u, int v, double cap_uv, double cap_vu) {
  if (solved_) throw Error("FlowGraph::add_arc after solve");
  check_node(u);
  check_node(v);
  if (cap_uv < 0.0 || cap_vu < 0.0) throw NegativeCapacity("arc capacity < 0");
  const int a = int(arcs_.size());
  arcs_.push_back({v, first_[std::size_t(u)], cap_uv});
  first_[std::size_t(u)] = a;
  arcs_.push_back({u, first_[std::size_t(v)], cap_vu});
  first_[std::size_t(v)] = a + 1;
}

int FlowGraph::parent_node(int v) const {
  const int pa = parent_[std::size_t(v)];
  // source tree stores the arc parent->v, sink tree the arc v->parent
  if (tree_[std::size_t(v)] == kSource) return arcs_[std::size_t(pa ^ 1)].head;
  return arcs_[std::size_t(pa)].head;
}

void FlowGraph::activate(int v) {
  if (!in_active_[std::size_t(v)]) {
    in_active_[std::size_t(v)] = 1;
    active_.push_back(v);
  }
}

int FlowGraph::pop_active() {
  while (active_head_ < active_.size()) {
    const int v = active_[active_head_++];
    in_active_[std::size_t(v)] = 0;
    if (active_head_ == active_.size()) {
      active_.clear();
      active_head_ = 0;
    }
    if (tree_[std::size_t(v)] != kFree) return v;
  }
  active_.clear();
  active_head_ = 0;
  return kNone;
}

double FlowGraph::solve() {
  if (solved_) return flow_;
  const int n = n_nodes();
  tr_.resize(std::size_t(n));
  parent_.assign(std::size_t(n), kNone);
  tree_.assign(std::size_t(n), kFree);
  in_active_.assign(std::size_t(n), 0);
  ts_.assign(std::size_t(n), 0);
  dist_.assign(std::size_t(n), 0);
  active_.clear();
  active_head_ = 0;
  orphans_.clear();
  time_ = 0;
  flow_ = 0.0;

  for (int i = 0; i < n; ++i) {
    flow_ += std::min(cap_src_[std::size_t(i)], cap_snk_[std::size_t(i)]);
    tr_[std::size_t(i)] = cap_src_[std::size_t(i)] - cap_snk_[std::size_t(i)];
    if (tr_[std::size_t(i)] > kEps) {
      tree_[std::size_t(i)] = kSource;
      parent_[std::size_t(i)] = kTerminal;
      dist_[std::size_t(i)] = 1;
      activate(i);
    } else if (tr_[std::size_t(i)] < -kEps) {
      tree_[std::size_t(i)] = kSink;
      parent_[std::size_t(i)] = kTerminal;
      dist_[std::size_t(i)] = 1;
      activate(i);
    }
  }

  for (int u = pop_active(); u != kNone; u = pop_active()) {
    for (int a = first_[std::size_t(u)]; a != kNone; a = arcs_[std::size_t(a)].next) {
      ++g_bk_grow_visits;
      bool recheck = true;
      while (recheck && tree_[std::size_t(u)] != kFree) {
        recheck = false;
        if (tree_[std::size_t(u)] == kSource) {
          if (arcs_[std::size_t(a)].r <= kEps) break;
          const int v = arcs_[std::size_t(a)].head;
          if (tree_[std::size_t(v)] == kFree) {
            tree_[std::size_t(v)] = kSource;
            parent_[std::size_t(v)] = a;
            dist_[std::size_t(v)] = dist_[std::size_t(u)] + 1;
            ts_[std::size_t(v)] = ts_[std::size_t(u)];
            activate(v);
          } else if (tree_[std::size_t(v)] == kSink) {
            ++time_;
            augment(a);
            for (std::size_t oi = 0; oi < orphans_.size(); ++oi) process_orphan(orphans_[oi]);
            orphans_.clear();
            recheck = true;  // the same arc may connect the trees again
          }
        } else {  // sink tree: growth and connections use the reverse arc
          if (arcs_[std::size_t(sister(a))].r <= kEps) break;
          const int v = arcs_[std::size_t(a)].head;
          if (tree_[std::size_t(v)] == kFree) {
            tree_[std::size_t(v)] = kSink;
            parent_[std::size_t(v)] = sister(a);
            dist_[std::size_t(v)] = dist_[std::size_t(u)] + 1;
            ts_[std::size_t(v)] = ts_[std::size_t(u)];
            activate(v);
          } else if (tree_[std::size_t(v)] == kSource) {
            ++time_;
            augment(sister(a));
            for (std::size_t oi = 0; oi < orphans_.size(); ++oi) process_orphan(orphans_[oi]);
            orphans_.clear();
            recheck = true;
          }
        }
      }
      if (tree_[std::size_t(u)] == kFree) break;
    }
  }

  compute_reachability();
  solved_ = true;
  return flow_;
}

void FlowGraph::augment(int connector) {
  ++g_bk_augments;
  const int p = arcs_[std::size_t(sister(connector))].head;
  const int q = arcs_[std::size_t(connector)].head;

  double bn = arcs_[std::size_t(connector)].r;
  int x = p;
  while (parent_[std::size_t(x)] != kTerminal) {
    const int pa = parent_[std::size_t(x)];
    bn = std::min(bn, arcs_[std::size_t(pa)].r);
    x = arcs_[std::size_t(sister(pa))].head;
  }
  bn = std::min(bn, tr_[std::size_t(x)]);
  int y = q;
  while (parent_[std::size_t(y)] != kTerminal) {
    const int pa = parent_[std::size_t(y)];
    bn = std::min(bn, arcs_[std::size_t(pa)].r);
    y = arcs_[std::size_t(pa)].head;
  }
  bn = std::min(bn, -tr_[std::size_t(y)]);

  arcs_[std::size_t(connector)].r -= bn;
  arcs_[std::size_t(sister(connector))].r += bn;

  x = p;
  while (parent_[std::size_t(x)] != kTerminal) {
    const int pa = parent_[std::size_t(x)];
    arcs_[std::size_t(pa)].r -= bn;
    arcs_[std::size_t(sister(pa))].r += bn;
    const int par = arcs_[std::size_t(sister(pa))].head;
    if (arcs_[std::size_t(pa)].r <= kEps) {
      parent_[std::size_t(x)] = kOrphan;
      orphans_.push_back(x);
    }
    x = par;
  }
  tr_[std::size_t(x)] -= bn;
  if (tr_[std::size_t(x)] <= kEps) {
    parent_[std::size_t(x)] = kOrphan;
    orphans_.push_back(x);
  }

  y = q;
  while (parent_[std::size_t(y)] != kTerminal) {
    const int pa = parent_[std::size_t(y)];
    arcs_[std::size_t(pa)].r -= bn;
    arcs_[std::size_t(sister(pa))].r += bn;
    const int par = arcs_[std::size_t(pa)].head;
    if (arcs_[std::size_t(pa)].r <= kEps) {
      parent_[std::size_t(y)] = kOrphan;
      orphans_.push_back(y);
    }
    y = par;
  }
  tr_[std::size_t(y)] += bn;
  if (tr_[std::size_t(y)] >= -kEps) {
    parent_[std::size_t(y)] = kOrphan;
    orphans_.push_back(y);
  }

  flow_ += bn;
}

int FlowGraph::origin_distance(int v) {
  int x = v;
  int steps = 0;
  int base = -1;
  while (true) {
    if (ts_[std::size_t(x)] == time_) {
      base = dist_[std::size_t(x)];
      break;
    }
    const int pa = parent_[std::size_t(x)];
    if (pa == kTerminal) {
      base = 1;
      break;
    }
    if (pa == kNone || pa == kOrphan) return -1;
    x = parent_node(x);
    ++steps;
    ++g_bk_origin_steps;
  }
  // stamp the walked chain so later checks this round are O(1)
  int d = base + steps;
  int y = v;
  while (y != x) {
    ts_[std::size_t(y)] = time_;
    dist_[std::size_t(y)] = d;
    --d;
    y = parent_node(y);
  }
  ts_[std::size_t(x)] = time_;
  dist_[std::size_t(x)] = base;
  return base + steps;
}

void FlowGraph::process_orphan(int u) {
  ++g_bk_orphans;
  const std::uint8_t t = tree_[std::size_t(u)];
  int best_arc = kNone;
  int best_d = INT_MAX;
  for (int a = first_[std::size_t(u)]; a != kNone; a = arcs_[std::size_t(a)].next) {
    const double cap = (t == kSource) ? arcs_[std::size_t(sister(a))].r : arcs_[std::size_t(a)].r;
    if (cap <= kEps) continue;
    const int v = arcs_[std::size_t(a)].head;
    if (tree_[std::size_t(v)] != t) continue;
    const int d = origin_distance(v);
    if (d < 0) continue;
    if (d + 1 < best_d) {
      best_d = d + 1;
      best_arc = a;
    }
  }
  if (best_arc != kNone) {
    parent_[std::size_t(u)] = (t == kSource) ? sister(best_arc) : best_arc;
    dist_[std::size_t(u)] = best_d;
    ts_[std::size_t(u)] = time_;
    return;
  }
  // no usable parent: free the node, orphan its children, wake neighbors that
  // could have adopted it
  for (int a = first_[std::size_t(u)]; a != kNone; a = arcs_[std::size_t(a)].next) {
    const int v = arcs_[std::size_t(a)].head;
    if (tree_[std::size_t(v)] != t) continue;
    const double cap = (t == kSource) ? arcs_[std::size_t(sister(a))].r : arcs_[std::size_t(a)].r;
    if (cap > kEps) activate(v);
    if (parent_[std::size_t(v)] >= 0 && parent_node(v) == u) {
      parent_[std::size_t(v)] = kOrphan;
      orphans_.push_back(v);
    }
  }
  tree_[std::size_t(u)] = kFree;
  parent_[std::size_t(u)] = kNone;
}

void FlowGraph::compute_reachability() {
  const int n = n_nodes();
  reach_src_.assign(std::size_t(n), 0);
  reach_snk_.assign(std::size_t(n), 0);
  std::vector<int> stack;

  for (int i = 0; i < n; ++i) {
    if (tr_[std::size_t(i)] > kEps) {
      reach_src_[std::size_t(i)] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int a = first_[std::size_t(u)]; a != kNone; a = arcs_[std::size_t(a)].next) {
      if (arcs_[std::size_t(a)].r <= kEps) continue;
      const int v = arcs_[std::size_t(a)].head;
      if (!reach_src_[std::size_t(v)]) {
        reach_src_[std::size_t(v)] = 1;
        stack.push_back(v);
      }
    }
  }

  for (int i = 0; i < n; ++i) {
    if (tr_[std::size_t(i)] < -kEps) {
      reach_snk_[std::size_t(i)] = 1;
      stack.push_back(i);
    }
  }
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int a = first_[std::size_t(v)]; a != kNone; a = arcs_[std::size_t(a)].next) {
      // w reaches the sink through v when the arc w->v still has residual
      if (arcs_[std::size_t(sister(a))].r <= kEps) continue;
      const int w = arcs_[std::size_t(a)].head;
      if (!reach_snk_[std::size_t(w)]) {
        reach_snk_[std::size_t(w)] = 1;
        stack.push_back(w);
      }
    }
  }
}

FlowGraph::Side FlowGraph::side(int node) const {
  check_node(node);
  if (!solved_) throw Error("FlowGraph::side before solve");
  return reach_src_[std::size_t(node)] ? Side::source : Side::sink;
}

bool FlowGraph::reachable_from_source(int node) const {
  check_node(node);
  if (!solved_) throw Error("FlowGraph::reachable_from_source before solve");
  return reach_src_[std::size_t(node)] != 0;
}

bool FlowGraph::reaches_sink(int node) const {
  check_node(node);
  if (!solved_) throw Error("FlowGraph::reaches_sink before solve");
  return reach_snk_[std::size_t(node)] != 0;
}

}  // namespace patchfuse
