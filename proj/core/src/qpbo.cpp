#include "patchfuse/qpbo.hpp"

#include <cmath>
#include <string>

#include "patchfuse/maxflow.hpp"

namespace patchfuse {

void BinaryEnergy::add_unary(int var, double theta0, double theta1) {
  if (var < 0 || var >= n_vars) throw BadIndex("unary variable out of range");
  unary[std::size_t(var)][0] += theta0;
  unary[std::size_t(var)][1] += theta1;
}

void BinaryEnergy::add_pairwise(int u, int v, double e00, double e01, double e10, double e11) {
  if (u < 0 || u >= n_vars || v < 0 || v >= n_vars) throw BadIndex("pairwise variable out of range");
  if (u == v) throw BadIndex("pairwise term needs two distinct variables");
  pairwise.push_back({u, v, e00, e01, e10, e11});
}

double energy_of(const BinaryEnergy& e, const std::vector<std::uint8_t>& assignment) {
  if (assignment.size() != std::size_t(e.n_vars)) {
    throw DimensionError("assignment length does not match n_vars");
  }
  double total = 0.0;
  for (int i = 0; i < e.n_vars; ++i) {
    total += e.unary[std::size_t(i)][assignment[std::size_t(i)] ? 1 : 0];
  }
  for (const PairwiseTerm& t : e.pairwise) {
    const bool bu = assignment[std::size_t(t.u)] != 0;
    const bool bv = assignment[std::size_t(t.v)] != 0;
    total += bu ? (bv ? t.e11 : t.e10) : (bv ? t.e01 : t.e00);
  }
  return total;
}

namespace {

// Cost c * [node on sink side] for c of either sign; returns the constant part.
double add_signed_unary(FlowGraph& g, int node, double c) {
  if (c >= 0.0) {
    g.add_terminal(node, c, 0.0);
    return 0.0;
  }
  g.add_terminal(node, 0.0, -c);
  return c;
}

}  // namespace

QpboResult solve_qpbo(const BinaryEnergy& e) {
  for (const auto& u : e.unary) {
    if (!std::isfinite(u[0]) || !std::isfinite(u[1])) {
      throw NonFiniteCoefficient("non-finite unary coefficient");
    }
  }
  for (const auto& t : e.pairwise) {
    if (!std::isfinite(t.e00) || !std::isfinite(t.e01) || !std::isfinite(t.e10) ||
        !std::isfinite(t.e11)) {
      throw NonFiniteCoefficient("non-finite pairwise coefficient");
    }
  }

  // Node 2i is the literal x_i, node 2i+1 its negation.
  FlowGraph g(2 * e.n_vars);
  double constant = 0.0;

  auto node = [](int var) { return 2 * var; };
  auto neg = [](int var) { return 2 * var + 1; };

  // Each original term is split in half between the primal and the negated
  // copy so the network is self-dual.
  for (int i = 0; i < e.n_vars; ++i) {
    const double t0 = e.unary[std::size_t(i)][0];
    const double t1 = e.unary[std::size_t(i)][1];
    const double c = 0.5 * (t1 - t0);
    constant += 0.5 * (t0 + t1);
    constant += add_signed_unary(g, node(i), c) + add_signed_unary(g, neg(i), -c);
  }

  for (const auto& t : e.pairwise) {
    const int p = t.u, q = t.v;
    const double m = t.e01 + t.e10 - t.e00 - t.e11;
    if (m >= 0.0) {
      // submodular: couple (p,q) and (q~,p~)
      constant += 0.5 * (t.e00 + t.e11);
      constant += add_signed_unary(g, node(p), 0.5 * (t.e10 - t.e00));
      constant += add_signed_unary(g, node(q), 0.5 * (t.e11 - t.e10));
      g.add_arc(node(p), node(q), 0.5 * m, 0.0);
      constant += add_signed_unary(g, neg(q), 0.5 * (t.e10 - t.e11));
      constant += add_signed_unary(g, neg(p), 0.5 * (t.e00 - t.e10));
      g.add_arc(neg(q), neg(p), 0.5 * m, 0.0);
    } else {
      // supermodular: flip one side, couple (p,q~) and (q,p~)
      constant += 0.5 * (t.e01 + t.e10);
      constant += add_signed_unary(g, node(p), 0.5 * (t.e11 - t.e01));
      constant += add_signed_unary(g, neg(q), 0.5 * (t.e10 - t.e11));
      g.add_arc(node(p), neg(q), -0.5 * m, 0.0);
      constant += add_signed_unary(g, node(q), 0.5 * (t.e11 - t.e10));
      constant += add_signed_unary(g, neg(p), 0.5 * (t.e01 - t.e11));
      g.add_arc(node(q), neg(p), -0.5 * m, 0.0);
    }
  }

  QpboResult out;
  out.lower_bound = constant + g.solve();
  out.labels.assign(std::size_t(e.n_vars), BinaryLabel::unlabeled);
  for (int i = 0; i < e.n_vars; ++i) {
    // cut: source-reachable nodes take literal value 0, everything else 1
    const int u_p = g.reachable_from_source(node(i)) ? 0 : 1;
    const int u_n = g.reachable_from_source(neg(i)) ? 0 : 1;
    if (u_p + u_n == 1) {
      out.labels[std::size_t(i)] = u_p ? BinaryLabel::one : BinaryLabel::zero;
      ++out.n_labeled;
    }
  }
  return out;
}

}  // namespace patchfuse
