#include "patchfuse/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "patchfuse/rng.hpp"

namespace patchfuse {

namespace {

struct InstanceSets {
  std::vector<int> labels;  // distinct foreground labels, ascending
  std::vector<std::vector<std::int32_t>> pixels;
  std::vector<std::int32_t> instance_of;  // -1 for background

  std::size_t count() const { return labels.size(); }
};

InstanceSets extract_instances(const LabelMap& m) {
  InstanceSets s;
  s.instance_of.assign(m.size(), -1);
  std::vector<std::int32_t> index_of_label(256, -1);
  for (std::size_t p = 0; p < m.size(); ++p) {
    const Label l = m[p];
    if (l == 0) continue;
    std::int32_t& idx = index_of_label[std::size_t(l)];
    if (idx < 0) {
      idx = std::int32_t(s.labels.size());
      s.labels.push_back(int(l));
      s.pixels.emplace_back();
    }
    s.pixels[std::size_t(idx)].push_back(std::int32_t(p));
    s.instance_of[p] = idx;
  }
  // ascending label order
  std::vector<std::size_t> order(s.labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return s.labels[a] < s.labels[b]; });
  InstanceSets sorted;
  sorted.instance_of.assign(m.size(), -1);
  for (std::size_t rank = 0; rank < order.size(); ++rank) {
    sorted.labels.push_back(s.labels[order[rank]]);
    sorted.pixels.push_back(std::move(s.pixels[order[rank]]));
    for (const std::int32_t p : sorted.pixels.back()) {
      sorted.instance_of[std::size_t(p)] = std::int32_t(rank);
    }
  }
  return sorted;
}

struct OverlapTable {
  std::size_t n_gt = 0, n_pred = 0;
  std::vector<long long> overlap;  // n_gt x n_pred

  long long& at(std::size_t g, std::size_t p) { return overlap[g * n_pred + p]; }
  long long at(std::size_t g, std::size_t p) const { return overlap[g * n_pred + p]; }
  double iou(const InstanceSets& gt, const InstanceSets& pred, std::size_t g,
             std::size_t p) const {
    const long long ov = at(g, p);
    const long long uni =
        (long long)gt.pixels[g].size() + (long long)pred.pixels[p].size() - ov;
    return uni > 0 ? double(ov) / double(uni) : 1.0;
  }
};

OverlapTable build_overlap(const InstanceSets& gt, const InstanceSets& pred,
                           std::size_t n_px) {
  OverlapTable t;
  t.n_gt = gt.count();
  t.n_pred = pred.count();
  t.overlap.assign(t.n_gt * t.n_pred, 0);
  if (t.n_gt == 0 || t.n_pred == 0) return t;
  for (std::size_t p = 0; p < n_px; ++p) {
    const std::int32_t g = gt.instance_of[p];
    const std::int32_t q = pred.instance_of[p];
    if (g >= 0 && q >= 0) ++t.at(std::size_t(g), std::size_t(q));
  }
  return t;
}

// One-to-one matching greedy by descending IoU, threshold IoU > 0.5.
// Returns per-GT-instance matched pred index (-1 when unmatched).
std::vector<std::int32_t> greedy_match(const InstanceSets& gt, const InstanceSets& pred,
                                       const OverlapTable& t) {
  struct Cand {
    double iou;
    std::size_t g, p;
  };
  std::vector<Cand> cands;
  for (std::size_t g = 0; g < t.n_gt; ++g) {
    for (std::size_t p = 0; p < t.n_pred; ++p) {
      const double iou = t.iou(gt, pred, g, p);
      if (iou > 0.5) cands.push_back({iou, g, p});
    }
  }
  std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.g != b.g) return a.g < b.g;
    return a.p < b.p;
  });
  std::vector<std::int32_t> match(t.n_gt, -1);
  std::vector<std::uint8_t> pred_taken(t.n_pred, 0);
  for (const Cand& c : cands) {
    if (match[c.g] >= 0 || pred_taken[c.p]) continue;
    match[c.g] = std::int32_t(c.p);
    pred_taken[c.p] = 1;
  }
  return match;
}

void check_dims(const LabelMap& pred, const LabelMap& gt) {
  if (!pred.same_dims(gt)) throw DimensionError("pred and gt dimensions differ");
}

double ratio_or(long long num, long long den, double vacuous) {
  return den > 0 ? double(num) / double(den) : vacuous;
}

}  // namespace

ClassMetrics class_level(const LabelMap& pred, const LabelMap& gt) {
  check_dims(pred, gt);
  long long tp = 0, fp = 0, fn = 0, tn = 0;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    const bool pf = pred[p] > 0, gf = gt[p] > 0;
    tp += pf && gf;
    fp += pf && !gf;
    fn += !pf && gf;
    tn += !pf && !gf;
  }
  ClassMetrics c;
  c.fiou = ratio_or(tp, tp + fp + fn, 1.0);
  c.biou = ratio_or(tn, tn + fp + fn, 1.0);
  c.avg_iou = 0.5 * (c.fiou + c.biou);
  c.acc = ratio_or(tp + tn, tp + tn + fp + fn, 1.0);
  c.ovrl_pr = ratio_or(tp, tp + fp, 1.0);
  c.ovrl_re = ratio_or(tp, tp + fn, 1.0);
  return c;
}

InstanceMetrics instance_level(const LabelMap& pred, const LabelMap& gt) {
  check_dims(pred, gt);
  const InstanceSets gi = extract_instances(gt);
  const InstanceSets pi = extract_instances(pred);
  const OverlapTable t = build_overlap(gi, pi, gt.size());

  InstanceMetrics m;
  m.n_gt_instances = int(gi.count());
  m.n_pred_instances = int(pi.count());
  m.coverage_defined = gi.count() > 0;

  if (gi.count() > 0) {
    double cov_sum = 0.0, wcov_sum = 0.0, wsum = 0.0, re_sum = 0.0;
    long long missed = 0;
    for (std::size_t g = 0; g < gi.count(); ++g) {
      double best_iou = 0.0;
      long long best_ov = 0;
      long long any_ov = 0;
      for (std::size_t p = 0; p < pi.count(); ++p) {
        any_ov += t.at(g, p);
        const double iou = t.iou(gi, pi, g, p);
        if (iou > best_iou) {
          best_iou = iou;
          best_ov = t.at(g, p);
        }
      }
      const double size = double(gi.pixels[g].size());
      cov_sum += best_iou;
      wcov_sum += size * best_iou;
      wsum += size;
      re_sum += double(best_ov) / size;
      if (any_ov == 0) ++missed;
    }
    m.mucov = cov_sum / double(gi.count());
    m.mwcov = wcov_sum / wsum;
    m.avg_re = re_sum / double(gi.count());
    m.avg_fn = double(missed);
  }

  if (pi.count() > 0) {
    double pr_sum = 0.0;
    long long spurious = 0;
    for (std::size_t p = 0; p < pi.count(); ++p) {
      double best_iou = 0.0;
      long long best_ov = 0;
      long long any_ov = 0;
      for (std::size_t g = 0; g < gi.count(); ++g) {
        any_ov += t.at(g, p);
        const double iou = t.iou(gi, pi, g, p);
        if (iou > best_iou) {
          best_iou = iou;
          best_ov = t.at(g, p);
        }
      }
      pr_sum += double(best_ov) / double(pi.pixels[p].size());
      if (any_ov == 0) ++spurious;
    }
    m.avg_pr = pr_sum / double(pi.count());
    m.avg_fp = double(spurious);
  }

  const auto match = greedy_match(gi, pi, t);
  long long matched = 0;
  for (const std::int32_t v : match) matched += v >= 0;
  m.obj_pr = ratio_or(matched, (long long)pi.count(), 1.0);
  m.obj_re = ratio_or(matched, (long long)gi.count(), 1.0);
  return m;
}

DepthMetrics depth_ordering(const LabelMap& pred, const LabelMap& gt, double sample_frac,
                            std::uint64_t seed) {
  check_dims(pred, gt);
  const InstanceSets gi = extract_instances(gt);
  const InstanceSets pi = extract_instances(pred);
  const OverlapTable t = build_overlap(gi, pi, gt.size());
  const auto match = greedy_match(gi, pi, t);

  DepthMetrics d;
  d.n_ins = int(gi.count());
  d.ins_defined = gi.count() > 0;
  long long recalled = 0;
  for (const std::int32_t v : match) recalled += v >= 0;
  d.pct_rcld_ins = ratio_or(recalled, (long long)gi.count(), 1.0);

  d.n_ins_pair = (long long)gi.count() * (long long)(gi.count() - 1) / 2;
  long long pairs_recalled = 0, pairs_correct = 0;
  for (std::size_t i = 0; i < gi.count(); ++i) {
    for (std::size_t j = i + 1; j < gi.count(); ++j) {
      if (match[i] < 0 || match[j] < 0) continue;
      ++pairs_recalled;
      const int gt_sign = gi.labels[i] < gi.labels[j] ? -1 : 1;
      const int pred_li = pi.labels[std::size_t(match[i])];
      const int pred_lj = pi.labels[std::size_t(match[j])];
      const int pred_sign = pred_li < pred_lj ? -1 : 1;
      if (gt_sign == pred_sign) ++pairs_correct;
    }
  }
  d.pct_rcld_ins_pair = ratio_or(pairs_recalled, d.n_ins_pair, 1.0);
  d.pair_acc_defined = pairs_recalled > 0;
  d.ins_pair_acc = ratio_or(pairs_correct, pairs_recalled, 1.0);

  // pixel-pair correctness over GT foreground
  std::vector<std::int32_t> fg;
  for (std::size_t p = 0; p < gt.size(); ++p) {
    if (gt[p] > 0) fg.push_back(std::int32_t(p));
  }
  const unsigned long long n_fg = fg.size();
  const unsigned long long total = n_fg * (n_fg - 1) / 2;
  d.pxl_pair_defined = total > 0;

  auto pair_correct = [&](std::int32_t a, std::int32_t b) {
    const int ga = int(gt[std::size_t(a)]), gb = int(gt[std::size_t(b)]);
    const int pa = int(pred[std::size_t(a)]), pb = int(pred[std::size_t(b)]);
    if (pa == 0 || pb == 0) return false;  // background prediction is never correct
    const int gt_rel = ga == gb ? 0 : (ga < gb ? -1 : 1);
    const int pred_rel = pa == pb ? 0 : (pa < pb ? -1 : 1);
    return gt_rel == pred_rel;
  };

  if (total > 0) {
    long long correct = 0;
    if (sample_frac >= 1.0) {
      for (std::size_t i = 0; i < fg.size(); ++i) {
        for (std::size_t j = i + 1; j < fg.size(); ++j) {
          correct += pair_correct(fg[i], fg[j]);
        }
      }
      d.pct_corr_pxl_pair_fgr = double(correct) / double(total);
    } else {
      unsigned long long k =
          (unsigned long long)std::llround(sample_frac * double(total));
      k = std::max<unsigned long long>(1, std::min(k, total));
      Rng rng(seed);
      std::unordered_set<std::uint64_t> seen;
      seen.reserve(std::size_t(k) * 2);
      unsigned long long drawn = 0;
      while (drawn < k) {
        const std::uint64_t a = rng.next_below(n_fg);
        const std::uint64_t b = rng.next_below(n_fg);
        if (a == b) continue;
        const std::uint64_t lo = std::min(a, b), hi = std::max(a, b);
        if (!seen.insert(lo * n_fg + hi).second) continue;
        ++drawn;
        correct += pair_correct(fg[std::size_t(lo)], fg[std::size_t(hi)]);
      }
      d.pct_corr_pxl_pair_fgr = double(correct) / double(k);
    }
  }
  return d;
}

MetricsReport evaluate(const LabelMap& pred, const LabelMap& gt, double sample_frac,
                       std::uint64_t seed) {
  MetricsReport r;
  r.class_level = class_level(pred, gt);
  r.instance_level = instance_level(pred, gt);
  r.depth = depth_ordering(pred, gt, sample_frac, seed);
  return r;
}

MetricsReport aggregate(std::span<const MetricsReport> reports) {
  MetricsReport agg;
  if (reports.empty()) return agg;
  const double n = double(reports.size());

  auto mean = [&](auto field) {
    double s = 0.0;
    for (const auto& r : reports) s += field(r);
    return s / n;
  };
  agg.class_level.fiou = mean([](const MetricsReport& r) { return r.class_level.fiou; });
  agg.class_level.biou = mean([](const MetricsReport& r) { return r.class_level.biou; });
  agg.class_level.avg_iou = mean([](const MetricsReport& r) { return r.class_level.avg_iou; });
  agg.class_level.acc = mean([](const MetricsReport& r) { return r.class_level.acc; });
  agg.class_level.ovrl_pr = mean([](const MetricsReport& r) { return r.class_level.ovrl_pr; });
  agg.class_level.ovrl_re = mean([](const MetricsReport& r) { return r.class_level.ovrl_re; });

  double cov_n = 0, mw = 0, mu = 0;
  for (const auto& r : reports) {
    if (!r.instance_level.coverage_defined) continue;
    ++cov_n;
    mw += r.instance_level.mwcov;
    mu += r.instance_level.mucov;
  }
  agg.instance_level.coverage_defined = cov_n > 0;
  agg.instance_level.mwcov = cov_n > 0 ? mw / cov_n : 0.0;
  agg.instance_level.mucov = cov_n > 0 ? mu / cov_n : 0.0;
  agg.instance_level.avg_pr = mean([](const MetricsReport& r) { return r.instance_level.avg_pr; });
  agg.instance_level.avg_re = mean([](const MetricsReport& r) { return r.instance_level.avg_re; });
  agg.instance_level.avg_fp = mean([](const MetricsReport& r) { return r.instance_level.avg_fp; });
  agg.instance_level.avg_fn = mean([](const MetricsReport& r) { return r.instance_level.avg_fn; });
  agg.instance_level.obj_pr = mean([](const MetricsReport& r) { return r.instance_level.obj_pr; });
  agg.instance_level.obj_re = mean([](const MetricsReport& r) { return r.instance_level.obj_re; });
  for (const auto& r : reports) {
    agg.instance_level.n_pred_instances += r.instance_level.n_pred_instances;
    agg.instance_level.n_gt_instances += r.instance_level.n_gt_instances;
    agg.depth.n_ins += r.depth.n_ins;
    agg.depth.n_ins_pair += r.depth.n_ins_pair;
  }

  auto flagged_mean = [&](auto flag, auto field, double& out, bool& defined) {
    double s = 0.0, c = 0.0;
    for (const auto& r : reports) {
      if (!flag(r)) continue;
      ++c;
      s += field(r);
    }
    defined = c > 0;
    out = c > 0 ? s / c : 1.0;
  };
  flagged_mean([](const MetricsReport& r) { return r.depth.ins_defined; },
               [](const MetricsReport& r) { return r.depth.pct_rcld_ins; },
               agg.depth.pct_rcld_ins, agg.depth.ins_defined);
  bool pairs_defined = false;
  flagged_mean([](const MetricsReport& r) { return r.depth.n_ins_pair > 0; },
               [](const MetricsReport& r) { return r.depth.pct_rcld_ins_pair; },
               agg.depth.pct_rcld_ins_pair, pairs_defined);
  flagged_mean([](const MetricsReport& r) { return r.depth.pair_acc_defined; },
               [](const MetricsReport& r) { return r.depth.ins_pair_acc; },
               agg.depth.ins_pair_acc, agg.depth.pair_acc_defined);
  flagged_mean([](const MetricsReport& r) { return r.depth.pxl_pair_defined; },
               [](const MetricsReport& r) { return r.depth.pct_corr_pxl_pair_fgr; },
               agg.depth.pct_corr_pxl_pair_fgr, agg.depth.pxl_pair_defined);
  return agg;
}

}  // namespace patchfuse
