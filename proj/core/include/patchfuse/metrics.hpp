#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "patchfuse/grid.hpp"

namespace patchfuse {

// Foreground/background quality. Vacuous ratios (empty denominators) report
// 1.0 so that pred == gt scores perfectly on any map.
struct ClassMetrics {
  double fiou = 1.0;
  double biou = 1.0;
  double avg_iou = 1.0;
  double acc = 1.0;
  double ovrl_pr = 1.0;
  double ovrl_re = 1.0;
};

// Instance-level quality; instances are the distinct foreground labels.
struct InstanceMetrics {
  double mwcov = 0.0;
  double mucov = 0.0;
  double avg_pr = 1.0;
  double avg_re = 1.0;
  double avg_fp = 0.0;  // count per image
  double avg_fn = 0.0;
  double obj_pr = 1.0;
  double obj_re = 1.0;
  int n_pred_instances = 0;
  int n_gt_instances = 0;
  // Coverage is undefined without GT instances; such images report 0 with
  // this flag cleared and are excluded from suite-level coverage averages.
  bool coverage_defined = false;
};

struct DepthMetrics {
  int n_ins = 0;
  double pct_rcld_ins = 1.0;
  long long n_ins_pair = 0;
  double pct_rcld_ins_pair = 1.0;
  double ins_pair_acc = 1.0;           // vacuous 1.0 when no recalled pair
  double pct_corr_pxl_pair_fgr = 1.0;  // vacuous 1.0 when < 2 fg pixels
  bool ins_defined = false;
  bool pair_acc_defined = false;
  bool pxl_pair_defined = false;
};

struct MetricsReport {
  ClassMetrics class_level;
  InstanceMetrics instance_level;
  DepthMetrics depth;
};

ClassMetrics class_level(const LabelMap& pred, const LabelMap& gt);

// Greedy one-to-one matching by descending IoU with threshold IoU > 0.5
// decides ObjPr/ObjRe and recall; coverage and AvgPr/AvgRe use best-IoU
// counterparts without the threshold.
InstanceMetrics instance_level(const LabelMap& pred, const LabelMap& gt);

// Depth-ordering quality. Pixel-pair correctness draws
// round(sample_frac * #pairs) distinct pairs of GT-foreground pixels without
// replacement (all pairs when sample_frac >= 1).
DepthMetrics depth_ordering(const LabelMap& pred, const LabelMap& gt,
                            double sample_frac = 0.05, std::uint64_t seed = 0);

MetricsReport evaluate(const LabelMap& pred, const LabelMap& gt,
                       double sample_frac = 0.05, std::uint64_t seed = 0);

// Equal-weight mean over images; undefined entries (flagged above) are
// excluded from their averages, instance/pair counts are summed.
MetricsReport aggregate(std::span<const MetricsReport> reports);

}  // namespace patchfuse
