#include <doctest.h>

#include "oracles.hpp"
#include "patchfuse/metrics.hpp"
#include "patchfuse/postprocess.hpp"
#include "patchfuse/rng.hpp"
#include "patchfuse/synthdata.hpp"

using namespace patchfuse;

namespace {

LabelMap transpose(const LabelMap& m) {
  LabelMap out(m.height(), m.width());
  for (int y = 0; y < m.height(); ++y) {
    for (int x = 0; x < m.width(); ++x) out.at(y, x) = m.at(x, y);
  }
  return out;
}

LabelMap random_instance_map(Rng& rng, int w, int h, int max_instances) {
  SceneSpec spec;
  spec.image_w = w;
  spec.image_h = h;
  spec.n_instances = rng.next_int(0, max_instances);
  spec.min_side = std::max(2, w / 8);
  spec.max_side = std::max(3, w / 3);
  spec.seed = rng.next_u64();
  return generate_scene(spec).gt;
}

}  // namespace

TEST_CASE("identical maps score perfectly at class level") {
  Rng rng(2);
  const LabelMap m = random_instance_map(rng, 32, 24, 4);
  const ClassMetrics c = class_level(m, m);
  CHECK(c.fiou == 1.0);
  CHECK(c.biou == 1.0);
  CHECK(c.avg_iou == 1.0);
  CHECK(c.acc == 1.0);
  CHECK(c.ovrl_pr == 1.0);
  CHECK(c.ovrl_re == 1.0);
}

TEST_CASE("all-background prediction against 10 foreground pixels in 100") {
  LabelMap gt(10, 10, 0);
  for (int x = 0; x < 10; ++x) gt.at(x, 0) = 1;
  const LabelMap pred(10, 10, 0);
  const ClassMetrics c = class_level(pred, gt);
  CHECK(c.fiou == doctest::Approx(0.0));
  CHECK(c.biou == doctest::Approx(0.9));
  CHECK(c.acc == doctest::Approx(0.9));
  CHECK(c.ovrl_re == doctest::Approx(0.0));
  CHECK(c.ovrl_pr == doctest::Approx(1.0));  // no positive predictions
}

TEST_CASE("hand-counted overlap on a 4x4 grid") {
  // gt: 8 fg pixels, pred: 6 fg pixels, 4 shared
  LabelMap gt(4, 4, 0), pred(4, 4, 0);
  for (int i = 0; i < 8; ++i) gt[std::size_t(i)] = 1;
  for (int i = 4; i < 10; ++i) pred[std::size_t(i)] = 1;
  const ClassMetrics c = class_level(pred, gt);
  CHECK(c.fiou == doctest::Approx(0.4));
  CHECK(c.ovrl_pr == doctest::Approx(4.0 / 6.0));
  CHECK(c.ovrl_re == doctest::Approx(0.5));
}

TEST_CASE("identical maps with two instances score perfect instance metrics") {
  LabelMap m(20, 10, 0);
  for (int x = 0; x < 5; ++x) {
    m.at(x, 8) = 1;
    m.at(x + 10, 2) = 2;
  }
  const InstanceMetrics im = instance_level(m, m);
  CHECK(im.mwcov == doctest::Approx(1.0));
  CHECK(im.mucov == doctest::Approx(1.0));
  CHECK(im.obj_pr == doctest::Approx(1.0));
  CHECK(im.obj_re == doctest::Approx(1.0));
  CHECK(im.avg_fp == 0.0);
  CHECK(im.avg_fn == 0.0);
  CHECK(im.n_gt_instances == 2);
}

TEST_CASE("coverage follows the weighted formula") {
  // gt instance 1: 10 px matched with IoU 0.5; gt instance 2: 30 px with IoU 0.9
  // construct: gt1 = 10px, pred1 covers 10px plus 10 extra -> IoU 10/20 = 0.5
  // gt2 = 30px row, pred2 covers 27 of them and nothing else -> IoU 27/30 = 0.9
  LabelMap gt(40, 4, 0), pred(40, 4, 0);
  for (int x = 0; x < 10; ++x) gt.at(x, 0) = 1;
  for (int x = 0; x < 20; ++x) pred.at(x, 0) = 1;
  for (int x = 0; x < 30; ++x) gt.at(x, 2) = 2;
  for (int x = 0; x < 27; ++x) pred.at(x, 2) = 2;
  const InstanceMetrics im = instance_level(pred, gt);
  CHECK(im.mucov == doctest::Approx(0.7));
  CHECK(im.mwcov == doctest::Approx((10 * 0.5 + 30 * 0.9) / 40.0));
}

TEST_CASE("a disjoint prediction is a false positive") {
  LabelMap gt(10, 10, 0), pred(10, 10, 0);
  for (int x = 0; x < 3; ++x) gt.at(x, 9) = 1;
  for (int x = 5; x < 8; ++x) pred.at(x, 0) = 1;
  const InstanceMetrics im = instance_level(pred, gt);
  CHECK(im.avg_fp == 1.0);
  CHECK(im.avg_fn == 1.0);
  CHECK(im.obj_pr == 0.0);
  CHECK(im.obj_re == 0.0);
}

TEST_CASE("identical maps give perfect depth ordering for any seed") {
  Rng rng(9);
  const LabelMap m = random_instance_map(rng, 24, 24, 3);
  for (const std::uint64_t seed : {1ull, 2ull, 99ull}) {
    const DepthMetrics d = depth_ordering(m, m, 0.5, seed);
    CHECK(d.ins_pair_acc == doctest::Approx(1.0));
    CHECK(d.pct_corr_pxl_pair_fgr == doctest::Approx(1.0));
    CHECK(d.pct_rcld_ins == doctest::Approx(1.0));
  }
}

TEST_CASE("a swapped depth order is recalled but incorrectly ordered") {
  LabelMap gt(20, 20, 0), pred(20, 20, 0);
  for (int y = 12; y < 18; ++y) {
    for (int x = 0; x < 6; ++x) gt.at(x, y) = 1;
  }
  for (int y = 2; y < 8; ++y) {
    for (int x = 10; x < 16; ++x) gt.at(x, y) = 2;
  }
  // same segmentation, swapped labels
  for (std::size_t p = 0; p < gt.size(); ++p) {
    if (gt[p] == 1) pred[p] = 2;
    if (gt[p] == 2) pred[p] = 1;
  }
  const DepthMetrics d = depth_ordering(pred, gt, 1.0, 0);
  CHECK(d.n_ins == 2);
  CHECK(d.n_ins_pair == 1);
  CHECK(d.pct_rcld_ins_pair == doctest::Approx(1.0));
  CHECK(d.ins_pair_acc == doctest::Approx(0.0));
}

TEST_CASE("sample_frac = 1 matches the exhaustive pixel-pair oracle") {
  Rng rng(15);
  for (int round = 0; round < 15; ++round) {
    const LabelMap gt = random_instance_map(rng, 16, 16, 3);
    LabelMap pred = random_instance_map(rng, 16, 16, 3);
    const DepthMetrics d = depth_ordering(pred, gt, 1.0, 77);
    CHECK(d.pct_corr_pxl_pair_fgr ==
          doctest::Approx(oracles::pixel_pair_correct_bruteforce(pred, gt)));
  }
}

TEST_CASE("sampled correctness is deterministic per seed") {
  Rng rng(25);
  const LabelMap gt = random_instance_map(rng, 32, 32, 4);
  LabelMap pred = gt;
  // perturb a corner
  for (int x = 0; x < 8; ++x) pred.at(x, 0) = 0;
  const DepthMetrics a = depth_ordering(pred, gt, 0.1, 5);
  const DepthMetrics b = depth_ordering(pred, gt, 0.1, 5);
  CHECK(a.pct_corr_pxl_pair_fgr == b.pct_corr_pxl_pair_fgr);
}

TEST_CASE("metrics are invariant under transposition") {
  Rng rng(31);
  for (int round = 0; round < 8; ++round) {
    const LabelMap gt = random_instance_map(rng, 20, 14, 3);
    LabelMap pred = random_instance_map(rng, 20, 14, 3);
    const MetricsReport a = evaluate(pred, gt, 1.0, 0);
    const MetricsReport b = evaluate(transpose(pred), transpose(gt), 1.0, 0);
    CHECK(a.class_level.fiou == doctest::Approx(b.class_level.fiou));
    CHECK(a.class_level.acc == doctest::Approx(b.class_level.acc));
    CHECK(a.instance_level.mwcov == doctest::Approx(b.instance_level.mwcov));
    CHECK(a.instance_level.obj_re == doctest::Approx(b.instance_level.obj_re));
    CHECK(a.depth.pct_corr_pxl_pair_fgr == doctest::Approx(b.depth.pct_corr_pxl_pair_fgr));
  }
}

TEST_CASE("fractions stay within [0,1]") {
  Rng rng(37);
  for (int round = 0; round < 15; ++round) {
    const LabelMap gt = random_instance_map(rng, 18, 18, 4);
    LabelMap pred = random_instance_map(rng, 18, 18, 4);
    const MetricsReport r = evaluate(pred, gt, 1.0, 0);
    for (const double v :
         {r.instance_level.mwcov, r.instance_level.mucov, r.instance_level.avg_pr,
          r.instance_level.avg_re, r.instance_level.obj_pr, r.instance_level.obj_re,
          r.depth.pct_rcld_ins, r.depth.pct_rcld_ins_pair, r.depth.ins_pair_acc,
          r.depth.pct_corr_pxl_pair_fgr}) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("dimension mismatch raises") {
  CHECK_THROWS_AS(class_level(LabelMap(2, 2, 0), LabelMap(3, 2, 0)), DimensionError);
  CHECK_THROWS_AS(instance_level(LabelMap(2, 2, 0), LabelMap(3, 2, 0)), DimensionError);
  CHECK_THROWS_AS(depth_ordering(LabelMap(2, 2, 0), LabelMap(3, 2, 0)), DimensionError);
}

TEST_CASE("aggregation averages per image and excludes undefined coverage") {
  LabelMap empty(8, 8, 0);
  LabelMap one(8, 8, 0);
  for (int x = 0; x < 8; ++x) {
    for (int y = 4; y < 8; ++y) one.at(x, y) = 1;
  }
  std::vector<MetricsReport> reports;
  reports.push_back(evaluate(one, one, 1.0, 0));
  reports.push_back(evaluate(empty, empty, 1.0, 0));  // no GT instances
  const MetricsReport agg = aggregate(reports);
  CHECK(agg.instance_level.mucov == doctest::Approx(1.0));  // empty image excluded
  CHECK(agg.class_level.fiou == doctest::Approx(1.0));
  CHECK(agg.instance_level.n_gt_instances == 1);
}
