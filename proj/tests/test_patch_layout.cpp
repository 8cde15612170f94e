#include <doctest.h>

#include <algorithm>

#include "patchfuse/patch_layout.hpp"
#include "patchfuse/rng.hpp"

using namespace patchfuse;

namespace {

LayoutConfig large_only(int w, int h, int horizon, int size, int stride) {
  LayoutConfig cfg;
  cfg.image_w = w;
  cfg.image_h = h;
  cfg.horizon_y = horizon;
  cfg.patch_sizes = {size, 0, 0};
  cfg.strides = {stride, 1, 1};
  return cfg;
}

}  // namespace

TEST_CASE("large patches tile below the horizon with edge alignment") {
  const auto patches = tile_patches(large_only(100, 60, 20, 40, 30));
  REQUIRE(patches.size() == 3);
  CHECK(patches[0].rect == Rect{0, 20, 40, 40});
  CHECK(patches[1].rect == Rect{30, 20, 40, 40});
  CHECK(patches[2].rect == Rect{60, 20, 40, 40});
  for (const auto& p : patches) CHECK(p.scale == ScaleId::large);
}

TEST_CASE("image equal to one patch yields a single spec") {
  const auto patches = tile_patches(large_only(64, 64, 0, 64, 32));
  REQUIRE(patches.size() == 1);
  CHECK(patches[0].rect == Rect{0, 0, 64, 64});
}

TEST_CASE("oversized stride still covers the right edge") {
  // one column at x=0 plus a right-aligned extra patch
  const auto patches = tile_patches(large_only(100, 40, 0, 40, 100));
  REQUIRE(patches.size() == 2);
  CHECK(patches[0].rect.x0 == 0);
  CHECK(patches[1].rect == Rect{60, 0, 40, 40});
}

TEST_CASE("every pixel below the horizon is covered by a large patch") {
  Rng rng(4);
  for (int round = 0; round < 40; ++round) {
    const int w = rng.next_int(8, 120), h = rng.next_int(8, 90);
    const int horizon = rng.next_int(0, h - 1);
    const int size = rng.next_int(4, 60);
    const int stride = rng.next_int(1, size);
    const auto patches = tile_patches(large_only(w, h, horizon, size, stride));
    std::vector<std::uint8_t> covered(std::size_t(w) * std::size_t(h), 0);
    for (const auto& p : patches) {
      REQUIRE(p.rect.inside_image(w, h));
      for (int y = p.rect.y0; y < p.rect.y1(); ++y) {
        for (int x = p.rect.x0; x < p.rect.x1(); ++x) {
          covered[pixel_index(x, y, w)] = 1;
        }
      }
    }
    for (int y = horizon; y < h; ++y) {
      for (int x = 0; x < w; ++x) REQUIRE(covered[pixel_index(x, y, w)] == 1);
    }
  }
}

TEST_CASE("medium and small scales tile only the horizon band") {
  LayoutConfig cfg;
  cfg.image_w = 200;
  cfg.image_h = 100;
  cfg.horizon_y = 40;
  cfg.patch_sizes = {80, 40, 20};
  cfg.strides = {40, 20, 10};
  cfg.band_half_heights = {0, 20, 10};
  const auto patches = tile_patches(cfg);
  for (const auto& p : patches) {
    if (p.scale == ScaleId::medium) {
      CHECK(p.rect.y0 >= 20);
      CHECK(p.rect.y0 <= 61);
    } else if (p.scale == ScaleId::small) {
      CHECK(p.rect.y0 >= 30);
      CHECK(p.rect.y0 <= 51);
    }
  }
  CHECK(std::any_of(patches.begin(), patches.end(),
                    [](const PatchSpec& p) { return p.scale == ScaleId::medium; }));
  CHECK(std::any_of(patches.begin(), patches.end(),
                    [](const PatchSpec& p) { return p.scale == ScaleId::small; }));
}

TEST_CASE("tiling is deterministic") {
  LayoutConfig cfg;
  cfg.image_w = 123;
  cfg.image_h = 77;
  cfg.horizon_y = 11;
  const auto a = tile_patches(cfg);
  const auto b = tile_patches(cfg);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].rect == b[i].rect);
    CHECK(a[i].scale == b[i].scale);
  }
}

TEST_CASE("empty layouts and invalid configs are rejected") {
  LayoutConfig cfg = large_only(10, 10, 10, 40, 10);  // horizon at image bottom
  cfg.band_half_heights = {0, 0, 0};
  CHECK_THROWS_AS(tile_patches(cfg), EmptyLayout);

  LayoutConfig bad = large_only(100, 50, 0, 40, 0);
  CHECK_THROWS_AS(tile_patches(bad), ConfigError);

  LayoutConfig unordered;
  unordered.image_w = 100;
  unordered.image_h = 100;
  unordered.patch_sizes = {40, 60, 20};
  CHECK_THROWS_AS(tile_patches(unordered), ConfigError);
}

TEST_CASE("upsampling a 1x1 tensor replicates the distribution") {
  ProbTensor t(1, 1, 3);
  t.at(0, 0, 0) = 0.2f;
  t.at(0, 0, 1) = 0.5f;
  t.at(0, 0, 2) = 0.3f;
  const ProbTensor up = upsample_bilinear(t, 4, 4);
  for (std::size_t p = 0; p < up.n_pixels(); ++p) {
    CHECK(up.pixel(p)[0] == doctest::Approx(0.2));
    CHECK(up.pixel(p)[1] == doctest::Approx(0.5));
    CHECK(up.pixel(p)[2] == doctest::Approx(0.3));
  }
}

TEST_CASE("align-corners weights on a 2x1 ramp") {
  ProbTensor t(2, 1, 2);
  t.at(0, 0, 0) = 0.0f;
  t.at(0, 0, 1) = 1.0f;
  t.at(1, 0, 0) = 1.0f;
  t.at(1, 0, 1) = 0.0f;
  const ProbTensor up = upsample_bilinear(t, 5, 1);
  const float want[5] = {0.0f, 0.25f, 0.5f, 0.75f, 1.0f};
  for (int x = 0; x < 5; ++x) {
    CHECK(up.at(x, 0, 0) == doctest::Approx(want[x]));
    CHECK(up.at(x, 0, 1) == doctest::Approx(1.0f - want[x]));
  }
}

TEST_CASE("upsample by factor 1 is the identity") {
  Rng rng(8);
  ProbTensor t(3, 2, 4);
  for (std::size_t p = 0; p < t.n_pixels(); ++p) {
    auto v = t.pixel(p);
    double sum = 0.0;
    for (int l = 0; l < 4; ++l) {
      v[std::size_t(l)] = float(rng.next_unit() + 0.01);
      sum += v[std::size_t(l)];
    }
    for (int l = 0; l < 4; ++l) v[std::size_t(l)] = float(v[std::size_t(l)] / sum);
  }
  const ProbTensor up = upsample_bilinear(t, 3, 2);
  for (std::size_t i = 0; i < t.data().size(); ++i) CHECK(up.data()[i] == t.data()[i]);
}

TEST_CASE("upsampling rejects shrinking and keeps bounds and normalization") {
  ProbTensor t(4, 4, 3);
  Rng rng(21);
  float lo[3] = {1.0f, 1.0f, 1.0f}, hi[3] = {0.0f, 0.0f, 0.0f};
  for (std::size_t p = 0; p < t.n_pixels(); ++p) {
    auto v = t.pixel(p);
    double sum = 0.0;
    for (int l = 0; l < 3; ++l) {
      v[std::size_t(l)] = float(rng.next_unit() + 0.01);
      sum += v[std::size_t(l)];
    }
    for (int l = 0; l < 3; ++l) {
      v[std::size_t(l)] = float(v[std::size_t(l)] / sum);
      lo[l] = std::min(lo[l], v[std::size_t(l)]);
      hi[l] = std::max(hi[l], v[std::size_t(l)]);
    }
  }
  CHECK_THROWS_AS(upsample_bilinear(t, 2, 4), DimensionError);

  const ProbTensor up = upsample_bilinear(t, 9, 7);
  CHECK(validate_prob_tensor(up, 1e-5f).ok);
  for (std::size_t p = 0; p < up.n_pixels(); ++p) {
    for (int l = 0; l < 3; ++l) {
      CHECK(up.pixel(p)[std::size_t(l)] >= lo[l] - 1e-5f);
      CHECK(up.pixel(p)[std::size_t(l)] <= hi[l] + 1e-5f);
    }
  }
}
