#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "patchfuse/io.hpp"
#include "patchfuse/rng.hpp"

using namespace patchfuse;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("patchfuse_test_" + std::to_string(Rng(std::random_device{}()).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("label maps round-trip byte-identically") {
  TempDir tmp;
  Rng rng(4);
  LabelMap m(13, 7, 0);
  for (std::size_t p = 0; p < m.size(); ++p) m[p] = Label(rng.next_int(0, 9));
  const fs::path f = tmp.path / "a.lmap";
  write_label_map(f, m, 9);
  const LabelMapFile back = read_label_map(f);
  CHECK(back.map == m);
  CHECK(back.n_max == 9);

  write_label_map(tmp.path / "b.lmap", m, 9);
  std::ifstream fa(f, std::ios::binary), fb(tmp.path / "b.lmap", std::ios::binary);
  const std::string da((std::istreambuf_iterator<char>(fa)), {});
  const std::string db((std::istreambuf_iterator<char>(fb)), {});
  CHECK(da == db);
  CHECK(da.substr(0, 4) == "LMAP");
}

TEST_CASE("lmap header layout is bit-exact") {
  TempDir tmp;
  LabelMap m(2, 1, {3, 0});
  const fs::path f = tmp.path / "h.lmap";
  write_label_map(f, m, 9);
  std::ifstream in(f, std::ios::binary);
  const std::string d((std::istreambuf_iterator<char>(in)), {});
  REQUIRE(d.size() == 4 + 2 + 4 + 4 + 2 + 2);
  // version 1, w=2, h=1, n_max=9, labels 3 0, all little-endian
  const unsigned char want[] = {'L', 'M', 'A', 'P', 1, 0, 2, 0, 0, 0,
                                1,   0,   0,   0,   9, 0, 3, 0};
  for (std::size_t i = 0; i < sizeof(want); ++i) {
    CHECK((unsigned char)d[i] == want[i]);
  }
}

TEST_CASE("corrupt label maps raise FormatError") {
  TempDir tmp;
  const fs::path f = tmp.path / "bad.lmap";
  std::ofstream(f, std::ios::binary) << "LMAPxx";
  CHECK_THROWS_AS(read_label_map(f), FormatError);
  std::ofstream(f, std::ios::binary | std::ios::trunc) << "NOPE";
  CHECK_THROWS_AS(read_label_map(f), FormatError);
  CHECK_THROWS_AS(read_label_map(tmp.path / "missing.lmap"), IoError);
}

TEST_CASE("prob tensors round-trip exactly") {
  TempDir tmp;
  Rng rng(5);
  ProbTensor t(5, 4, 6);
  for (std::size_t p = 0; p < t.n_pixels(); ++p) {
    auto v = t.pixel(p);
    double sum = 0.0;
    for (int l = 0; l < 6; ++l) {
      v[std::size_t(l)] = float(rng.next_unit() + 0.01);
      sum += v[std::size_t(l)];
    }
    for (int l = 0; l < 6; ++l) v[std::size_t(l)] = float(v[std::size_t(l)] / sum);
  }
  const fs::path f = tmp.path / "t.ptn";
  write_prob_tensor(f, t);
  const ProbTensor back = read_prob_tensor(f);
  CHECK(back.width() == 5);
  CHECK(back.height() == 4);
  CHECK(back.n_labels() == 6);
  CHECK(back.data() == t.data());
}

TEST_CASE("manifest round-trips") {
  TempDir tmp;
  Manifest m;
  m.image_w = 192;
  m.image_h = 128;
  m.n_max = 9;
  m.patches.push_back({0, ScaleId::large, Rect{0, 0, 192, 128}, "patch_0000.ptn"});
  m.patches.push_back({1, ScaleId::small, Rect{10, 20, 48, 48}, "patch_0001.ptn"});
  const fs::path f = tmp.path / "manifest.txt";
  write_manifest(f, m);
  const Manifest back = read_manifest(f);
  CHECK(back.image_w == 192);
  CHECK(back.image_h == 128);
  REQUIRE(back.patches.size() == 2);
  CHECK(back.patches[1].rect == Rect{10, 20, 48, 48});
  CHECK(back.patches[1].scale == ScaleId::small);
  CHECK(back.patches[1].tensor_file == "patch_0001.ptn");
}

TEST_CASE("manifest validation names the problem") {
  TempDir tmp;
  const fs::path f = tmp.path / "manifest.txt";
  std::ofstream(f) << "image_width = 10\nimage_height = 10\n\n[patch]\nid = 0\n"
                      "scale = large\nrect = 0 0 20 20\ntensor = x.ptn\n";
  CHECK_THROWS_AS(read_manifest(f), FormatError);
}

TEST_CASE("run config defaults survive a round trip") {
  TempDir tmp;
  RunConfig cfg;
  cfg.scene.count = 3;
  cfg.scene.spec.seed = 99;
  cfg.energy.weights.lambda_short = 0.25;
  cfg.metrics.sample_frac = 0.5;
  const fs::path f = tmp.path / "config.ini";
  write_run_config(f, cfg);
  const RunConfig back = load_run_config(f);
  CHECK(back.scene.count == 3);
  CHECK(back.scene.spec.seed == 99);
  CHECK(back.energy.weights.lambda_short == doctest::Approx(0.25));
  CHECK(back.metrics.sample_frac == doctest::Approx(0.5));
  CHECK(back.inference.max_sweeps == 5);
  CHECK(back.postprocess.min_size == 200);
  CHECK(back.energy.long_edge_samples == 20000);
}

TEST_CASE("config errors carry line and field diagnostics") {
  const char* bad_field =
      "[scene]\n"
      "n_instances = banana\n";
  try {
    parse_run_config(bad_field, "cfg");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("cfg:2") != std::string::npos);
    CHECK(msg.find("n_instances") != std::string::npos);
  }

  CHECK_THROWS_AS(parse_run_config("[scene]\nn_instances = 12\n", "cfg"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[scene]\nmystery = 1\n", "cfg"), ConfigError);
  CHECK_THROWS_AS(parse_run_config("[weird]\n", "cfg"), ConfigError);
}

TEST_CASE("renders are deterministic and all-black for background") {
  TempDir tmp;
  LabelMap bg(4, 2, 0);
  const fs::path f = tmp.path / "bg.ppm";
  write_ppm(f, bg);
  std::ifstream in(f, std::ios::binary);
  const std::string d((std::istreambuf_iterator<char>(in)), {});
  const std::string header = "P6\n4 2\n255\n";
  REQUIRE(d.size() == header.size() + 4 * 2 * 3);
  CHECK(d.substr(0, header.size()) == header);
  for (std::size_t i = header.size(); i < d.size(); ++i) CHECK(d[i] == 0);

  LabelMap one(2, 2, 1);
  write_ppm(tmp.path / "a.ppm", one);
  write_ppm(tmp.path / "b.ppm", one);
  std::ifstream fa(tmp.path / "a.ppm", std::ios::binary), fb(tmp.path / "b.ppm", std::ios::binary);
  const std::string da((std::istreambuf_iterator<char>(fa)), {});
  const std::string db((std::istreambuf_iterator<char>(fb)), {});
  CHECK(da == db);
  // label 1 renders as the warmest palette entry everywhere
  CHECK((unsigned char)da[header.size() - 1 + 1] == 230);
}

TEST_CASE("report text and json contain every metric group") {
  MetricsReport r;
  const std::string text = report_text(r);
  CHECK(text.find("class.fiou:") != std::string::npos);
  CHECK(text.find("instance.mwcov:") != std::string::npos);
  CHECK(text.find("depth.pct_corr_pxl_pair_fgr:") != std::string::npos);
  const std::string json = report_json(r);
  CHECK(json.find("\"class\"") != std::string::npos);
  CHECK(json.find("\"depth\"") != std::string::npos);
}
