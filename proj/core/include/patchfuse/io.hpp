#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "patchfuse/energy.hpp"
#include "patchfuse/grid.hpp"
#include "patchfuse/metrics.hpp"
#include "patchfuse/patch_layout.hpp"
#include "patchfuse/synthdata.hpp"

namespace patchfuse {

// Binary formats, little-endian:
//   .lmap  "LMAP", u16 version, u32 width, u32 height, u16 n_max, u8 labels
//   .ptn   "PTN0", u32 width, u32 height, u16 n_labels, f32 probabilities
// All writers are atomic (temp file + rename).

struct LabelMapFile {
  LabelMap map;
  int n_max = kDefaultNMax;
};

void write_label_map(const std::filesystem::path& path, const LabelMap& m,
                     int n_max = kDefaultNMax);
LabelMapFile read_label_map(const std::filesystem::path& path);

void write_prob_tensor(const std::filesystem::path& path, const ProbTensor& t);
ProbTensor read_prob_tensor(const std::filesystem::path& path);

// P6 portable pixmap; background black, labels on a fixed warm-to-cool
// palette (nearer = warmer).
void write_ppm(const std::filesystem::path& path, const LabelMap& m);

struct ManifestEntry {
  int id = 0;
  ScaleId scale = ScaleId::large;
  Rect rect;
  std::string tensor_file;
};

struct Manifest {
  int image_w = 0;
  int image_h = 0;
  int n_max = kDefaultNMax;
  std::vector<ManifestEntry> patches;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

// Loads the patch predictions a manifest points to (tensor paths are
// relative to the manifest's directory).
std::vector<PatchPrediction> load_patches(const std::filesystem::path& manifest_path,
                                          const Manifest& m);

// ---- run configuration (ini-style structured text) ----

struct SceneConfig {
  int count = 1;
  SceneSpec spec;
  int downsample = 1;
};

struct LayoutParams {
  int horizon_y = 0;
  std::array<int, 3> patch_sizes{192, 96, 48};
  std::array<int, 3> strides{96, 48, 24};
  std::array<int, 3> band_half_heights{0, 48, 24};

  LayoutConfig for_image(int image_w, int image_h) const {
    return LayoutConfig{image_w, image_h, horizon_y, patch_sizes, strides, band_half_heights};
  }
};

struct EnergyConfig {
  EnergyWeights weights;
  int long_edge_samples = 20000;
  std::uint64_t seed = 7;
  int n_max = kDefaultNMax;
};

struct InferenceConfig {
  int max_sweeps = 5;
  double epsilon = 1e-12;
};

struct PostprocessConfig {
  int min_size = 200;
};

struct MetricsConfig {
  double sample_frac = 0.05;
  std::uint64_t seed = 11;
};

struct RunConfig {
  SceneConfig scene;
  LayoutParams layout;
  EnergyConfig energy;
  InferenceConfig inference;
  PostprocessConfig postprocess;
  MetricsConfig metrics;
};

RunConfig parse_run_config(const std::string& text, const std::string& origin);
RunConfig load_run_config(const std::filesystem::path& path);
void write_run_config(const std::filesystem::path& path, const RunConfig& cfg);

// ---- metric reports ----

std::string report_text(const MetricsReport& r);
std::string report_json(const MetricsReport& r);

// utility shared by the writers
void write_file_atomic(const std::filesystem::path& path, const std::string& payload);

}  // namespace patchfuse
