#include "patchfuse/io.hpp"

#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace patchfuse {

namespace fs = std::filesystem;

namespace {

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(char(v & 0xFF));
  out.push_back(char((v >> 8) & 0xFF));
}
void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(char((v >> (8 * i)) & 0xFF));
}
void put_f32(std::string& out, float v) {
  static_assert(sizeof(float) == 4);
  const auto bits = std::bit_cast<std::uint32_t>(v);
  put_u32(out, bits);
}

class Reader {
 public:
  Reader(std::string data, fs::path path) : data_(std::move(data)), path_(std::move(path)) {}

  std::uint8_t u8() { return std::uint8_t(byte()); }
  std::uint16_t u16() { return std::uint16_t(byte()) | std::uint16_t(byte()) << 8; }
  std::uint32_t u32() {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= std::uint32_t(byte()) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  void magic(const char* expect) {
    for (const char* c = expect; *c; ++c) {
      if (char(byte()) != *c) {
        throw FormatError(path_.string() + ": bad magic, expected '" + expect + "'");
      }
    }
  }
  void expect_eof() const {
    if (pos_ != data_.size()) throw FormatError(path_.string() + ": trailing bytes");
  }
  [[noreturn]] void fail(const std::string& why) const {
    throw FormatError(path_.string() + ": " + why);
  }

 private:
  unsigned char byte() {
    if (pos_ >= data_.size()) throw FormatError(path_.string() + ": truncated file");
    return (unsigned char)data_[pos_++];
  }
  std::string data_;
  fs::path path_;
  std::size_t pos_ = 0;
};

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (!in.good() && !in.eof()) throw IoError("read failed on " + path.string());
  return std::move(ss).str();
}

constexpr std::uint16_t kLmapVersion = 1;

}  // namespace

void write_file_atomic(const fs::path& path, const std::string& payload) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out.write(payload.data(), std::streamsize(payload.size()));
    if (!out.good()) throw IoError("write failed on " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + " to " + path.string());
}

void write_label_map(const fs::path& path, const LabelMap& m, int n_max) {
  std::string out;
  out.reserve(m.size() + 20);
  out += "LMAP";
  put_u16(out, kLmapVersion);
  put_u32(out, std::uint32_t(m.width()));
  put_u32(out, std::uint32_t(m.height()));
  put_u16(out, std::uint16_t(n_max));
  for (std::size_t p = 0; p < m.size(); ++p) out.push_back(char(m[p]));
  write_file_atomic(path, out);
}

LabelMapFile read_label_map(const fs::path& path) {
  Reader r(slurp(path), path);
  r.magic("LMAP");
  const std::uint16_t version = r.u16();
  if (version != kLmapVersion) r.fail("unsupported version " + std::to_string(version));
  const std::uint32_t w = r.u32(), h = r.u32();
  const std::uint16_t n_max = r.u16();
  if (w == 0 || h == 0 || w > 1u << 20 || h > 1u << 20) r.fail("implausible dimensions");
  std::vector<Label> labels(std::size_t(w) * h);
  for (auto& l : labels) l = r.u8();
  r.expect_eof();
  LabelMapFile out{LabelMap(int(w), int(h), std::move(labels)), int(n_max)};
  const ValidationReport rep = validate_label_map(out.map, out.n_max);
  if (!rep.ok) r.fail(rep.violation);
  return out;
}

void write_prob_tensor(const fs::path& path, const ProbTensor& t) {
  std::string out;
  out.reserve(t.data().size() * 4 + 16);
  out += "PTN0";
  put_u32(out, std::uint32_t(t.width()));
  put_u32(out, std::uint32_t(t.height()));
  put_u16(out, std::uint16_t(t.n_labels()));
  for (const float v : t.data()) put_f32(out, v);
  write_file_atomic(path, out);
}

ProbTensor read_prob_tensor(const fs::path& path) {
  Reader r(slurp(path), path);
  r.magic("PTN0");
  const std::uint32_t w = r.u32(), h = r.u32();
  const std::uint16_t L = r.u16();
  if (w == 0 || h == 0 || w > 1u << 20 || h > 1u << 20) r.fail("implausible dimensions");
  if (L < 2) r.fail("n_labels must be at least 2");
  ProbTensor t{int(w), int(h), int(L)};
  for (auto& v : t.data()) v = r.f32();
  r.expect_eof();
  const ValidationReport rep = validate_prob_tensor(t);
  if (!rep.ok) r.fail(rep.violation);
  return t;
}

void write_ppm(const fs::path& path, const LabelMap& m) {
  // warm-to-cool palette, label 1 is the nearest instance
  static constexpr std::array<std::array<std::uint8_t, 3>, 9> kPalette{{
      {230, 25, 25},
      {255, 120, 0},
      {255, 200, 0},
      {190, 230, 0},
      {60, 200, 60},
      {0, 190, 190},
      {0, 120, 255},
      {90, 60, 230},
      {170, 0, 200},
  }};
  std::string out = "P6\n" + std::to_string(m.width()) + " " + std::to_string(m.height()) + "\n255\n";
  out.reserve(out.size() + m.size() * 3);
  for (std::size_t p = 0; p < m.size(); ++p) {
    const int l = int(m[p]);
    if (l == 0) {
      out.append(3, '\0');
    } else {
      const auto& c = kPalette[std::size_t((l - 1) % 9)];
      out.push_back(char(c[0]));
      out.push_back(char(c[1]));
      out.push_back(char(c[2]));
    }
  }
  write_file_atomic(path, out);
}

// ---------------------------------------------------------------- ini text

namespace {

struct IniEntry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<IniEntry> parse_ini(const std::string& text, const std::string& origin) {
  std::vector<IniEntry> entries;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError(origin + ":" + std::to_string(line_no) + ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      entries.push_back({section, "", "", line_no});  // section marker
      continue;
    }
    const std::size_t eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    entries.push_back({section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)), line_no});
  }
  return entries;
}

long long parse_int(const IniEntry& e, const std::string& origin) {
  long long v = 0;
  const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size()) {
    throw ConfigError(origin + ":" + std::to_string(e.line) + ": field '" + e.key +
                      "' expects an integer, got '" + e.value + "'");
  }
  return v;
}

std::uint64_t parse_u64(const IniEntry& e, const std::string& origin) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (res.ec != std::errc() || res.ptr != e.value.data() + e.value.size()) {
    throw ConfigError(origin + ":" + std::to_string(e.line) + ": field '" + e.key +
                      "' expects an unsigned integer, got '" + e.value + "'");
  }
  return v;
}

double parse_double(const IniEntry& e, const std::string& origin) {
  try {
    std::size_t used = 0;
    const double v = std::stod(e.value, &used);
    if (used != e.value.size()) throw std::invalid_argument("");
    return v;
  } catch (const std::exception&) {
    throw ConfigError(origin + ":" + std::to_string(e.line) + ": field '" + e.key +
                      "' expects a number, got '" + e.value + "'");
  }
}

[[noreturn]] void unknown_field(const IniEntry& e, const std::string& origin) {
  throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown field '" + e.key +
                    "' in section [" + e.section + "]");
}

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  for (const IniEntry& e : parse_ini(text, origin)) {
    if (e.key.empty()) {
      if (e.section != "scene" && e.section != "layout" && e.section != "energy" &&
          e.section != "inference" && e.section != "postprocess" && e.section != "metrics") {
        throw ConfigError(origin + ":" + std::to_string(e.line) + ": unknown section [" +
                          e.section + "]");
      }
      continue;
    }
    if (e.section == "scene") {
      if (e.key == "count") cfg.scene.count = int(parse_int(e, origin));
      else if (e.key == "width") cfg.scene.spec.image_w = int(parse_int(e, origin));
      else if (e.key == "height") cfg.scene.spec.image_h = int(parse_int(e, origin));
      else if (e.key == "n_instances") cfg.scene.spec.n_instances = int(parse_int(e, origin));
      else if (e.key == "min_side") cfg.scene.spec.min_side = int(parse_int(e, origin));
      else if (e.key == "max_side") cfg.scene.spec.max_side = int(parse_int(e, origin));
      else if (e.key == "label_flip_prob") cfg.scene.spec.noise.label_flip_prob = parse_double(e, origin);
      else if (e.key == "blur_radius") cfg.scene.spec.noise.blur_radius = int(parse_int(e, origin));
      else if (e.key == "temperature") cfg.scene.spec.noise.temperature = parse_double(e, origin);
      else if (e.key == "seed") cfg.scene.spec.seed = parse_u64(e, origin);
      else if (e.key == "min_fragment_px") cfg.scene.spec.min_fragment_px = int(parse_int(e, origin));
      else if (e.key == "max_fragments") cfg.scene.spec.max_fragments = int(parse_int(e, origin));
      else if (e.key == "downsample") cfg.scene.downsample = int(parse_int(e, origin));
      else unknown_field(e, origin);
    } else if (e.section == "layout") {
      if (e.key == "horizon_y") cfg.layout.horizon_y = int(parse_int(e, origin));
      else if (e.key == "large_size") cfg.layout.patch_sizes[0] = int(parse_int(e, origin));
      else if (e.key == "medium_size") cfg.layout.patch_sizes[1] = int(parse_int(e, origin));
      else if (e.key == "small_size") cfg.layout.patch_sizes[2] = int(parse_int(e, origin));
      else if (e.key == "large_stride") cfg.layout.strides[0] = int(parse_int(e, origin));
      else if (e.key == "medium_stride") cfg.layout.strides[1] = int(parse_int(e, origin));
      else if (e.key == "small_stride") cfg.layout.strides[2] = int(parse_int(e, origin));
      else if (e.key == "medium_band") cfg.layout.band_half_heights[1] = int(parse_int(e, origin));
      else if (e.key == "small_band") cfg.layout.band_half_heights[2] = int(parse_int(e, origin));
      else unknown_field(e, origin);
    } else if (e.section == "energy") {
      if (e.key == "lambda_cnn") cfg.energy.weights.lambda_cnn = parse_double(e, origin);
      else if (e.key == "lambda_cco") cfg.energy.weights.lambda_cco = parse_double(e, origin);
      else if (e.key == "lambda_long") cfg.energy.weights.lambda_long = parse_double(e, origin);
      else if (e.key == "lambda_short") cfg.energy.weights.lambda_short = parse_double(e, origin);
      else if (e.key == "long_edge_samples") cfg.energy.long_edge_samples = int(parse_int(e, origin));
      else if (e.key == "seed") cfg.energy.seed = parse_u64(e, origin);
      else if (e.key == "n_max") cfg.energy.n_max = int(parse_int(e, origin));
      else unknown_field(e, origin);
    } else if (e.section == "inference") {
      if (e.key == "max_sweeps") cfg.inference.max_sweeps = int(parse_int(e, origin));
      else if (e.key == "epsilon") cfg.inference.epsilon = parse_double(e, origin);
      else unknown_field(e, origin);
    } else if (e.section == "postprocess") {
      if (e.key == "min_size") cfg.postprocess.min_size = int(parse_int(e, origin));
      else unknown_field(e, origin);
    } else if (e.section == "metrics") {
      if (e.key == "sample_frac") cfg.metrics.sample_frac = parse_double(e, origin);
      else if (e.key == "seed") cfg.metrics.seed = parse_u64(e, origin);
      else unknown_field(e, origin);
    } else {
      throw ConfigError(origin + ":" + std::to_string(e.line) + ": key '" + e.key +
                        "' outside of any section");
    }
  }

  if (cfg.scene.count < 1) throw ConfigError(origin + ": scene.count must be >= 1");
  if (cfg.scene.spec.n_instances < 0 || cfg.scene.spec.n_instances > cfg.energy.n_max) {
    throw ConfigError(origin + ": scene.n_instances must lie in [0, n_max=" +
                      std::to_string(cfg.energy.n_max) + "]");
  }
  if (cfg.scene.downsample < 1) throw ConfigError(origin + ": scene.downsample must be >= 1");
  if (cfg.energy.n_max < 1 || cfg.energy.n_max > 255) {
    throw ConfigError(origin + ": energy.n_max must lie in [1, 255]");
  }
  if (cfg.inference.max_sweeps < 1) throw ConfigError(origin + ": inference.max_sweeps must be >= 1");
  if (cfg.metrics.sample_frac <= 0.0) throw ConfigError(origin + ": metrics.sample_frac must be > 0");
  cfg.scene.spec.n_max = cfg.energy.n_max;
  return cfg;
}

RunConfig load_run_config(const fs::path& path) {
  return parse_run_config(slurp(path), path.string());
}

void write_run_config(const fs::path& path, const RunConfig& cfg) {
  std::ostringstream out;
  out << "# patchfuse run configuration\n";
  out << "[scene]\n";
  out << "count = " << cfg.scene.count << "\n";
  out << "width = " << cfg.scene.spec.image_w << "\n";
  out << "height = " << cfg.scene.spec.image_h << "\n";
  out << "n_instances = " << cfg.scene.spec.n_instances << "\n";
  out << "min_side = " << cfg.scene.spec.min_side << "\n";
  out << "max_side = " << cfg.scene.spec.max_side << "\n";
  out << "label_flip_prob = " << cfg.scene.spec.noise.label_flip_prob << "\n";
  out << "blur_radius = " << cfg.scene.spec.noise.blur_radius << "\n";
  out << "temperature = " << cfg.scene.spec.noise.temperature << "\n";
  out << "seed = " << cfg.scene.spec.seed << "\n";
  out << "min_fragment_px = " << cfg.scene.spec.min_fragment_px << "\n";
  out << "max_fragments = " << cfg.scene.spec.max_fragments << "\n";
  out << "downsample = " << cfg.scene.downsample << "\n";
  out << "\n[layout]\n";
  out << "horizon_y = " << cfg.layout.horizon_y << "\n";
  out << "large_size = " << cfg.layout.patch_sizes[0] << "\n";
  out << "medium_size = " << cfg.layout.patch_sizes[1] << "\n";
  out << "small_size = " << cfg.layout.patch_sizes[2] << "\n";
  out << "large_stride = " << cfg.layout.strides[0] << "\n";
  out << "medium_stride = " << cfg.layout.strides[1] << "\n";
  out << "small_stride = " << cfg.layout.strides[2] << "\n";
  out << "medium_band = " << cfg.layout.band_half_heights[1] << "\n";
  out << "small_band = " << cfg.layout.band_half_heights[2] << "\n";
  out << "\n[energy]\n";
  out << "lambda_cnn = " << cfg.energy.weights.lambda_cnn << "\n";
  out << "lambda_cco = " << cfg.energy.weights.lambda_cco << "\n";
  out << "lambda_long = " << cfg.energy.weights.lambda_long << "\n";
  out << "lambda_short = " << cfg.energy.weights.lambda_short << "\n";
  out << "long_edge_samples = " << cfg.energy.long_edge_samples << "\n";
  out << "seed = " << cfg.energy.seed << "\n";
  out << "n_max = " << cfg.energy.n_max << "\n";
  out << "\n[inference]\n";
  out << "max_sweeps = " << cfg.inference.max_sweeps << "\n";
  out << "epsilon = " << cfg.inference.epsilon << "\n";
  out << "\n[postprocess]\n";
  out << "min_size = " << cfg.postprocess.min_size << "\n";
  out << "\n[metrics]\n";
  out << "sample_frac = " << cfg.metrics.sample_frac << "\n";
  out << "seed = " << cfg.metrics.seed << "\n";
  write_file_atomic(path, out.str());
}

// ---------------------------------------------------------------- manifest

void write_manifest(const fs::path& path, const Manifest& m) {
  std::ostringstream out;
  out << "# patchfuse patch manifest\n";
  out << "image_width = " << m.image_w << "\n";
  out << "image_height = " << m.image_h << "\n";
  out << "n_max = " << m.n_max << "\n";
  for (const ManifestEntry& e : m.patches) {
    out << "\n[patch]\n";
    out << "id = " << e.id << "\n";
    out << "scale = " << to_string(e.scale) << "\n";
    out << "rect = " << e.rect.x0 << " " << e.rect.y0 << " " << e.rect.w << " " << e.rect.h
        << "\n";
    out << "tensor = " << e.tensor_file << "\n";
  }
  write_file_atomic(path, out.str());
}

Manifest read_manifest(const fs::path& path) {
  const std::string origin = path.string();
  Manifest m;
  bool in_patch = false;
  for (const IniEntry& e : parse_ini(slurp(path), origin)) {
    if (e.key.empty()) {
      if (e.section != "patch") {
        throw FormatError(origin + ":" + std::to_string(e.line) + ": unknown section [" +
                          e.section + "]");
      }
      m.patches.emplace_back();
      m.patches.back().id = int(m.patches.size()) - 1;
      in_patch = true;
      continue;
    }
    try {
      if (!in_patch) {
        if (e.key == "image_width") m.image_w = int(parse_int(e, origin));
        else if (e.key == "image_height") m.image_h = int(parse_int(e, origin));
        else if (e.key == "n_max") m.n_max = int(parse_int(e, origin));
        else unknown_field(e, origin);
      } else {
        ManifestEntry& entry = m.patches.back();
        if (e.key == "id") entry.id = int(parse_int(e, origin));
        else if (e.key == "scale") entry.scale = scale_from_string(e.value);
        else if (e.key == "tensor") entry.tensor_file = e.value;
        else if (e.key == "rect") {
          std::istringstream vs(e.value);
          if (!(vs >> entry.rect.x0 >> entry.rect.y0 >> entry.rect.w >> entry.rect.h)) {
            throw FormatError(origin + ":" + std::to_string(e.line) + ": rect expects 4 integers");
          }
        } else {
          unknown_field(e, origin);
        }
      }
    } catch (const ConfigError& err) {
      throw FormatError(err.what());
    }
  }
  if (m.image_w <= 0 || m.image_h <= 0) {
    throw FormatError(origin + ": missing or invalid image dimensions");
  }
  for (const ManifestEntry& e : m.patches) {
    if (!e.rect.inside_image(m.image_w, m.image_h)) {
      throw FormatError(origin + ": patch " + std::to_string(e.id) + " lies outside the image");
    }
    if (e.tensor_file.empty()) {
      throw FormatError(origin + ": patch " + std::to_string(e.id) + " has no tensor file");
    }
  }
  return m;
}

std::vector<PatchPrediction> load_patches(const fs::path& manifest_path, const Manifest& m) {
  const fs::path dir = manifest_path.parent_path();
  std::vector<PatchPrediction> preds;
  preds.reserve(m.patches.size());
  for (const ManifestEntry& e : m.patches) {
    PatchPrediction p;
    p.spec.rect = e.rect;
    p.spec.scale = e.scale;
    p.probs = read_prob_tensor(dir / e.tensor_file);
    if (p.probs.width() > e.rect.w || p.probs.height() > e.rect.h) {
      throw FormatError(e.tensor_file + ": tensor larger than the patch footprint");
    }
    preds.push_back(std::move(p));
  }
  return preds;
}

// ---------------------------------------------------------------- reports

namespace {

void report_lines(const MetricsReport& r, std::ostringstream& out) {
  out << "class.fiou: " << r.class_level.fiou << "\n";
  out << "class.biou: " << r.class_level.biou << "\n";
  out << "class.avg_iou: " << r.class_level.avg_iou << "\n";
  out << "class.acc: " << r.class_level.acc << "\n";
  out << "class.ovrl_pr: " << r.class_level.ovrl_pr << "\n";
  out << "class.ovrl_re: " << r.class_level.ovrl_re << "\n";
  out << "instance.mwcov: " << r.instance_level.mwcov << "\n";
  out << "instance.mucov: " << r.instance_level.mucov << "\n";
  out << "instance.avg_pr: " << r.instance_level.avg_pr << "\n";
  out << "instance.avg_re: " << r.instance_level.avg_re << "\n";
  out << "instance.avg_fp: " << r.instance_level.avg_fp << "\n";
  out << "instance.avg_fn: " << r.instance_level.avg_fn << "\n";
  out << "instance.obj_pr: " << r.instance_level.obj_pr << "\n";
  out << "instance.obj_re: " << r.instance_level.obj_re << "\n";
  out << "instance.n_pred: " << r.instance_level.n_pred_instances << "\n";
  out << "instance.n_gt: " << r.instance_level.n_gt_instances << "\n";
  out << "depth.n_ins: " << r.depth.n_ins << "\n";
  out << "depth.pct_rcld_ins: " << r.depth.pct_rcld_ins << "\n";
  out << "depth.n_ins_pair: " << r.depth.n_ins_pair << "\n";
  out << "depth.pct_rcld_ins_pair: " << r.depth.pct_rcld_ins_pair << "\n";
  out << "depth.ins_pair_acc: " << r.depth.ins_pair_acc << "\n";
  out << "depth.pct_corr_pxl_pair_fgr: " << r.depth.pct_corr_pxl_pair_fgr << "\n";
}

}  // namespace

std::string report_text(const MetricsReport& r) {
  std::ostringstream out;
  out.precision(10);
  report_lines(r, out);
  return out.str();
}

std::string report_json(const MetricsReport& r) {
  nlohmann::json j;
  j["class"] = {
      {"fiou", r.class_level.fiou},     {"biou", r.class_level.biou},
      {"avg_iou", r.class_level.avg_iou}, {"acc", r.class_level.acc},
      {"ovrl_pr", r.class_level.ovrl_pr}, {"ovrl_re", r.class_level.ovrl_re},
  };
  j["instance"] = {
      {"mwcov", r.instance_level.mwcov},
      {"mucov", r.instance_level.mucov},
      {"avg_pr", r.instance_level.avg_pr},
      {"avg_re", r.instance_level.avg_re},
      {"avg_fp", r.instance_level.avg_fp},
      {"avg_fn", r.instance_level.avg_fn},
      {"obj_pr", r.instance_level.obj_pr},
      {"obj_re", r.instance_level.obj_re},
      {"n_pred", r.instance_level.n_pred_instances},
      {"n_gt", r.instance_level.n_gt_instances},
      {"coverage_defined", r.instance_level.coverage_defined},
  };
  j["depth"] = {
      {"n_ins", r.depth.n_ins},
      {"pct_rcld_ins", r.depth.pct_rcld_ins},
      {"n_ins_pair", r.depth.n_ins_pair},
      {"pct_rcld_ins_pair", r.depth.pct_rcld_ins_pair},
      {"ins_pair_acc", r.depth.ins_pair_acc},
      {"pct_corr_pxl_pair_fgr", r.depth.pct_corr_pxl_pair_fgr},
  };
  return j.dump(2) + "\n";
}

}  // namespace patchfuse
