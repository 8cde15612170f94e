// patchfuse command line: generate synthetic scenes, fuse patch predictions
// into a depth-ordered instance labeling, evaluate against ground truth, and
// render label maps. Exit codes: 0 ok, 1 internal error, 2 input error.

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "patchfuse/io.hpp"
#include "patchfuse/parallel.hpp"
#include "patchfuse/rng.hpp"
#include "patchfuse/pipeline.hpp"
#include "patchfuse/postprocess.hpp"
#include "patchfuse/synthdata.hpp"

namespace fs = std::filesystem;
using namespace patchfuse;

namespace {

struct GenerateArgs {
  std::string config;
  std::string out_dir;
};

struct FuseArgs {
  std::string scene_dir;
  std::string config;
  std::string out_path;
  std::string log_path;
  bool no_pp = false;
};

struct EvalArgs {
  std::string pred_path;
  std::string gt_path;
  std::string report_path;
  std::string json_path;
  double sample_frac = -1.0;  // <0: use config default
  std::uint64_t seed = 0;
  bool have_seed = false;
};

struct RenderArgs {
  std::string input;
  std::string out_path;
};

std::string scene_name(int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "scene_%03d", index);
  return buf;
}

int run_generate(const GenerateArgs& args) {
  const RunConfig cfg = load_run_config(args.config);
  const fs::path out(args.out_dir);
  fs::create_directories(out);
  write_run_config(out / "config.ini", cfg);

  for (int i = 0; i < cfg.scene.count; ++i) {
    SceneSpec spec = cfg.scene.spec;
    spec.seed = Rng(cfg.scene.spec.seed).child(std::uint64_t(i)).next_u64();
    const Scene scene = generate_scene(spec);

    const fs::path dir = out / scene_name(i);
    fs::create_directories(dir);
    write_label_map(dir / "gt.lmap", scene.gt, cfg.energy.n_max);

    const LayoutConfig layout = cfg.layout.for_image(spec.image_w, spec.image_h);
    const auto preds = corrupt_to_patches(scene.gt, layout, spec.noise, cfg.scene.downsample,
                                          spec.seed ^ 0x9E3779B97F4A7C15ull);
    Manifest manifest;
    manifest.image_w = spec.image_w;
    manifest.image_h = spec.image_h;
    manifest.n_max = cfg.energy.n_max;
    for (std::size_t z = 0; z < preds.size(); ++z) {
      char name[32];
      std::snprintf(name, sizeof(name), "patch_%04zu.ptn", z);
      write_prob_tensor(dir / name, preds[z].probs);
      manifest.patches.push_back(
          {int(z), preds[z].spec.scale, preds[z].spec.rect, name});
    }
    write_manifest(dir / "manifest.txt", manifest);
    std::cout << scene_name(i) << ": " << preds.size() << " patches, "
              << spec.n_instances << " instances\n";
  }
  return 0;
}

int run_fuse(const FuseArgs& args) {
  const fs::path scene(args.scene_dir);
  const fs::path manifest_path = scene / "manifest.txt";
  const Manifest manifest = read_manifest(manifest_path);

  RunConfig cfg;
  if (!args.config.empty()) {
    cfg = load_run_config(args.config);
  } else if (fs::exists(scene / ".." / "config.ini")) {
    cfg = load_run_config(scene / ".." / "config.ini");
  }
  cfg.energy.n_max = manifest.n_max;

  std::vector<PatchPrediction> preds = load_patches(manifest_path, manifest);
  const FuseParams params = fuse_params_from(cfg, !args.no_pp);
  const FuseResult result = fuse(preds, manifest.image_w, manifest.image_h, params);

  const fs::path out = args.out_path.empty() ? scene / "pred.lmap" : fs::path(args.out_path);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  write_label_map(out, result.pred, params.n_max);

  std::ostringstream log;
  log << "patchfuse fuse log\n";
  log << "scene: " << scene.string() << "\n";
  log << "patches: " << preds.size() << "\n";
  log << "components: " << result.n_components << "\n";
  log << "long_edges: " << result.n_long_edges << "\n";
  log << "initial_energy: " << result.opt.initial_energy << "\n";
  for (std::size_t i = 0; i < result.opt.trace.size(); ++i) {
    log << "accepted_move " << i << " energy " << result.opt.trace[i] << "\n";
  }
  log << "final_energy: " << result.opt.final_energy << "\n";
  log << "sweeps: " << result.opt.sweeps_run << "\n";
  log << "moves_accepted: " << result.opt.moves_accepted << "\n";
  log << "postprocess: " << (result.postprocessed ? "applied" : "skipped") << "\n";
  const fs::path log_path =
      args.log_path.empty() ? fs::path(out.string() + ".log") : fs::path(args.log_path);
  write_file_atomic(log_path, log.str());

  std::cout << "fused " << preds.size() << " patches -> " << out.string() << " (energy "
            << result.opt.initial_energy << " -> " << result.opt.final_energy << ", "
            << result.opt.moves_accepted << " moves)\n";
  return 0;
}

std::vector<std::pair<fs::path, fs::path>> eval_pairs(const EvalArgs& args) {
  const fs::path pred(args.pred_path), gt(args.gt_path);
  if (fs::is_directory(pred) != fs::is_directory(gt)) {
    throw IoError("eval: pred and gt must both be files or both be directories");
  }
  if (!fs::is_directory(pred)) return {{pred, gt}};

  std::vector<fs::path> names;
  for (const auto& entry : fs::directory_iterator(pred)) {
    if (entry.path().extension() == ".lmap") names.push_back(entry.path().filename());
  }
  std::sort(names.begin(), names.end());
  if (names.empty()) throw IoError("eval: no .lmap files in " + pred.string());
  std::vector<std::pair<fs::path, fs::path>> pairs;
  for (const auto& name : names) {
    const fs::path g = gt / name;
    if (!fs::exists(g)) throw IoError("eval: missing ground truth " + g.string());
    pairs.push_back({pred / name, g});
  }
  return pairs;
}

int run_eval(const EvalArgs& args) {
  const double frac = args.sample_frac > 0 ? args.sample_frac : 0.05;
  const std::uint64_t seed = args.have_seed ? args.seed : 11;

  std::vector<MetricsReport> reports;
  std::ostringstream text;
  text.precision(10);
  for (const auto& [pred_path, gt_path] : eval_pairs(args)) {
    const LabelMapFile pred = read_label_map(pred_path);
    const LabelMapFile gt = read_label_map(gt_path);
    if (!pred.map.same_dims(gt.map)) {
      throw DimensionError("eval: " + pred_path.string() + " and " + gt_path.string() +
                           " have different dimensions");
    }
    reports.push_back(evaluate(pred.map, gt.map, frac, seed));
    if (reports.size() > 1 || fs::is_directory(args.pred_path)) {
      text << "# image: " << pred_path.filename().string() << "\n";
    }
    text << report_text(reports.back());
  }

  MetricsReport final_report = reports.back();
  if (reports.size() > 1) {
    final_report = aggregate(reports);
    text << "# aggregate over " << reports.size() << " images\n";
    text << report_text(final_report);
  }

  std::cout << text.str();
  if (!args.report_path.empty()) write_file_atomic(args.report_path, text.str());
  if (!args.json_path.empty()) write_file_atomic(args.json_path, report_json(final_report));
  return 0;
}

int run_render(const RenderArgs& args) {
  const LabelMapFile in = read_label_map(args.input);
  write_ppm(args.out_path, in.map);
  std::cout << "rendered " << args.input << " -> " << args.out_path << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fuse multi-scale instance/depth patch predictions into one labeling"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* cmd_gen = app.add_subcommand("generate", "write synthetic scenes, patches and manifests");
  cmd_gen->add_option("--config", gen.config, "run config (ini)")->required();
  cmd_gen->add_option("--out", gen.out_dir, "output directory")->required();

  FuseArgs fuse_args;
  auto* cmd_fuse = app.add_subcommand("fuse", "fuse one scene directory into pred.lmap");
  cmd_fuse->add_option("--scene", fuse_args.scene_dir, "scene directory with manifest.txt")
      ->required();
  cmd_fuse->add_option("--config", fuse_args.config, "run config (default: <scene>/../config.ini)");
  cmd_fuse->add_option("--out", fuse_args.out_path, "output label map (default: <scene>/pred.lmap)");
  cmd_fuse->add_option("--log", fuse_args.log_path, "run log path (default: <out>.log)");
  cmd_fuse->add_flag("--no-pp", fuse_args.no_pp, "skip post-processing");

  EvalArgs eval_args;
  auto* cmd_eval = app.add_subcommand("eval", "evaluate predictions against ground truth");
  cmd_eval->add_option("pred", eval_args.pred_path, "prediction .lmap or directory")->required();
  cmd_eval->add_option("gt", eval_args.gt_path, "ground-truth .lmap or directory")->required();
  cmd_eval->add_option("--report", eval_args.report_path, "write the text report here");
  cmd_eval->add_option("--json", eval_args.json_path, "write the machine-readable report here");
  cmd_eval->add_option("--sample-frac", eval_args.sample_frac, "pixel-pair sample fraction");
  cmd_eval->add_option("--seed", eval_args.seed, "pixel-pair sampling seed")
      ->each([&](const std::string&) { eval_args.have_seed = true; });

  RenderArgs render_args;
  auto* cmd_render = app.add_subcommand("render", "render a label map to a portable pixmap");
  cmd_render->add_option("input", render_args.input, "input .lmap")->required();
  cmd_render->add_option("--out", render_args.out_path, "output .ppm")->required();

  int threads = 0;
  app.add_option("--threads", threads, "worker thread cap (0 = hardware)");

  try {
    app.parse(argc, argv);
    set_max_threads(threads);
    if (cmd_gen->parsed()) return run_generate(gen);
    if (cmd_fuse->parsed()) return run_fuse(fuse_args);
    if (cmd_eval->parsed()) return run_eval(eval_args);
    if (cmd_render->parsed()) return run_render(render_args);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 1;
  }
}
