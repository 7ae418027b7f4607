// faceprop: command-line front end for face proposal generation and evaluation.
//
// Exit codes: 0 success, 2 malformed input file, 3 contract violation.

#include <algorithm>
#include <exception>
#include <filesystem>
#include <iostream>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "faceness/eval.hpp"
#include "faceness/io.hpp"
#include "faceness/nms.hpp"
#include "faceness/pipeline.hpp"
#include "faceness/regress.hpp"
#include "faceness/scoring.hpp"
#include "faceness/synth.hpp"
#include "faceness/tuning.hpp"

namespace fs = std::filesystem;
using namespace faceness;

namespace {

constexpr int kExitMalformed = 2;
constexpr int kExitContract = 3;

std::string scene_stem(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "scene_%04zu", i);
  return buf;
}

// Stems of `<stem>.fpm` files that have a matching `<stem>.json`, sorted.
std::vector<std::string> scene_stems(const fs::path& dir) {
  std::vector<std::string> stems;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() != ".fpm") continue;
    fs::path ann = e.path();
    ann.replace_extension(".json");
    if (fs::exists(ann)) stems.push_back(e.path().stem().string());
  }
  std::sort(stems.begin(), stems.end());
  return stems;
}

std::vector<TrainingScene> load_scenes(const fs::path& dir) {
  std::vector<TrainingScene> scenes;
  for (const auto& stem : scene_stems(dir)) {
    scenes.push_back({io::read_fpm(dir / (stem + ".fpm")), io::read_annotation(dir / (stem + ".json"))});
  }
  if (scenes.empty()) throw Error(ErrorKind::MalformedInput, "no scenes found in " + dir.string());
  return scenes;
}

io::ConfigFile load_config(const std::string& path) {
  return path.empty() ? io::ConfigFile{} : io::read_config(path);
}

int run_gen(const std::string& spec_path, const fs::path& out_dir, std::size_t n_scenes, unsigned jobs) {
  const SceneSpec spec = io::scene_spec_from_json(io::read_text(spec_path));
  fs::create_directories(out_dir);
  jobs = std::max(1u, jobs);
  // Scene i is seeded with spec.seed + i, so the output does not depend on `jobs`.
  std::vector<std::exception_ptr> failures(jobs);
  auto work = [&](unsigned worker) {
    try {
      for (std::size_t i = worker; i < n_scenes; i += jobs) {
        SceneSpec s = spec;
        s.seed = spec.seed + i;
        const Scene scene = generate_scene(s);
        io::write_fpm(out_dir / (scene_stem(i) + ".fpm"), scene.maps);
        io::write_annotation(out_dir / (scene_stem(i) + ".json"), scene.truth);
      }
    } catch (...) {
      failures[worker] = std::current_exception();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < jobs; ++w) pool.emplace_back(work, w);
    work(0);
  }
  for (const auto& f : failures)
    if (f) std::rethrow_exception(f);
  return 0;
}

int run_propose(const std::string& maps_path, const std::string& config_path, const std::string& candidates_path,
                std::size_t top_n, const std::string& out_path) {
  io::ConfigFile cfg = load_config(config_path);
  if (top_n > 0) cfg.pipeline.top_n = top_n;
  const MapSet maps = io::read_fpm(maps_path);
  io::CandidateFile ext;
  if (!candidates_path.empty()) ext = io::read_candidates(candidates_path);
  const auto props = propose(maps, cfg.pipeline, ext.windows, ext.scores);
  io::write_proposals(out_path, props);
  return 0;
}

// Positives are visible-part face boxes; negatives are that part's template
// windows overlapping no face by more than 0.3, capped at three per positive.
std::vector<LambdaSample> lambda_samples(const std::vector<TrainingScene>& scenes,
                                         const std::vector<IntegralMap>& integrals, PartId part,
                                         const PipelineConfig& pc) {
  std::vector<LambdaSample> samples;
  for (std::size_t s = 0; s < scenes.size(); ++s) {
    const auto& truth = scenes[s].truth;
    const IntegralMap& im = integrals[s];
    const double inv = 1.0 / pc.stride;
    auto to_map = [inv](const Window& w) { return Window{w.x1 * inv, w.y1 * inv, w.x2 * inv, w.y2 * inv}; };
    std::size_t positives = 0;
    for (const auto& face : truth.faces) {
      if (face.occluded_parts.contains(part)) continue;
      const Window box = clip_window(face.face_box, static_cast<double>(truth.width), static_cast<double>(truth.height));
      samples.push_back({to_map(box), 1, std::cref(im)});
      ++positives;
    }
    const SceneMaps scene(MapSet{{part, scenes[s].maps.at(part)}}, pc.stride);
    const auto candidates = template_proposals(scene, {{part, pc.templates.at(part)}});
    std::size_t negatives = 0;
    for (const auto& c : candidates) {
      if (negatives >= 3 * std::max<std::size_t>(positives, 1)) break;
      bool near_face = false;
      for (const auto& face : truth.faces) near_face = near_face || iou(c.window, face.face_box) > 0.3;
      if (near_face) continue;
      samples.push_back({to_map(c.window), 0, std::cref(im)});
      ++negatives;
    }
  }
  return samples;
}

int run_learn_lambda(const fs::path& train_dir, const std::string& part_name_arg, double alpha, double grid_step,
                     const std::string& config_path, const std::string& out_path) {
  io::ConfigFile cfg = load_config(config_path);
  const PartId part = parse_part(part_name_arg);
  const auto scenes = load_scenes(train_dir);
  std::vector<IntegralMap> integrals;
  integrals.reserve(scenes.size());
  for (const auto& s : scenes) integrals.push_back(build_integral(s.maps.at(part)));
  const auto samples = lambda_samples(scenes, integrals, part, cfg.pipeline);
  const SpatialConfig learned = learn_lambda(samples, part, alpha, grid_step, cfg.pipeline.faceness.epsilon);
  cfg.pipeline.faceness.configs[part] = learned;
  cfg.pipeline.faceness.alpha = alpha;
  cfg.grid_step = grid_step;
  io::write_config(out_path, cfg);
  std::cout << part_name(part) << " band [" << learned.band_lo << ", " << learned.band_hi << ")\n";
  return 0;
}

int run_tune(const fs::path& train_dir, std::size_t n, const std::string& config_path, TemplateSearchSpace space,
             const std::string& out_path) {
  io::ConfigFile cfg = load_config(config_path);
  const auto scenes = load_scenes(train_dir);
  cfg.pipeline.templates = tune_templates(scenes, space, n, cfg.pipeline);
  io::write_config(out_path, cfg);
  for (const auto& [part, spec] : cfg.pipeline.templates) {
    std::cout << part_name(part) << " anchor (" << spec.anchor_x << ", " << spec.anchor_y << ") t=" << spec.threshold
              << " M=" << spec.max_locations << "\n";
  }
  return 0;
}

int run_encode_targets(const std::string& props_path, const std::string& gt_path, const std::string& config_path,
                       const std::string& out_path) {
  const io::ConfigFile cfg = load_config(config_path);
  const auto props = io::read_proposals(props_path);
  const auto truth = io::read_annotation(gt_path);
  std::vector<Window> windows;
  for (const auto& p : props) windows.push_back(p.window);
  const auto gts = truth.face_boxes();
  std::vector<io::TargetRecord> records;
  for (const auto& a : assign(windows, gts, cfg.assign_iou)) {
    io::TargetRecord r{a, RegressionTarget::sentinel(), "negative"};
    if (a.positive) {
      try {
        r.target = encode(gts[*a.gt], windows[a.proposal]);
        r.status = "positive";
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::OutOfRange) throw;
        r.status = "out_of_range";
      }
    }
    records.push_back(r);
  }
  io::write_text_atomic(out_path, io::targets_to_json(records));
  return 0;
}

int run_eval(const fs::path& props_dir, const fs::path& gt_dir, const std::string& curve, double iou_thresh,
             const std::string& out_path) {
  std::vector<std::string> stems;
  for (const auto& e : fs::directory_iterator(gt_dir)) {
    if (e.path().extension() == ".json" && fs::exists(props_dir / e.path().filename()))
      stems.push_back(e.path().stem().string());
  }
  std::sort(stems.begin(), stems.end());
  if (stems.empty()) throw Error(ErrorKind::MalformedInput, "no matching proposal/annotation files");

  std::vector<std::vector<Proposal>> props;
  std::vector<SceneGroundTruth> gts;
  for (const auto& stem : stems) {
    props.push_back(io::read_proposals(props_dir / (stem + ".json")));
    gts.push_back(io::read_annotation(gt_dir / (stem + ".json")));
  }

  if (curve == "pr") {
    std::vector<ScoredDetection> dets;
    for (std::size_t s = 0; s < props.size(); ++s)
      for (const auto& p : props[s]) dets.push_back({p.window, p.faceness, s});
    const PrCurve pr = pr_curve(dets, gts, iou_thresh);
    io::write_text_atomic(out_path, io::pr_csv(pr));
    std::cout << "AP " << pr.ap << "\n";
    return 0;
  }
  std::size_t max_n = 1;
  for (const auto& p : props) max_n = std::max(max_n, p.size());
  std::vector<std::size_t> ns(max_n);
  for (std::size_t i = 0; i < max_n; ++i) ns[i] = i + 1;
  const auto points = dr_curve(props, gts, ns, iou_thresh);
  io::write_text_atomic(out_path, io::dr_csv(points));
  std::cout << "DR@" << max_n << " " << points.back().detection_rate << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Face proposals from partness maps"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("gen", "Generate synthetic scenes");
  std::string gen_spec;
  std::string gen_out;
  std::size_t gen_scenes = 1;
  unsigned gen_jobs = 1;
  gen->add_option("--spec", gen_spec, "Scene spec JSON")->required();
  gen->add_option("--out-dir", gen_out, "Output directory")->required();
  gen->add_option("--scenes", gen_scenes, "Number of scenes")->default_val(1);
  gen->add_option("--jobs", gen_jobs, "Worker threads")->default_val(1);

  auto* prop = app.add_subcommand("propose", "Rank face proposals for one scene");
  std::string prop_maps;
  std::string prop_config;
  std::string prop_candidates;
  std::size_t prop_top_n = 0;
  std::string prop_out;
  prop->add_option("--maps", prop_maps, "FPM map file")->required();
  prop->add_option("--config", prop_config, "Config JSON");
  prop->add_option("--candidates", prop_candidates, "External candidate windows JSON");
  prop->add_option("--top-n", prop_top_n, "Number of proposals (overrides config)");
  prop->add_option("--out", prop_out, "Output proposals JSON")->required();

  auto* learn = app.add_subcommand("learn-lambda", "Learn one part's band configuration");
  std::string learn_dir;
  std::string learn_part;
  double learn_alpha = 1.0;
  double learn_step = 0.02;
  std::string learn_config;
  std::string learn_out;
  learn->add_option("--train-dir", learn_dir, "Directory of scene_*.fpm/json pairs")->required();
  learn->add_option("--part", learn_part, "hair|eye|nose|mouth|beard")->required();
  learn->add_option("--alpha", learn_alpha, "Sigmoid coefficient")->default_val(1.0);
  learn->add_option("--grid-step", learn_step, "Band grid step")->default_val(0.02);
  learn->add_option("--config", learn_config, "Base config JSON");
  learn->add_option("--out", learn_out, "Output config JSON")->required();

  auto* tune = app.add_subcommand("tune-templates", "Grid-search template parameters");
  std::string tune_dir;
  std::size_t tune_n = 200;
  std::string tune_config;
  std::string tune_out;
  TemplateSearchSpace space{{0.4, 0.5, 0.6}, {0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}, {0.5}, {70}};
  tune->add_option("--train-dir", tune_dir, "Directory of scene_*.fpm/json pairs")->required();
  tune->add_option("--n", tune_n, "Target proposals per image")->default_val(200);
  tune->add_option("--config", tune_config, "Base config JSON");
  tune->add_option("--anchor-x", space.anchor_x, "Anchor x grid");
  tune->add_option("--anchor-y", space.anchor_y, "Anchor y grid");
  tune->add_option("--threshold", space.threshold, "Threshold grid");
  tune->add_option("--max-locations", space.max_locations, "Peak cap grid");
  tune->add_option("--out", tune_out, "Output config JSON")->required();

  auto* enc = app.add_subcommand("encode-targets", "Assign proposals and encode regression targets");
  std::string enc_props;
  std::string enc_gt;
  std::string enc_config;
  std::string enc_out;
  enc->add_option("--props", enc_props, "Proposals JSON")->required();
  enc->add_option("--gt", enc_gt, "Annotation JSON")->required();
  enc->add_option("--config", enc_config, "Config JSON");
  enc->add_option("--out", enc_out, "Output targets JSON")->required();

  auto* ev = app.add_subcommand("eval", "Detection-rate or precision/recall curves");
  std::string ev_props;
  std::string ev_gt;
  std::string ev_curve = "dr";
  double ev_iou = 0.5;
  std::string ev_out;
  ev->add_option("--props-dir", ev_props, "Directory of proposal JSON files")->required();
  ev->add_option("--gt-dir", ev_gt, "Directory of annotation JSON files")->required();
  ev->add_option("--curve", ev_curve, "dr|pr")->check(CLI::IsMember({"dr", "pr"}))->default_val("dr");
  ev->add_option("--iou", ev_iou, "IoU threshold")->default_val(0.5);
  ev->add_option("--out", ev_out, "Output CSV")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) return run_gen(gen_spec, gen_out, gen_scenes, gen_jobs);
    if (*prop) return run_propose(prop_maps, prop_config, prop_candidates, prop_top_n, prop_out);
    if (*learn) return run_learn_lambda(learn_dir, learn_part, learn_alpha, learn_step, learn_config, learn_out);
    if (*tune) return run_tune(tune_dir, tune_n, tune_config, space, tune_out);
    if (*enc) return run_encode_targets(enc_props, enc_gt, enc_config, enc_out);
    if (*ev) return run_eval(ev_props, ev_gt, ev_curve, ev_iou, ev_out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_input_error(e.kind()) ? kExitMalformed : kExitContract;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitMalformed;
  }
  return 0;
}
