/* Copyright 2026 The LAAR Authors.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "laar/cli.h"

#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "laar/dataio.h"
#include "laar/errors.h"

#ifndef LAAR_VERSION
#define LAAR_VERSION "0.0.0"
#endif

namespace laar::cli {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

template <typename T>
void ReadKey(const json& doc, const char* key, T& field, const char* section) {
  auto it = doc.find(key);
  if (it == doc.end() || it->is_null()) return;
  try {
    field = it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(std::string(section) + "." + key + " has the wrong type");
  }
}

template <typename T>
void ReadPair(const json& doc, const char* key, T& first, T& second,
              const char* section) {
  std::vector<T> v;
  ReadKey(doc, key, v, section);
  if (v.empty()) return;
  if (v.size() != 2) {
    throw ConfigError(std::string(section) + "." + key + " needs two values");
  }
  first = v[0];
  second = v[1];
}

const json& Section(const json& doc, const char* key) {
  static const json kEmpty = json::object();
  auto it = doc.find(key);
  if (it == doc.end()) return kEmpty;
  if (!it->is_object()) {
    throw ConfigError(std::string("config section '") + key + "' must be an object");
  }
  return *it;
}

NmsConfig NmsFromJson(const json& doc, NmsConfig nms) {
  std::string mode;
  ReadKey(doc, "mode", mode, "nms");
  if (!mode.empty()) nms.mode = ParseNmsMode(mode);
  ReadKey(doc, "epsilon", nms.epsilon, "nms");
  ReadKey(doc, "top_k", nms.top_k, "nms");
  ReadKey(doc, "per_class", nms.per_class, "nms");
  ReadKey(doc, "score_floor", nms.score_floor, "nms");
  return nms;
}

json NmsToJson(const NmsConfig& nms) {
  return {{"mode", NmsModeName(nms.mode)},
          {"epsilon", nms.epsilon},
          {"top_k", nms.top_k},
          {"per_class", nms.per_class},
          {"score_floor", nms.score_floor}};
}

EvalConfig EvalFromJson(const json& doc) {
  std::string preset = "coco";
  ReadKey(doc, "preset", preset, "eval");
  EvalConfig eval;
  if (preset == "coco") {
    eval = EvalConfig::Coco();
  } else if (preset == "voc") {
    eval = EvalConfig::Voc();
  } else {
    throw ConfigError("eval.preset must be coco or voc");
  }
  ReadKey(doc, "iou_thresholds", eval.iou_thresholds, "eval");
  std::string interp;
  ReadKey(doc, "interpolation", interp, "eval");
  if (!interp.empty()) eval.interpolation = ParseInterpolation(interp);
  ReadKey(doc, "max_dets_per_image", eval.max_dets_per_image, "eval");
  return eval;
}

std::vector<NmsConfig> DefaultCompareModes(const NmsConfig& base) {
  std::vector<NmsConfig> modes;
  for (NmsMode m : {NmsMode::kBaseline, NmsMode::kLaar, NmsMode::kLaarCluster}) {
    NmsConfig c = base;
    c.mode = m;
    modes.push_back(c);
  }
  return modes;
}

std::vector<NmsConfig> ModesFromNames(const std::vector<std::string>& names,
                                      const NmsConfig& base) {
  std::vector<NmsConfig> modes;
  for (const std::string& n : names) {
    NmsConfig c = base;
    c.mode = ParseNmsMode(n);
    modes.push_back(c);
  }
  return modes;
}

Metadata MakeMetadata(const RunConfig& cfg) {
  Metadata meta;
  meta.version = LAAR_VERSION;
  meta.config = cfg.ToJson();
  meta.config_hash = ConfigHash(meta.config);
  meta.seed = cfg.sim.seed;
  return meta;
}

// Values given on the command line; unset ones leave the config alone.
struct Overrides {
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";

  std::string mode;
  std::string modes;
  double epsilon = 0.0;
  int top_k = 0;
  bool per_class = true;
  double score_floor = 0.0;

  int images = 0;
  double alpha = 0.0;
  double sigma_lc = 0.0;
  double jitter = 0.0;

  std::string preset;
  std::string interpolation;
  int max_dets = 0;

  std::string proposals;
  std::string detections;
  std::string annotations;
};

class Tool {
 public:
  Tool(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  int Main(int argc, const char* const* argv) {
    CLI::App app{"Location-aware anchor-based box reasoning toolkit"};
    app.name("laar");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(LAAR_VERSION));
    seed_opt_ = app.add_option("--seed", o_.seed, "Simulation seed");
    app.add_option("--config", o_.config_path, "JSON run configuration")
        ->check(CLI::ExistingFile);
    app.add_option("--out", o_.out_dir, "Output directory")->capture_default_str();

    auto* anchors = app.add_subcommand("anchors", "Write the anchor grid");
    auto* simulate = app.add_subcommand("simulate", "Write synthetic annotations and proposals");
    auto* nms = app.add_subcommand("nms", "Suppress proposals into detections");
    auto* eval = app.add_subcommand("eval", "Evaluate detections against annotations");
    auto* compare = app.add_subcommand("compare", "Compare suppression modes on one simulation");

    for (auto* sub : {nms, compare}) {
      opts_.epsilon.push_back(sub->add_option("--epsilon", o_.epsilon, "IoU suppression threshold"));
      opts_.top_k.push_back(sub->add_option("--top-k", o_.top_k, "Detections kept per image"));
      opts_.per_class.push_back(sub->add_option("--per-class", o_.per_class, "Per-class suppression (true/false)"));
      opts_.score_floor.push_back(sub->add_option("--score-floor", o_.score_floor, "Pre-suppression class score floor, 0 disables"));
    }
    opts_.mode = nms->add_option("--mode", o_.mode, "baseline | laar | laar-cluster");
    opts_.modes = compare->add_option("--modes", o_.modes, "Comma-separated modes");
    nms->add_option("--proposals", o_.proposals, "Proposal file (default <out>/proposals.json)");

    for (auto* sub : {simulate, compare}) {
      opts_.images.push_back(sub->add_option("--images", o_.images, "Number of images"));
      opts_.alpha.push_back(sub->add_option("--alpha", o_.alpha, "Score alignment in [0, 1]"));
      opts_.sigma_lc.push_back(sub->add_option("--sigma-lc", o_.sigma_lc, "Locscore noise sigma"));
      opts_.jitter.push_back(sub->add_option("--jitter", o_.jitter, "Jitter sigma"));
    }
    for (auto* sub : {eval, compare}) {
      opts_.preset.push_back(sub->add_option("--preset", o_.preset, "coco | voc"));
      opts_.interpolation.push_back(sub->add_option("--interpolation", o_.interpolation, "all_point | points_101 | points_11"));
      opts_.max_dets.push_back(sub->add_option("--max-dets", o_.max_dets, "Detections per image considered"));
    }
    eval->add_option("--detections", o_.detections, "Detection file (default <out>/detections.json)");
    eval->add_option("--annotations", o_.annotations, "Annotation file (default <out>/annotations.json)");

    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      const int code = app.exit(e, out_, err_);
      return code == 0 ? kExitOk : kExitUsage;
    }

    try {
      const RunConfig cfg = Resolve();
      if (anchors->parsed()) return CmdAnchors(cfg);
      if (simulate->parsed()) return CmdSimulate(cfg);
      if (nms->parsed()) return CmdNms(cfg);
      if (eval->parsed()) return CmdEval(cfg);
      if (compare->parsed()) return CmdCompare(cfg);
      return kExitUsage;
    } catch (const ConfigError& e) {
      err_ << "laar: config error: " << e.what() << "\n";
      return kExitUsage;
    } catch (const DataError& e) {
      err_ << "laar: data error: " << e.what() << "\n";
      return kExitData;
    } catch (const std::exception& e) {
      err_ << "laar: internal error: " << e.what() << "\n";
      return kExitInternal;
    }
  }

 private:
  struct OptionSets {
    std::vector<CLI::Option*> epsilon, top_k, per_class, score_floor;
    std::vector<CLI::Option*> images, alpha, sigma_lc, jitter;
    std::vector<CLI::Option*> preset, interpolation, max_dets;
    CLI::Option* mode = nullptr;
    CLI::Option* modes = nullptr;
  };

  static bool Given(const std::vector<CLI::Option*>& opts) {
    for (auto* o : opts) {
      if (o->count() > 0) return true;
    }
    return false;
  }

  RunConfig Resolve() {
    json doc = json::object();
    if (!o_.config_path.empty()) {
      try {
        doc = ReadJsonFile(o_.config_path);
      } catch (const DataError& e) {
        throw ConfigError(e.what());
      }
    }
    // Command-line values are written into the document so the resolved
    // config is produced by one code path.
    if (seed_opt_->count() > 0) doc["simulation"]["seed"] = o_.seed;
    if (Given(opts_.images)) doc["simulation"]["images"] = o_.images;
    if (Given(opts_.alpha)) doc["simulation"]["score_alignment"] = o_.alpha;
    if (Given(opts_.sigma_lc)) doc["simulation"]["locscore_noise_sigma"] = o_.sigma_lc;
    if (Given(opts_.jitter)) doc["simulation"]["jitter_sigma"] = o_.jitter;
    if (opts_.mode->count() > 0) doc["nms"]["mode"] = o_.mode;
    if (Given(opts_.epsilon)) doc["nms"]["epsilon"] = o_.epsilon;
    if (Given(opts_.top_k)) doc["nms"]["top_k"] = o_.top_k;
    if (Given(opts_.per_class)) doc["nms"]["per_class"] = o_.per_class;
    if (Given(opts_.score_floor)) doc["nms"]["score_floor"] = o_.score_floor;
    if (Given(opts_.preset)) {
      // A preset on the command line replaces file-level eval settings.
      doc["eval"] = json{{"preset", o_.preset}};
    }
    if (Given(opts_.interpolation)) doc["eval"]["interpolation"] = o_.interpolation;
    if (Given(opts_.max_dets)) doc["eval"]["max_dets_per_image"] = o_.max_dets;

    const bool modes_given = opts_.modes->count() > 0;
    if (modes_given) {
      std::vector<std::string> names;
      std::stringstream ss(o_.modes);
      for (std::string item; std::getline(ss, item, ',');) {
        if (!item.empty()) names.push_back(item);
      }
      doc["compare"]["modes"] = names;
    } else if (Given(opts_.epsilon) || Given(opts_.top_k) ||
               Given(opts_.per_class) || Given(opts_.score_floor)) {
      // Suppression flags apply to every compared mode.
      if (auto it = doc.find("compare"); it != doc.end() && it->contains("modes")) {
        for (json& m : (*it)["modes"]) {
          if (!m.is_object()) continue;
          for (const char* key : {"epsilon", "top_k", "per_class", "score_floor"}) {
            if (doc["nms"].contains(key)) m[key] = doc["nms"][key];
          }
        }
      }
    }
    RunConfig cfg = RunConfigFromJson(doc);
    cfg.Validate();
    return cfg;
  }

  fs::path OutPath(const std::string& name) const { return fs::path(o_.out_dir) / name; }

  fs::path InPath(const std::string& given, const std::string& fallback) const {
    return given.empty() ? OutPath(fallback) : fs::path(given);
  }

  int CmdAnchors(const RunConfig& cfg) {
    const AnchorGrid grid = GenerateAnchors(cfg.layout);
    const fs::path path = OutPath("anchors.json");
    WriteTextFile(path, DumpJson(AnchorsToJson(grid, MakeMetadata(cfg))));
    out_ << "anchors: " << grid.anchors.size() << " anchors over "
         << cfg.layout.levels.size() << " levels -> " << path.string() << "\n";
    return kExitOk;
  }

  int CmdSimulate(const RunConfig& cfg) {
    const AnchorGrid grid = GenerateAnchors(cfg.layout);
    SimOutput sim = Simulate(cfg.sim, grid);
    const Metadata meta = MakeMetadata(cfg);
    AnnotationSet ann{sim.scenes, NumberedCategories(cfg.sim.classes)};
    SaveAnnotations(ann, meta, OutPath("annotations.json"));
    ProposalSet props{std::move(sim.proposals), std::move(sim.provenance)};
    SaveProposals(props, meta, OutPath("proposals.json"));
    std::size_t n_gt = 0;
    for (const Scene& s : ann.scenes) n_gt += s.ground_truths.size();
    out_ << "simulate: " << ann.scenes.size() << " images, " << n_gt
         << " ground truths, " << props.proposals.size() << " proposals -> "
         << o_.out_dir << "\n";
    return kExitOk;
  }

  int CmdNms(const RunConfig& cfg) {
    const ProposalSet props = LoadProposals(InPath(o_.proposals, "proposals.json"));
    const std::vector<Detection> dets = SuppressAll(props.proposals, cfg.nms);
    const fs::path path = OutPath("detections.json");
    SaveDetections(SortedForOutput(dets), MakeMetadata(cfg), path);
    out_ << "nms (" << NmsModeName(cfg.nms.mode) << ", epsilon "
         << cfg.nms.epsilon << "): " << props.proposals.size() << " proposals -> "
         << dets.size() << " detections -> " << path.string() << "\n";
    return kExitOk;
  }

  int CmdEval(const RunConfig& cfg) {
    const auto dets = LoadDetections(InPath(o_.detections, "detections.json"));
    const auto ann = LoadAnnotations(InPath(o_.annotations, "annotations.json"));
    const EvalReport report = Evaluate(dets, ann.scenes, cfg.eval);
    const Metadata meta = MakeMetadata(cfg);
    WriteTextFile(OutPath("report.json"), DumpJson(ReportToJson(report, meta)));
    WriteTextFile(OutPath("report.csv"), ReportToCsv(report, meta));
    out_ << "eval: AP " << report.ap_mean << "  AP50 " << report.ap_50
         << "  AP75 " << report.ap_75 << "  APs " << report.ap_small
         << "  APm " << report.ap_medium << "  APl " << report.ap_large << "\n";
    return kExitOk;
  }

  int CmdCompare(const RunConfig& cfg) {
    const AnchorGrid grid = GenerateAnchors(cfg.layout);
    const ComparisonTable table =
        RunComparison(cfg.sim, grid, cfg.compare_modes, cfg.eval);
    const fs::path path = OutPath("compare.csv");
    WriteTextFile(path, ComparisonToCsv(table, MakeMetadata(cfg)));
    for (const ComparisonRow& row : table.rows) {
      out_ << "compare: " << NmsModeName(row.nms.mode) << "  AP "
           << row.report.ap_mean << "  dAP " << row.d_ap << "\n";
    }
    out_ << "compare: table -> " << path.string() << "\n";
    return kExitOk;
  }

  std::ostream& out_;
  std::ostream& err_;
  Overrides o_;
  OptionSets opts_;
  CLI::Option* seed_opt_ = nullptr;
};

}  // namespace

RunConfig RunConfigFromJson(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config root must be an object");
  RunConfig cfg;

  const json& sim = Section(doc, "simulation");
  SimConfig& s = cfg.sim;
  ReadKey(sim, "seed", s.seed, "simulation");
  ReadKey(sim, "images", s.images, "simulation");
  ReadKey(sim, "classes", s.classes, "simulation");
  ReadPair(sim, "gts_per_image", s.gts_per_image_min, s.gts_per_image_max, "simulation");
  ReadPair(sim, "image_size", s.image_size.width, s.image_size.height, "simulation");
  ReadPair(sim, "box_scale_range", s.box_scale_min, s.box_scale_max, "simulation");
  ReadKey(sim, "jitter_sigma", s.jitter_sigma, "simulation");
  ReadKey(sim, "score_alignment", s.score_alignment, "simulation");
  ReadKey(sim, "locscore_noise_sigma", s.locscore_noise_sigma, "simulation");
  ReadKey(sim, "proposals_per_gt", s.proposals_per_gt, "simulation");
  ReadKey(sim, "background_fp_rate", s.background_fp_rate, "simulation");

  cfg.layout = LayoutFromJson(Section(doc, "anchors"), DefaultSimLayout(s.image_size));

  cfg.nms = NmsFromJson(Section(doc, "nms"), NmsConfig{});
  cfg.eval = EvalFromJson(Section(doc, "eval"));

  const json& compare = Section(doc, "compare");
  if (auto it = compare.find("modes"); it != compare.end()) {
    if (!it->is_array()) throw ConfigError("compare.modes must be an array");
    for (const json& m : *it) {
      if (m.is_string()) {
        cfg.compare_modes.push_back(
            ModesFromNames({m.get<std::string>()}, cfg.nms).front());
      } else if (m.is_object()) {
        cfg.compare_modes.push_back(NmsFromJson(m, cfg.nms));
      } else {
        throw ConfigError("compare.modes entries must be names or objects");
      }
    }
  } else {
    cfg.compare_modes = DefaultCompareModes(cfg.nms);
  }
  return cfg;
}

json RunConfig::ToJson() const {
  json modes = json::array();
  for (const NmsConfig& m : compare_modes) modes.push_back(NmsToJson(m));
  return {
      {"anchors", LayoutToJson(layout)},
      {"simulation",
       {{"seed", sim.seed},
        {"images", sim.images},
        {"classes", sim.classes},
        {"gts_per_image", {sim.gts_per_image_min, sim.gts_per_image_max}},
        {"image_size", {sim.image_size.width, sim.image_size.height}},
        {"box_scale_range", {sim.box_scale_min, sim.box_scale_max}},
        {"jitter_sigma", sim.jitter_sigma},
        {"score_alignment", sim.score_alignment},
        {"locscore_noise_sigma", sim.locscore_noise_sigma},
        {"proposals_per_gt", sim.proposals_per_gt},
        {"background_fp_rate", sim.background_fp_rate}}},
      {"nms", NmsToJson(nms)},
      {"compare", {{"modes", std::move(modes)}}},
      {"eval",
       {{"iou_thresholds", eval.iou_thresholds},
        {"interpolation", InterpolationName(eval.interpolation)},
        {"max_dets_per_image", eval.max_dets_per_image}}},
  };
}

void RunConfig::Validate() const {
  layout.Validate();
  sim.Validate();
  nms.Validate();
  if (compare_modes.empty()) throw ConfigError("compare.modes is empty");
  for (const NmsConfig& m : compare_modes) m.Validate();
  eval.Validate();
}

int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Tool tool(out, err);
  return tool.Main(argc, argv);
}

}  // namespace laar::cli
