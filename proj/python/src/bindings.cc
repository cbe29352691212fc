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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "laar/anchors.h"
#include "laar/cli.h"
#include "laar/dataio.h"
#include "laar/errors.h"
#include "laar/evaluation.h"
#include "laar/geometry.h"
#include "laar/scoring.h"
#include "laar/simulation.h"
#include "laar/suppression.h"

namespace py = pybind11;

namespace laar {
namespace {

py::array_t<double> BoxesToArray(const std::vector<Box>& boxes) {
  py::array_t<double> out({static_cast<py::ssize_t>(boxes.size()), py::ssize_t{4}});
  auto v = out.mutable_unchecked<2>();
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    v(i, 0) = boxes[i].x1();
    v(i, 1) = boxes[i].y1();
    v(i, 2) = boxes[i].x2();
    v(i, 3) = boxes[i].y2();
  }
  return out;
}

std::vector<Box> BoxesFromArray(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  if (a.ndim() != 2 || a.shape(1) != 4) throw DataError("expected an (N, 4) array of boxes");
  auto v = a.unchecked<2>();
  std::vector<Box> out;
  out.reserve(a.shape(0));
  for (py::ssize_t i = 0; i < a.shape(0); ++i) out.emplace_back(v(i, 0), v(i, 1), v(i, 2), v(i, 3));
  return out;
}

}  // namespace
}  // namespace laar

PYBIND11_MODULE(_laar, m) {
  using namespace laar;
  m.doc() = "Location-aware anchor-based box reasoning: geometry, scoring, suppression, evaluation.";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<InvariantError>(m, "InvariantError", PyExc_AssertionError);

  // Geometry.
  py::class_<Box>(m, "Box")
      .def(py::init<double, double, double, double>(), py::arg("x1"), py::arg("y1"),
           py::arg("x2"), py::arg("y2"))
      .def_static("from_xywh", &Box::FromXywh)
      .def_property_readonly("x1", &Box::x1)
      .def_property_readonly("y1", &Box::y1)
      .def_property_readonly("x2", &Box::x2)
      .def_property_readonly("y2", &Box::y2)
      .def_property_readonly("width", &Box::width)
      .def_property_readonly("height", &Box::height)
      .def("clipped_to", &Box::ClippedTo)
      .def("as_tuple", [](const Box& b) { return py::make_tuple(b.x1(), b.y1(), b.x2(), b.y2()); })
      .def("__eq__", [](const Box& a, const Box& b) { return a == b; })
      .def("__repr__", [](const Box& b) { return "Box" + b.ToString(); });
  m.def("area", &Area);
  m.def("iou", &Iou);
  m.def("iou_matrix", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                         const py::array_t<double, py::array::c_style | py::array::forcecast>& b) {
    const auto as = BoxesFromArray(a);
    const auto bs = BoxesFromArray(b);
    const IouMatrix mat = ComputeIouMatrix(as, bs);
    py::array_t<double> out({static_cast<py::ssize_t>(mat.rows()),
                             static_cast<py::ssize_t>(mat.cols())});
    std::copy(mat.values().begin(), mat.values().end(), out.mutable_data());
    return out;
  }, "Pairwise IoU of two (N, 4) corner arrays.");

  // Anchors.
  py::class_<ImageSize>(m, "ImageSize")
      .def(py::init<double, double>(), py::arg("width"), py::arg("height"))
      .def_readwrite("width", &ImageSize::width)
      .def_readwrite("height", &ImageSize::height);
  py::class_<AnchorLevel>(m, "AnchorLevel")
      .def(py::init<double, double>(), py::arg("stride"), py::arg("base_size"))
      .def_readwrite("stride", &AnchorLevel::stride)
      .def_readwrite("base_size", &AnchorLevel::base_size);
  py::class_<AnchorLayout>(m, "AnchorLayout")
      .def(py::init<>())
      .def_readwrite("image_size", &AnchorLayout::image_size)
      .def_readwrite("levels", &AnchorLayout::levels)
      .def_readwrite("scales", &AnchorLayout::scales)
      .def_readwrite("aspect_ratios", &AnchorLayout::aspect_ratios)
      .def_readwrite("clip", &AnchorLayout::clip)
      .def("anchor_count", &AnchorLayout::AnchorCount)
      .def("validate", &AnchorLayout::Validate);
  py::class_<AnchorGrid>(m, "AnchorGrid")
      .def_readonly("layout", &AnchorGrid::layout)
      .def_readonly("level_offsets", &AnchorGrid::level_offsets)
      .def_property_readonly("anchors", [](const AnchorGrid& g) { return BoxesToArray(g.anchors); })
      .def("__len__", [](const AnchorGrid& g) { return g.anchors.size(); });
  m.def("generate_anchors", &GenerateAnchors);
  m.def("default_sim_layout", &DefaultSimLayout);
  m.def("nearest_anchor", &NearestAnchor);

  py::class_<GroundTruth>(m, "GroundTruth")
      .def(py::init<Box, int>(), py::arg("box"), py::arg("class_id") = 0)
      .def_readwrite("box", &GroundTruth::box)
      .def_readwrite("class_id", &GroundTruth::class_id);
  py::class_<Scene>(m, "Scene")
      .def_readonly("image_id", &Scene::image_id)
      .def_readonly("image_size", &Scene::image_size)
      .def_readonly("ground_truths", &Scene::ground_truths);
  m.def("make_scene", &MakeScene, py::arg("image_id"), py::arg("image_size"),
        py::arg("ground_truths"));
  py::enum_<Assignment>(m, "Assignment")
      .value("NEGATIVE", Assignment::kNegative)
      .value("IGNORE", Assignment::kIgnore)
      .value("POSITIVE", Assignment::kPositive);
  py::class_<AnchorTargets>(m, "AnchorTargets")
      .def_readonly("aiou_target", &AnchorTargets::aiou_target)
      .def_readonly("matched_gt", &AnchorTargets::matched_gt)
      .def_readonly("assignment", &AnchorTargets::assignment);
  m.def("compute_aiou_targets", &ComputeAiouTargets, py::arg("grid"), py::arg("scene"),
        py::arg("pos_thr") = kDefaultPositiveThreshold,
        py::arg("neg_thr") = kDefaultNegativeThreshold);

  // Scoring.
  py::class_<Proposal>(m, "Proposal")
      .def_readonly("box", &Proposal::box)
      .def_readonly("class_scores", &Proposal::class_scores)
      .def_readonly("locscore", &Proposal::locscore)
      .def_readonly("anchor_id", &Proposal::anchor_id)
      .def_readonly("image_id", &Proposal::image_id);
  m.def("make_proposal", &MakeProposal, py::arg("box"), py::arg("class_scores"),
        py::arg("locscore"), py::arg("anchor_id") = -1, py::arg("image_id") = 0);
  m.def("cqs", &Cqs, py::arg("p_class"), py::arg("p_loc"));
  m.def("locscore_loss", [](double pred, double target, const std::string& kind) {
    const LossValue v = LocscoreLoss(pred, target, ParseLocscoreLossKind(kind));
    return py::make_tuple(v.value, v.grad);
  }, py::arg("pred"), py::arg("target"), py::arg("kind") = "bce",
     "Returns (value, d value / d pred).");
  m.def("smooth_l1_box_loss", [](const std::array<double, 4>& pred,
                                 const std::array<double, 4>& target) {
    const BoxLossValue v = SmoothL1BoxLoss(pred, target);
    return py::make_tuple(v.value, v.grad);
  });
  py::class_<LossWeights>(m, "LossWeights")
      .def(py::init<double, double, double>(), py::arg("lambda_cl") = 1.0,
           py::arg("lambda_bb") = 1.0, py::arg("lambda_lc") = 1.0);
  m.def("combined_loss", [](double l_cl, double l_bb, double l_lc, const LossWeights& w) {
    return CombinedLoss(l_cl, l_bb, l_lc, w).l_total;
  }, py::arg("l_cl"), py::arg("l_bb"), py::arg("l_lc"), py::arg("weights") = LossWeights{});

  // Suppression.
  py::enum_<NmsMode>(m, "NmsMode")
      .value("BASELINE", NmsMode::kBaseline)
      .value("LAAR", NmsMode::kLaar)
      .value("LAAR_CLUSTER", NmsMode::kLaarCluster);
  m.def("parse_nms_mode", &ParseNmsMode);
  py::class_<NmsConfig>(m, "NmsConfig")
      .def(py::init([](double epsilon, NmsMode mode, int top_k, bool per_class, double floor) {
             NmsConfig c{epsilon, mode, top_k, per_class, floor};
             c.Validate();
             return c;
           }),
           py::arg("epsilon") = 0.5, py::arg("mode") = NmsMode::kLaarCluster,
           py::arg("top_k") = 100, py::arg("per_class") = true, py::arg("score_floor") = 0.01)
      .def_readwrite("epsilon", &NmsConfig::epsilon)
      .def_readwrite("mode", &NmsConfig::mode)
      .def_readwrite("top_k", &NmsConfig::top_k)
      .def_readwrite("per_class", &NmsConfig::per_class)
      .def_readwrite("score_floor", &NmsConfig::score_floor);
  py::class_<Detection>(m, "Detection")
      .def_readonly("box", &Detection::box)
      .def_readonly("class_id", &Detection::class_id)
      .def_readonly("confidence", &Detection::confidence)
      .def_readonly("cqs", &Detection::cqs)
      .def_readonly("image_id", &Detection::image_id)
      .def("__repr__", [](const Detection& d) {
        return "Detection(" + d.box.ToString() + ", class " + std::to_string(d.class_id) +
               ", confidence " + FormatDouble(d.confidence) + ")";
      });
  m.def("laar_nms", [](const std::vector<Proposal>& p, int cls, const NmsConfig& cfg) {
    return LaarNms(p, cls, cfg);
  }, py::arg("proposals"), py::arg("class_id"), py::arg("config") = NmsConfig{});
  m.def("suppress_image", [](const std::vector<Proposal>& p, const NmsConfig& cfg) {
    return SuppressImage(p, cfg);
  }, py::arg("proposals"), py::arg("config") = NmsConfig{});

  // Evaluation.
  py::enum_<Interpolation>(m, "Interpolation")
      .value("ALL_POINT", Interpolation::kAllPoint)
      .value("POINTS_101", Interpolation::kPoints101)
      .value("POINTS_11", Interpolation::kPoints11);
  py::class_<EvalConfig>(m, "EvalConfig")
      .def(py::init<>())
      .def_static("coco", &EvalConfig::Coco)
      .def_static("voc", &EvalConfig::Voc)
      .def_readwrite("iou_thresholds", &EvalConfig::iou_thresholds)
      .def_readwrite("interpolation", &EvalConfig::interpolation)
      .def_readwrite("max_dets_per_image", &EvalConfig::max_dets_per_image);
  py::class_<EvalReport>(m, "EvalReport")
      .def_readonly("ap", &EvalReport::ap_mean)
      .def_readonly("ap_50", &EvalReport::ap_50)
      .def_readonly("ap_75", &EvalReport::ap_75)
      .def_readonly("ap_small", &EvalReport::ap_small)
      .def_readonly("ap_medium", &EvalReport::ap_medium)
      .def_readonly("ap_large", &EvalReport::ap_large)
      .def_readonly("per_class_ap", &EvalReport::per_class_ap);
  m.def("evaluate", [](const std::vector<Detection>& dets, const std::vector<Scene>& scenes,
                       const EvalConfig& cfg) { return Evaluate(dets, scenes, cfg); },
        py::arg("detections"), py::arg("scenes"), py::arg("config") = EvalConfig::Coco());
  m.def("average_precision", [](const std::vector<std::pair<double, bool>>& flags, int n_gt,
                                Interpolation interp) {
    std::vector<ScoredFlag> f;
    for (auto [c, tp] : flags) f.push_back({c, tp});
    return AveragePrecision(f, n_gt, interp);
  }, py::arg("flags"), py::arg("n_gt"), py::arg("interpolation") = Interpolation::kAllPoint,
     "flags: list of (confidence, is_true_positive).");

  // Simulation.
  py::class_<SimConfig>(m, "SimConfig")
      .def(py::init<>())
      .def_readwrite("seed", &SimConfig::seed)
      .def_readwrite("images", &SimConfig::images)
      .def_readwrite("classes", &SimConfig::classes)
      .def_readwrite("gts_per_image_min", &SimConfig::gts_per_image_min)
      .def_readwrite("gts_per_image_max", &SimConfig::gts_per_image_max)
      .def_readwrite("image_size", &SimConfig::image_size)
      .def_readwrite("box_scale_min", &SimConfig::box_scale_min)
      .def_readwrite("box_scale_max", &SimConfig::box_scale_max)
      .def_readwrite("jitter_sigma", &SimConfig::jitter_sigma)
      .def_readwrite("score_alignment", &SimConfig::score_alignment)
      .def_readwrite("locscore_noise_sigma", &SimConfig::locscore_noise_sigma)
      .def_readwrite("proposals_per_gt", &SimConfig::proposals_per_gt)
      .def_readwrite("background_fp_rate", &SimConfig::background_fp_rate);
  py::class_<SimOutput>(m, "SimOutput")
      .def_readonly("scenes", &SimOutput::scenes)
      .def_readonly("proposals", &SimOutput::proposals)
      .def_property_readonly("true_iou", [](const SimOutput& s) {
        std::vector<double> v;
        for (const Provenance& p : s.provenance) v.push_back(p.true_iou_with_gt);
        return v;
      })
      .def_property_readonly("true_aiou", [](const SimOutput& s) {
        std::vector<double> v;
        for (const Provenance& p : s.provenance) v.push_back(p.true_aiou);
        return v;
      });
  m.def("simulate", &Simulate, py::arg("config"), py::arg("grid"));
  m.def("suppress_all", [](const std::vector<Proposal>& p, const NmsConfig& cfg) {
    return SuppressAll(p, cfg);
  });
  m.def("run_comparison", [](const SimConfig& cfg, const AnchorGrid& grid,
                             const std::vector<NmsConfig>& modes, const EvalConfig& eval) {
    const ComparisonTable t = RunComparison(cfg, grid, modes, eval);
    py::list rows;
    for (const ComparisonRow& r : t.rows) {
      py::dict d;
      d["mode"] = NmsModeName(r.nms.mode);
      d["ap"] = r.report.ap_mean;
      d["d_ap"] = r.d_ap;
      d["d_ap_50"] = r.d_ap_50;
      d["d_ap_75"] = r.d_ap_75;
      rows.append(d);
    }
    return rows;
  }, py::arg("config"), py::arg("grid"), py::arg("modes"),
     py::arg("eval_config") = EvalConfig::Coco());

  // Files and the command-line tool.
  m.def("load_annotations", [](const std::string& path) { return LoadAnnotations(path).scenes; });
  m.def("load_detections", [](const std::string& path) { return LoadDetections(path); });
  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::vector<const char*> argv = {"laar"};
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::Run(static_cast<int>(argv.size()), argv.data(), out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("args"), "Runs the laar tool in-process; returns (exit_code, stdout, stderr).");
}
