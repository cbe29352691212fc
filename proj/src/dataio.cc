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

#include "laar/dataio.h"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "laar/errors.h"

namespace laar {
namespace {

using nlohmann::json;

std::string Where(const char* kind, std::size_t index) {
  return std::string(kind) + " " + std::to_string(index);
}

const json& RequireField(const json& rec, const char* key,
                         const std::string& where) {
  if (!rec.is_object()) throw DataError(where + ": record is not an object");
  auto it = rec.find(key);
  if (it == rec.end()) {
    throw DataError(where + ": missing required field '" + key + "'");
  }
  return *it;
}

template <typename T>
T Get(const json& rec, const char* key, const std::string& where) {
  const json& v = RequireField(rec, key, where);
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw DataError(where + ": field '" + key + "' has the wrong type (" +
                    e.what() + ")");
  }
}

double GetNumber(const json& rec, const char* key, const std::string& where) {
  const json& v = RequireField(rec, key, where);
  if (!v.is_number()) {
    throw DataError(where + ": field '" + key + "' must be a number");
  }
  return v.get<double>();
}

std::vector<double> GetNumbers(const json& v, const std::string& where,
                               const char* key) {
  if (!v.is_array()) {
    throw DataError(where + ": field '" + key + "' must be an array");
  }
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) {
      throw DataError(where + ": field '" + key + "' must hold numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

// Prefers exact corners under "xyxy", falls back to COCO "bbox".
Box ReadBox(const json& rec, const std::string& where) {
  try {
    if (auto it = rec.find("xyxy"); it != rec.end()) {
      const auto c = GetNumbers(*it, where, "xyxy");
      if (c.size() != 4) throw DataError(where + ": 'xyxy' needs 4 numbers");
      return Box(c[0], c[1], c[2], c[3]);
    }
    const auto b = GetNumbers(RequireField(rec, "bbox", where), where, "bbox");
    if (b.size() != 4) throw DataError(where + ": 'bbox' needs 4 numbers");
    if (b[2] < 0.0 || b[3] < 0.0) {
      throw DataError(where + ": negative bbox width or height");
    }
    return Box::FromXywh(b[0], b[1], b[2], b[3]);
  } catch (const DataError& e) {
    const std::string msg = e.what();
    if (msg.rfind(where, 0) == 0) throw;
    throw DataError(where + ": " + msg);
  }
}

void WriteBox(json& rec, const Box& b) {
  rec["bbox"] = {b.x1(), b.y1(), b.width(), b.height()};
  rec["xyxy"] = {b.x1(), b.y1(), b.x2(), b.y2()};
}

const json& RecordArray(const json& doc, const char* key) {
  if (!doc.is_object()) throw DataError("document root must be an object");
  auto it = doc.find(key);
  if (it == doc.end()) {
    throw DataError(std::string("missing top-level '") + key + "' array");
  }
  if (!it->is_array()) {
    throw DataError(std::string("top-level '") + key + "' must be an array");
  }
  return *it;
}

std::string SourceName(ProposalSource s) {
  return s == ProposalSource::kJitteredGt ? "jittered_gt" : "background";
}

ProposalSource ParseSource(const std::string& s, const std::string& where) {
  if (s == "jittered_gt") return ProposalSource::kJitteredGt;
  if (s == "background") return ProposalSource::kBackground;
  throw DataError(where + ": unknown provenance source '" + s + "'");
}

std::string CsvMetadata(const Metadata& meta) {
  std::ostringstream os;
  os << "# tool=" << meta.tool << " version=" << meta.version
     << " config_hash=" << meta.config_hash << " seed=" << meta.seed << "\n";
  os << "# config=" << meta.config.dump() << "\n";
  return os.str();
}

}  // namespace

std::string FormatDouble(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw InvariantError("double formatting failed");
  return std::string(buf, end);
}

json Metadata::ToJson() const {
  return {{"tool", tool},
          {"version", version},
          {"config_hash", config_hash},
          {"seed", seed},
          {"config", config}};
}

std::string ConfigHash(const json& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : config.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json ParseJson(const std::string& text, const std::string& origin) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(origin + ": malformed JSON at byte " +
                    std::to_string(e.byte) + ": " + e.what());
  }
}

json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ParseJson(ss.str(), path.string());
}

void WriteTextFile(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  out << text;
  if (!out) throw DataError("write failed for " + path.string());
}

std::string DumpJson(const json& doc) { return doc.dump(2) + "\n"; }

// ---------------------------------------------------------------------------
// Annotations

AnnotationSet ParseAnnotations(const json& doc) {
  AnnotationSet set;
  std::unordered_map<std::int64_t, std::size_t> image_slot;
  const json& images = RecordArray(doc, "images");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = Where("image", i);
    Scene scene;
    scene.image_id = Get<std::int64_t>(images[i], "id", where);
    scene.image_size = {GetNumber(images[i], "width", where),
                        GetNumber(images[i], "height", where)};
    if (!(scene.image_size.width > 0.0 && scene.image_size.height > 0.0)) {
      throw DataError(where + ": width and height must be positive");
    }
    if (!image_slot.emplace(scene.image_id, set.scenes.size()).second) {
      throw DataError(where + ": duplicate image id " +
                      std::to_string(scene.image_id));
    }
    set.scenes.push_back(std::move(scene));
  }

  std::set<int> category_ids;
  if (auto it = doc.find("categories"); it != doc.end()) {
    if (!it->is_array()) throw DataError("top-level 'categories' must be an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string where = Where("category", i);
      Category c;
      c.id = Get<int>((*it)[i], "id", where);
      if (c.id < 0) throw DataError(where + ": category id must be >= 0");
      if (auto n = (*it)[i].find("name"); n != (*it)[i].end() && n->is_string()) {
        c.name = n->get<std::string>();
      }
      category_ids.insert(c.id);
      set.categories.push_back(std::move(c));
    }
  }

  const json& anns = RecordArray(doc, "annotations");
  for (std::size_t i = 0; i < anns.size(); ++i) {
    const std::string where = Where("annotation", i);
    const auto image_id = Get<std::int64_t>(anns[i], "image_id", where);
    const int category_id = Get<int>(anns[i], "category_id", where);
    auto slot = image_slot.find(image_id);
    if (slot == image_slot.end()) {
      throw DataError(where + ": unknown image_id " + std::to_string(image_id));
    }
    if (!category_ids.contains(category_id)) {
      throw DataError(where + ": unknown category_id " +
                      std::to_string(category_id));
    }
    Scene& scene = set.scenes[slot->second];
    const Box box = ReadBox(anns[i], where);
    scene.ground_truths.push_back(
        {box.ClippedTo(scene.image_size.width, scene.image_size.height),
         category_id});
  }
  return set;
}

AnnotationSet LoadAnnotations(const std::filesystem::path& path) {
  try {
    return ParseAnnotations(ReadJsonFile(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<Category> NumberedCategories(int num_classes) {
  std::vector<Category> out;
  for (int c = 0; c < num_classes; ++c) out.push_back({c, "class_" + std::to_string(c)});
  return out;
}

json AnnotationsToJson(const AnnotationSet& set, const Metadata& meta) {
  json doc;
  doc["metadata"] = meta.ToJson();
  json images = json::array();
  json anns = json::array();
  std::int64_t ann_id = 1;
  for (const Scene& s : set.scenes) {
    images.push_back({{"id", s.image_id},
                      {"width", s.image_size.width},
                      {"height", s.image_size.height}});
    for (const GroundTruth& gt : s.ground_truths) {
      json rec = {{"id", ann_id++},
                  {"image_id", s.image_id},
                  {"category_id", gt.class_id},
                  {"area", Area(gt.box)},
                  {"iscrowd", 0}};
      WriteBox(rec, gt.box);
      anns.push_back(std::move(rec));
    }
  }
  json cats = json::array();
  for (const Category& c : set.categories) {
    cats.push_back({{"id", c.id}, {"name", c.name}});
  }
  doc["images"] = std::move(images);
  doc["annotations"] = std::move(anns);
  doc["categories"] = std::move(cats);
  return doc;
}

void SaveAnnotations(const AnnotationSet& set, const Metadata& meta,
                     const std::filesystem::path& path) {
  WriteTextFile(path, DumpJson(AnnotationsToJson(set, meta)));
}

// ---------------------------------------------------------------------------
// Proposals

ProposalSet ParseProposals(const json& doc) {
  ProposalSet set;
  const json& recs = RecordArray(doc, "proposals");
  bool any_provenance = false;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const std::string where = Where("proposal", i);
    const json& rec = recs[i];
    const auto image_id = Get<std::int64_t>(rec, "image_id", where);
    std::int64_t anchor_id = -1;
    if (auto it = rec.find("anchor_id"); it != rec.end() && !it->is_null()) {
      anchor_id = Get<std::int64_t>(rec, "anchor_id", where);
    }
    const auto scores = GetNumbers(RequireField(rec, "scores", where), where, "scores");
    const double locscore = GetNumber(rec, "locscore", where);
    const Box box = ReadBox(rec, where);
    try {
      set.proposals.push_back(MakeProposal(box, scores, locscore, anchor_id, image_id));
    } catch (const DataError& e) {
      throw DataError(where + ": " + e.what());
    }
    if (auto it = rec.find("provenance"); it != rec.end() && it->is_object()) {
      if (!any_provenance && i > 0) {
        throw DataError(where + ": provenance must be on every record or none");
      }
      any_provenance = true;
      Provenance p;
      p.true_iou_with_gt = GetNumber(*it, "true_iou", where);
      p.true_aiou = GetNumber(*it, "true_aiou", where);
      p.source = ParseSource(Get<std::string>(*it, "source", where), where);
      if (auto m = it->find("matched_gt"); m != it->end() && !m->is_null()) {
        p.matched_gt = Get<std::size_t>(*it, "matched_gt", where);
      }
      set.provenance.push_back(p);
    } else if (any_provenance) {
      throw DataError(where + ": provenance must be on every record or none");
    }
  }
  return set;
}

ProposalSet LoadProposals(const std::filesystem::path& path) {
  try {
    return ParseProposals(ReadJsonFile(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

json ProposalsToJson(const ProposalSet& set, const Metadata& meta) {
  const bool with_prov = !set.provenance.empty();
  if (with_prov && set.provenance.size() != set.proposals.size()) {
    throw InvariantError("provenance count differs from proposal count");
  }
  json recs = json::array();
  for (std::size_t i = 0; i < set.proposals.size(); ++i) {
    const Proposal& p = set.proposals[i];
    json rec = {{"image_id", p.image_id},
                {"anchor_id", p.anchor_id},
                {"scores", p.class_scores},
                {"locscore", p.locscore}};
    WriteBox(rec, p.box);
    if (with_prov) {
      const Provenance& pv = set.provenance[i];
      rec["provenance"] = {{"true_iou", pv.true_iou_with_gt},
                           {"true_aiou", pv.true_aiou},
                           {"source", SourceName(pv.source)},
                           {"matched_gt", pv.matched_gt ? json(*pv.matched_gt)
                                                        : json(nullptr)}};
    }
    recs.push_back(std::move(rec));
  }
  return {{"metadata", meta.ToJson()}, {"proposals", std::move(recs)}};
}

void SaveProposals(const ProposalSet& set, const Metadata& meta,
                   const std::filesystem::path& path) {
  WriteTextFile(path, DumpJson(ProposalsToJson(set, meta)));
}

// ---------------------------------------------------------------------------
// Detections

std::vector<Detection> ParseDetections(const json& doc) {
  const json& recs = doc.is_array() ? doc : RecordArray(doc, "detections");
  std::vector<Detection> dets;
  dets.reserve(recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const std::string where = Where("detection", i);
    Detection d;
    d.image_id = Get<std::int64_t>(recs[i], "image_id", where);
    d.class_id = Get<int>(recs[i], "category_id", where);
    d.confidence = GetNumber(recs[i], "score", where);
    d.cqs = recs[i].contains("cqs") ? GetNumber(recs[i], "cqs", where) : d.confidence;
    d.box = ReadBox(recs[i], where);
    dets.push_back(d);
  }
  return dets;
}

std::vector<Detection> LoadDetections(const std::filesystem::path& path) {
  try {
    return ParseDetections(ReadJsonFile(path));
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<Detection> SortedForOutput(std::vector<Detection> dets) {
  std::stable_sort(dets.begin(), dets.end(), [](const Detection& a, const Detection& b) {
    if (a.image_id != b.image_id) return a.image_id < b.image_id;
    return a.confidence > b.confidence;
  });
  return dets;
}

json DetectionsToJson(const std::vector<Detection>& dets, const Metadata& meta) {
  json recs = json::array();
  for (const Detection& d : dets) {
    json rec = {{"image_id", d.image_id},
                {"category_id", d.class_id},
                {"score", d.confidence},
                {"cqs", d.cqs}};
    WriteBox(rec, d.box);
    recs.push_back(std::move(rec));
  }
  return {{"metadata", meta.ToJson()}, {"detections", std::move(recs)}};
}

void SaveDetections(const std::vector<Detection>& dets, const Metadata& meta,
                    const std::filesystem::path& path) {
  WriteTextFile(path, DumpJson(DetectionsToJson(dets, meta)));
}

// ---------------------------------------------------------------------------
// Reports

json ReportToJson(const EvalReport& report, const Metadata& meta) {
  json per_class = json::object();
  for (const auto& [cls, ap] : report.per_class_ap) {
    per_class[std::to_string(cls)] = ap;
  }
  json curves = json::array();
  for (const PrCurve& c : report.pr_curves) {
    curves.push_back({{"class_id", c.class_id},
                      {"iou_threshold", c.iou_threshold},
                      {"recall", c.recall},
                      {"precision", c.precision}});
  }
  return {{"metadata", meta.ToJson()},
          {"metrics",
           {{"ap", report.ap_mean},
            {"ap_50", report.ap_50},
            {"ap_75", report.ap_75},
            {"ap_small", report.ap_small},
            {"ap_medium", report.ap_medium},
            {"ap_large", report.ap_large}}},
          {"per_class_ap", std::move(per_class)},
          {"pr_curves", std::move(curves)}};
}

std::string ReportToCsv(const EvalReport& report, const Metadata& meta) {
  std::ostringstream os;
  os << CsvMetadata(meta);
  os << "metric,value\n";
  os << "ap," << FormatDouble(report.ap_mean) << "\n";
  os << "ap_50," << FormatDouble(report.ap_50) << "\n";
  os << "ap_75," << FormatDouble(report.ap_75) << "\n";
  os << "ap_small," << FormatDouble(report.ap_small) << "\n";
  os << "ap_medium," << FormatDouble(report.ap_medium) << "\n";
  os << "ap_large," << FormatDouble(report.ap_large) << "\n";
  for (const auto& [cls, ap] : report.per_class_ap) {
    os << "ap_class_" << cls << "," << FormatDouble(ap) << "\n";
  }
  return os.str();
}

std::string ComparisonToCsv(const ComparisonTable& table, const Metadata& meta) {
  std::ostringstream os;
  os << CsvMetadata(meta);
  os << "mode,epsilon,top_k,per_class,ap,ap_50,ap_75,ap_small,ap_medium,"
        "ap_large,d_ap,d_ap_50,d_ap_75,d_ap_small,d_ap_medium,d_ap_large\n";
  for (const ComparisonRow& row : table.rows) {
    const EvalReport& r = row.report;
    os << NmsModeName(row.nms.mode) << "," << FormatDouble(row.nms.epsilon) << ","
       << row.nms.top_k << "," << (row.nms.per_class ? "true" : "false");
    for (double v : {r.ap_mean, r.ap_50, r.ap_75, r.ap_small, r.ap_medium,
                     r.ap_large, row.d_ap, row.d_ap_50, row.d_ap_75,
                     row.d_ap_small, row.d_ap_medium, row.d_ap_large}) {
      os << "," << FormatDouble(v);
    }
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Anchors

json LayoutToJson(const AnchorLayout& layout) {
  json levels = json::array();
  for (const AnchorLevel& l : layout.levels) {
    levels.push_back({{"stride", l.stride}, {"base_size", l.base_size}});
  }
  return {{"image_size", {layout.image_size.width, layout.image_size.height}},
          {"levels", std::move(levels)},
          {"scales", layout.scales},
          {"aspect_ratios", layout.aspect_ratios},
          {"clip", layout.clip}};
}

AnchorLayout LayoutFromJson(const json& doc, AnchorLayout base) {
  if (!doc.is_object()) throw ConfigError("anchor layout must be an object");
  AnchorLayout layout = std::move(base);
  try {
    if (auto it = doc.find("image_size"); it != doc.end()) {
      const auto v = it->get<std::vector<double>>();
      if (v.size() != 2) throw ConfigError("image_size needs [width, height]");
      layout.image_size = {v[0], v[1]};
    }
    if (auto it = doc.find("levels"); it != doc.end()) {
      layout.levels.clear();
      for (const json& l : *it) {
        layout.levels.push_back({l.at("stride").get<double>(),
                                 l.at("base_size").get<double>()});
      }
    }
    if (auto it = doc.find("scales"); it != doc.end()) {
      layout.scales = it->get<std::vector<double>>();
    }
    if (auto it = doc.find("aspect_ratios"); it != doc.end()) {
      layout.aspect_ratios = it->get<std::vector<double>>();
    }
    if (auto it = doc.find("clip"); it != doc.end()) layout.clip = it->get<bool>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad anchor layout: ") + e.what());
  }
  return layout;
}

json AnchorsToJson(const AnchorGrid& grid, const Metadata& meta) {
  json rows = json::array();
  for (const Box& b : grid.anchors) rows.push_back({b.x1(), b.y1(), b.x2(), b.y2()});
  return {{"metadata", meta.ToJson()},
          {"layout", LayoutToJson(grid.layout)},
          {"count", grid.anchors.size()},
          {"anchors", std::move(rows)}};
}

}  // namespace laar
