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

// Readers and writers for the on-disk formats documented in FORMATS.md.
//
// Boxes are stored as COCO [x, y, w, h] under "bbox" and, for exact
// round-trips, as corners under "xyxy". Readers prefer "xyxy" when present.
// Unknown fields are ignored; missing required fields are DataErrors that
// name the record index.

#ifndef LAAR_DATAIO_H_
#define LAAR_DATAIO_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "laar/anchors.h"
#include "laar/evaluation.h"
#include "laar/scoring.h"
#include "laar/simulation.h"
#include "laar/suppression.h"

namespace laar {

// Provenance block written at the top of every output file.
struct Metadata {
  std::string tool = "laar";
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();

  nlohmann::json ToJson() const;
};

// FNV-1a 64 of the compact dump of `config`, as 16 lowercase hex digits.
std::string ConfigHash(const nlohmann::json& config);

// Parses JSON text; syntax errors become DataError with the byte offset.
nlohmann::json ParseJson(const std::string& text, const std::string& origin);
nlohmann::json ReadJsonFile(const std::filesystem::path& path);
// Writes `text` verbatim. Throws DataError on I/O failure.
void WriteTextFile(const std::filesystem::path& path, const std::string& text);
// Two-space indented dump with a trailing newline.
std::string DumpJson(const nlohmann::json& doc);

struct Category {
  int id = 0;
  std::string name;
};

struct AnnotationSet {
  std::vector<Scene> scenes;
  std::vector<Category> categories;
};

// COCO-subset annotation file. Boxes are clipped to image bounds.
AnnotationSet ParseAnnotations(const nlohmann::json& doc);
AnnotationSet LoadAnnotations(const std::filesystem::path& path);
nlohmann::json AnnotationsToJson(const AnnotationSet& set, const Metadata& meta);
void SaveAnnotations(const AnnotationSet& set, const Metadata& meta,
                     const std::filesystem::path& path);
// Categories "class_<id>" for every class id in [0, num_classes).
std::vector<Category> NumberedCategories(int num_classes);

struct ProposalSet {
  std::vector<Proposal> proposals;
  // Empty, or one entry per proposal.
  std::vector<Provenance> provenance;
};

ProposalSet ParseProposals(const nlohmann::json& doc);
ProposalSet LoadProposals(const std::filesystem::path& path);
nlohmann::json ProposalsToJson(const ProposalSet& set, const Metadata& meta);
void SaveProposals(const ProposalSet& set, const Metadata& meta,
                   const std::filesystem::path& path);

// Records are written in the given order; the tool sorts them with
// SortedForOutput first. The root may also be a bare array of detection
// records (COCO results style).
std::vector<Detection> ParseDetections(const nlohmann::json& doc);
std::vector<Detection> LoadDetections(const std::filesystem::path& path);
// (image_id ascending, confidence descending), stable.
std::vector<Detection> SortedForOutput(std::vector<Detection> dets);
nlohmann::json DetectionsToJson(const std::vector<Detection>& dets,
                                const Metadata& meta);
void SaveDetections(const std::vector<Detection>& dets, const Metadata& meta,
                    const std::filesystem::path& path);

nlohmann::json ReportToJson(const EvalReport& report, const Metadata& meta);
// "metric,value" rows preceded by '#' metadata comment lines.
std::string ReportToCsv(const EvalReport& report, const Metadata& meta);

// One row per mode with absolute metrics and differences to the reference.
std::string ComparisonToCsv(const ComparisonTable& table, const Metadata& meta);

nlohmann::json LayoutToJson(const AnchorLayout& layout);
// Inverse of LayoutToJson. Keys absent from `doc` keep their value in `base`.
AnchorLayout LayoutFromJson(const nlohmann::json& doc, AnchorLayout base = {});

// Layout echo plus one [x1, y1, x2, y2] row per anchor, in id order.
nlohmann::json AnchorsToJson(const AnchorGrid& grid, const Metadata& meta);

// Shortest decimal text that parses back to the same double.
std::string FormatDouble(double v);

}  // namespace laar

#endif  // LAAR_DATAIO_H_
