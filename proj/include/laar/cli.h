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

#ifndef LAAR_CLI_H_
#define LAAR_CLI_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "laar/anchors.h"
#include "laar/evaluation.h"
#include "laar/simulation.h"
#include "laar/suppression.h"

namespace laar::cli {

// Exit codes of the laar tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitInternal = 3;

// Fully resolved settings of one run. Paths are not part of it, so outputs
// do not depend on where they are written.
struct RunConfig {
  AnchorLayout layout;
  SimConfig sim;
  NmsConfig nms;
  std::vector<NmsConfig> compare_modes;
  EvalConfig eval = EvalConfig::Coco();

  // Every field explicit; this document is echoed into output metadata.
  nlohmann::json ToJson() const;
  void Validate() const;
};

// Defaults, then the config document (if any) on top. Unknown keys are
// ignored; wrong types are ConfigErrors.
RunConfig RunConfigFromJson(const nlohmann::json& doc);

// Runs the tool. Human-readable summaries go to `out`, diagnostics to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace laar::cli

#endif  // LAAR_CLI_H_
