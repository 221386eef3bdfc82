// Copyright 2026 fcd contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include <json.hpp>

#include "fcd/accuracy.hpp"
#include "fcd/detector.hpp"
#include "fcd/forest_model.hpp"
#include "fcd/nlm.hpp"

namespace fcd {

/// End-to-end run description: denoise -> fit -> detect -> assess.
struct RunConfig {
    std::string cube_path;
    std::string mask_path;
    std::string reference_path; // optional; empty skips the assess stage
    std::string out_dir;
    bool denoise = true;
    NlmParams nlm;
    ModelParams model;
    DetectorParams detector;
    uint64_t seed = 42;
    int threads = 0; // execution detail, excluded from the provenance hash

    void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
RunConfig load_run_config(const std::string& path);

/// Canonical JSON for hashing and the provenance record; excludes threads.
nlohmann::json run_config_canonical_json(const RunConfig& config);

/// FNV-1a 64 hex digest of the canonical config.
std::string config_hash(const RunConfig& config);

struct PipelineResult {
    ChangeMap map;
    AccuracyReport report;
    bool assessed = false;
};

/// Runs the full pipeline, writing model.json, changes.*, report.{json,csv}
/// and provenance.json into out_dir. Byte-identical to invoking the stages
/// manually with the same parameters.
PipelineResult run_pipeline(const RunConfig& config);

} // namespace fcd
