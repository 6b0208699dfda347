// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gfp/core.hpp"
#include "gfp/executor.hpp"
#include "gfp/inference.hpp"
#include "gfp/jsonl.hpp"
#include "gfp/teacher.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace gfp {

struct PathsConfig {
    std::string corpus;          // training split (synthesize, build)
    std::string test_corpus;     // evaluation split (infer, ablate)
    std::string checkpoint = "out/synthesis.jsonl";
    std::string out_dir = "out";
    std::string predictions = "out/predictions.jsonl";
    std::string gold_hints;      // records.jsonl from build
    std::string prompt_template; // empty: built-in template

    bool operator==(const PathsConfig&) const = default;
};

/// Passed through to the external trainer; not used by this toolchain.
struct TrainerDefaults {
    int batch_size = 8;
    int epochs = 10;
    double learning_rate = 3e-4;

    bool operator==(const TrainerDefaults&) const = default;
};

struct PipelineConfig {
    PathsConfig paths;
    TeacherConfig teacher;
    SandboxConfig sandbox;
    StageEndpoint hint_endpoint = StageEndpoint::hint_stage("http://127.0.0.1:8001");
    StageEndpoint code_endpoint = StageEndpoint::code_stage("http://127.0.0.1:8002");
    NumericTolerance tolerance;
    std::vector<double> ablation_fractions{0.0, 0.25, 0.5, 0.75, 1.0};
    unsigned max_in_flight = 4;
    TrainerDefaults trainer;

    bool operator==(const PipelineConfig&) const = default;

    void validate() const;
};

ordered_json to_json(const TeacherConfig& cfg);
ordered_json to_json(const SandboxConfig& cfg);
ordered_json to_json(const StageEndpoint& ep);
ordered_json to_json(const NumericTolerance& tol);
ordered_json to_json(const PipelineConfig& cfg);

/// Missing keys keep their defaults; unknown keys are a SchemaError so
/// typos do not pass silently.
PipelineConfig pipeline_config_from_json(const ordered_json& j);

PipelineConfig load_pipeline_config(const std::filesystem::path& path);
void save_pipeline_config(const PipelineConfig& cfg, const std::filesystem::path& path);

} // namespace gfp
