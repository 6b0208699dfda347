// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gfp/core.hpp"
#include "gfp/corpus.hpp"
#include "gfp/executor.hpp"
#include "gfp/teacher.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gfp {

/// A synthesized record after execution. `outcome` is absent when the
/// synthesis itself failed, in which case `synthesis_error` says why.
struct SynthRecord {
    std::string problem_id;
    HintList hints;
    std::string code;
    std::optional<ExecOutcome> outcome;
    std::string synthesis_error;
    bool verified = false;
};

enum class RecordFate { Kept, WrongAnswer, ExecFailure, SynthesisFailure };

std::string_view to_string(RecordFate fate);

/// Kept when verified; a wrong answer when the program produced a number
/// that misses gold; an execution failure for every other outcome.
RecordFate record_fate(const SynthRecord& record);

struct BuildStats {
    std::size_t total = 0;
    std::size_t kept = 0;
    std::size_t removed_wrong_answer = 0;
    std::size_t removed_exec_failure = 0;
    std::size_t removed_synthesis_failure = 0;

    bool operator==(const BuildStats&) const = default;
};

ordered_json stats_to_json(const BuildStats& stats);

/// Runs the draft's code once. Failed drafts come back unverified without
/// being executed. Propagates only SandboxSpawnFailure.
SynthRecord verify_record(const SynthDraft& draft, double gold, const SandboxConfig& cfg,
                          const NumericTolerance& tol = {});

/// verify_record over a whole checkpoint, executing through run_batch.
/// Throws UnknownProblemId if a draft does not resolve in the corpus.
std::vector<SynthRecord> verify_drafts(const std::vector<SynthDraft>& drafts, const Corpus& corpus,
                                       const SandboxConfig& cfg, const NumericTolerance& tol = {});

struct TrainingSets {
    std::vector<TrainPair> hint_pairs;
    std::vector<TrainPair> code_pairs;
    BuildStats stats;
};

/// One hint pair and one code pair per verified record, in record order.
/// Unverified records only count towards the stats buckets.
TrainingSets build_training_sets(const std::vector<SynthRecord>& records, const Corpus& corpus);

/// JSONL {"stage": "hint"|"code", "input": str, "target": str}, written
/// atomically.
void write_pairs(const std::vector<TrainPair>& pairs, const std::filesystem::path& path);
/// Throws IoError or SchemaError naming the offending line.
std::vector<TrainPair> read_pairs(const std::filesystem::path& path);

ordered_json record_to_json(const SynthRecord& record);
SynthRecord record_from_json(const ordered_json& j);
void write_records(const std::vector<SynthRecord>& records, const std::filesystem::path& path);
std::vector<SynthRecord> read_records(const std::filesystem::path& path);

} // namespace gfp
