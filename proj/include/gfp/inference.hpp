// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gfp/core.hpp"
#include "gfp/executor.hpp"
#include "gfp/jsonl.hpp"

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace gfp {

/// A student model behind the /generate wire contract. Decoding is greedy.
struct StageEndpoint {
    std::string url;
    int max_new_tokens = 128;
    double temperature = 0.0;
    std::chrono::milliseconds request_timeout{30000};

    static StageEndpoint hint_stage(std::string url = {}) { return {std::move(url), 128}; }
    static StageEndpoint code_stage(std::string url = {}) { return {std::move(url), 256}; }

    bool operator==(const StageEndpoint&) const = default;
    void validate() const;
};

/// Full URL of the generate route: a bare host (or "/") gets "/generate",
/// an explicit path is used as given.
std::string generation_url(const std::string& base_url);

/// Source of generations for one stage. Implementations must be safe to
/// call from several threads.
class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    /// Throws EndpointError on any failure.
    virtual std::string generate(const std::string& prompt) const = 0;
    /// Startup reachability check.
    virtual bool probe() const { return true; }
    /// Settings recorded in run manifests.
    virtual ordered_json describe() const { return ordered_json::object(); }
};

/// POST {"prompt", "max_new_tokens", "temperature"} -> 200 {"text": str}
class HttpGenerator final : public TextGenerator {
public:
    explicit HttpGenerator(StageEndpoint endpoint);
    std::string generate(const std::string& prompt) const override;
    bool probe() const override;
    ordered_json describe() const override;

private:
    StageEndpoint endpoint_;
    std::string url_;
};

ordered_json generate_request_body(const std::string& prompt, const StageEndpoint& endpoint);

/// Sends the bare question; the reply is split on " & " and each piece is
/// sanitized. An empty generation gives an empty list.
HintList generate_hints(const std::string& question, const TextGenerator& hint_generator);

enum class HintSource { Generated, Gold };

struct EvalRecord {
    std::string problem_id;
    double gold = 0.0;
    HintList hints_used;
    HintSource hint_source = HintSource::Generated;
    double gold_fraction = 0.0; // meaningful for HintSource::Gold
    std::string code;
    std::optional<ExecOutcome> outcome; // absent when no program was produced
    std::optional<double> predicted;
    bool correct = false;
    ErrorCategory category = ErrorCategory::CompilationError;
    std::string error; // endpoint or lookup failure, empty otherwise
};

/// Hints -> code input -> code -> execution. An endpoint failure yields a
/// failed record with empty code instead of throwing.
EvalRecord solve(const Problem& problem, const TextGenerator& hint_generator, const TextGenerator& code_generator,
                 const SandboxConfig& sandbox, const NumericTolerance& tol = {});

/// The first ceil(fraction * n) hints, in order. Throws InvalidArgument when
/// fraction is outside [0, 1].
HintList gold_hint_prefix(const HintList& gold_hints, double fraction);

/// Like solve, but uses a prefix of the verified gold hints and never calls
/// a hint model. Throws MissingGoldHints when `gold_hints` is null.
EvalRecord solve_with_gold_hints(const Problem& problem, const HintList* gold_hints, double fraction,
                                 const TextGenerator& code_generator, const SandboxConfig& sandbox,
                                 const NumericTolerance& tol = {});

struct SuiteMode {
    enum class Kind { TwoStage, GoldFraction };
    Kind kind = Kind::TwoStage;
    double fraction = 1.0;

    static SuiteMode two_stage() { return {}; }
    static SuiteMode gold(double f) { return {Kind::GoldFraction, f}; }
    std::string tag() const;
};

struct SuiteOptions {
    SuiteMode mode;
    const TextGenerator* hint_generator = nullptr; // required for TwoStage
    const TextGenerator* code_generator = nullptr;
    const std::unordered_map<std::string, HintList>* gold_hints = nullptr; // required for GoldFraction
    SandboxConfig sandbox;
    NumericTolerance tolerance;
    unsigned max_in_flight = 1;
};

struct SuiteResult {
    std::vector<EvalRecord> records;
    ordered_json manifest;
};

/// Solves every problem, keeping input order. Items are pipelined up to
/// max_in_flight; each item's stages run in sequence. Only an unreachable
/// endpoint at the startup probe is fatal (EndpointError).
SuiteResult run_suite(const std::vector<Problem>& problems, const SuiteOptions& options);

ordered_json eval_record_to_json(const EvalRecord& record);
EvalRecord eval_record_from_json(const ordered_json& j);
void write_predictions(const std::vector<EvalRecord>& records, const std::filesystem::path& path);
std::vector<EvalRecord> read_predictions(const std::filesystem::path& path);

/// Verified hints keyed by problem id, taken from build output records.
std::unordered_map<std::string, HintList> load_gold_hints(const std::filesystem::path& records_path);

struct ContractCheck {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Exercises a live generation server against the wire contract: a valid
/// request returns 200 {"text": str}, malformed bodies return 400, and
/// identical requests give identical text.
std::vector<ContractCheck> check_generation_endpoint(const std::string& url,
                                                     std::chrono::milliseconds timeout = std::chrono::seconds(30));

} // namespace gfp
