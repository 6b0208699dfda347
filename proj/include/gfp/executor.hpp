// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gfp/core.hpp"
#include "gfp/jsonl.hpp"

#include <chrono>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace gfp {

/// Line printed by the epilogue ahead of the rendered `result` value.
inline constexpr std::string_view kResultSentinel = "GFP_RESULT_7f3a:";
/// Set in every child's environment, followed by a per-run token, so
/// stragglers can be identified.
inline constexpr std::string_view kRunMarkerEnv = "GFP_RUN_MARKER";

struct SandboxConfig {
    /// argv prefix; the script path is appended. -I isolates the run from
    /// PYTHON* variables and user site-packages, -B skips .pyc writes.
    std::vector<std::string> interpreter_command{"python3", "-I", "-B"};
    std::chrono::milliseconds timeout{10000};
    std::size_t max_output_bytes = 64 * 1024;
    /// Compile-only pass before running so syntax errors are told apart
    /// from runtime failures. When off, stderr diagnostics decide.
    bool syntax_precheck = true;
    /// RLIMIT_AS for the child; 0 disables the limit.
    std::size_t max_memory_bytes = std::size_t{1} << 30;
    /// Upper bound on concurrent children in run_batch.
    unsigned max_concurrent = default_concurrency();

    bool operator==(const SandboxConfig&) const = default;
    static unsigned default_concurrency();
    void validate() const;
};

enum class ExecStatus { Value, CompileError, RuntimeError, Timeout, MissingResult, NonNumericResult };

std::string_view to_string(ExecStatus status);
ExecStatus exec_status_from_string(std::string_view name);

struct ExecOutcome {
    ExecStatus status = ExecStatus::MissingResult;
    double value = 0.0;        // meaningful only for Value
    std::string value_text;    // payload after the last sentinel, if any
    std::string stderr_excerpt;
    int exit_code = 0;         // -signal when killed by a signal
    std::chrono::duration<double> wall_time{0};

    bool is_value() const noexcept { return status == ExecStatus::Value; }
};

/// "Value(5)", "RuntimeError", ...
std::string describe(const ExecOutcome& outcome);

/// Python source appended after the candidate program.
std::string_view result_epilogue();

/// Runs `code` in a fresh temporary directory with a stripped environment.
/// Throws SandboxSpawnFailure when the interpreter cannot be started; every
/// program-level failure is reported through ExecOutcome::status instead.
ExecOutcome run_program(std::string_view code, const SandboxConfig& cfg);

/// Runs every program with at most cfg.max_concurrent children alive.
/// Output order matches input order.
std::vector<ExecOutcome> run_batch(const std::vector<std::string>& codes, const SandboxConfig& cfg);

enum class ErrorCategory { Correct, UnderstandingError, CompilationError };

std::string_view to_string(ErrorCategory category);
ErrorCategory error_category_from_string(std::string_view name);

/// Correct when the value matches gold; a wrong, missing or non-numeric
/// value is an understanding error; anything that failed to run is a
/// compilation error.
ErrorCategory error_category(const ExecOutcome& outcome, double gold, const NumericTolerance& tol = {});

/// Outcome fields worth persisting (wall time is left out so output files
/// stay byte-identical across runs).
ordered_json outcome_to_json(const ExecOutcome& outcome);
ExecOutcome outcome_from_json(const ordered_json& j);

} // namespace gfp
