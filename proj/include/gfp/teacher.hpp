// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gfp/core.hpp"
#include "gfp/jsonl.hpp"

#include <atomic>
#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gfp {

/// Teacher chat-completion endpoint settings. Defaults follow the data
/// synthesis setup: greedy decoding and JSON response mode.
struct TeacherConfig {
    std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
    std::string model_name = "gpt-4-0613";
    double temperature = 0.0;
    bool json_response = true;
    int max_retries = 5;
    std::chrono::milliseconds initial_backoff{1000}; // doubles after every retry
    int parallelism = 4;
    std::chrono::milliseconds request_timeout{60000};
    /// Re-ask once with a "return valid JSON" reminder when the reply does
    /// not parse. Off by default: at temperature 0 the retry is usually
    /// identical.
    bool reask_on_parse_error = false;

    bool operator==(const TeacherConfig&) const = default;
    void validate() const;
};

inline constexpr std::string_view kTeacherApiKeyEnv = "TEACHER_API_KEY";

struct TeacherReply {
    HintList hints;
    std::string code;

    bool operator==(const TeacherReply&) const = default;
};

/// Outcome of synthesizing one problem. Failed drafts carry the reason and
/// no hints or code.
struct SynthDraft {
    std::string problem_id;
    bool ok = false;
    HintList hints;
    std::string code;
    std::string error;

    bool operator==(const SynthDraft&) const = default;
};

/// The template shipped in assets/teacher_prompt.txt, compiled in.
std::string_view default_prompt_template();

/// Substitutes <question> and <solution> in a single left-to-right pass, so
/// tag-like text inside the question is never substituted again.
/// Throws MissingSolution for problems without a reference solution.
std::string render_prompt(const Problem& problem,
                          std::string_view prompt_template = default_prompt_template());

/// Parses the teacher's JSON object {"hints": [...], "code": "..."}.
/// Hints pass through sanitize_hint.
TeacherReply parse_reply(std::string_view raw);

/// Reads TEACHER_API_KEY; throws CredentialMissing when unset or empty.
std::string load_teacher_api_key();

/// The chat request body for one rendered prompt.
ordered_json chat_request_body(const TeacherConfig& cfg, const std::string& user_message);

class TeacherClient {
public:
    TeacherClient(TeacherConfig cfg, std::string api_key,
                  std::string prompt_template = std::string(default_prompt_template()));

    /// One synthesis request with retry on transport failures, 429 and 5xx.
    /// Parse failures are not retried unless reask_on_parse_error is set.
    /// `attempts`, when given, receives the number of HTTP requests sent.
    TeacherReply request_synthesis(const Problem& problem, int* attempts = nullptr) const;

    const TeacherConfig& config() const noexcept { return cfg_; }

    /// Total HTTP requests sent by this client.
    long requests_sent() const noexcept { return requests_.load(); }
    /// Requests that were retries of a failed attempt.
    long retries() const noexcept { return retries_.load(); }

private:
    std::string send_chat(const std::string& user_message, int& attempts) const;

    TeacherConfig cfg_;
    std::string api_key_;
    std::string template_;
    mutable std::atomic<long> requests_{0};
    mutable std::atomic<long> retries_{0};
};

ordered_json draft_to_json(const SynthDraft& draft);
SynthDraft draft_from_json(const ordered_json& j);

/// Reads a synthesis checkpoint. A torn final line from an interrupted run
/// is skipped with a warning; later records for the same id win.
std::vector<SynthDraft> read_checkpoint(const std::filesystem::path& path);

/// Synthesizes every problem with at most cfg.parallelism requests in
/// flight. The result is in input order. Per-problem failures become failed
/// drafts. With a checkpoint path, successful drafts already in the file are
/// reused, new drafts are appended as they finish, and at the end the file
/// is rewritten in input order.
std::vector<SynthDraft> synthesize_corpus(const std::vector<Problem>& problems,
                                          const TeacherClient& client,
                                          const std::optional<std::filesystem::path>& checkpoint = std::nullopt);

} // namespace gfp
