// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/inference.hpp"

#include "gfp/config.hpp"
#include "gfp/dataset.hpp"
#include "gfp/error.hpp"
#include "gfp/http.hpp"
#include "gfp/log.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

namespace gfp {
namespace {

EvalRecord start_record(const Problem& problem) {
    EvalRecord r;
    r.problem_id = problem.id;
    r.gold = problem.gold;
    return r;
}

// Code generation and execution shared by both solve variants.
void finish_with_code(EvalRecord& r, const Problem& problem, const TextGenerator& code_generator,
                      const SandboxConfig& sandbox, const NumericTolerance& tol) {
    const std::string code_input = build_code_input(problem.question, r.hints_used);
    try {
        r.code = code_generator.generate(code_input);
    } catch (const Error& e) {
        r.error = e.what();
        r.category = ErrorCategory::CompilationError;
        return;
    }
    r.outcome = run_program(r.code, sandbox);
    if (r.outcome->is_value()) r.predicted = r.outcome->value;
    r.category = error_category(*r.outcome, problem.gold, tol);
    r.correct = r.category == ErrorCategory::Correct;
}

HintList hints_from_json(const ordered_json& j) {
    return j.is_array() ? j.get<HintList>() : HintList{};
}

} // namespace

void StageEndpoint::validate() const {
    http::parse_url(url);
    if (max_new_tokens < 1) throw Error(ErrorCode::InvalidArgument, "max_new_tokens must be >= 1");
    if (!(temperature >= 0)) throw Error(ErrorCode::InvalidArgument, "endpoint temperature must be >= 0");
    if (request_timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "endpoint timeout must be > 0");
}

std::string generation_url(const std::string& base_url) {
    http::Url parsed = http::parse_url(base_url);
    if (parsed.path != "/") return base_url;
    return parsed.scheme_host_port + "/generate";
}

ordered_json generate_request_body(const std::string& prompt, const StageEndpoint& endpoint) {
    ordered_json body;
    body["prompt"] = prompt;
    body["max_new_tokens"] = endpoint.max_new_tokens;
    body["temperature"] = endpoint.temperature;
    return body;
}

HttpGenerator::HttpGenerator(StageEndpoint endpoint) : endpoint_(std::move(endpoint)) {
    endpoint_.validate();
    url_ = generation_url(endpoint_.url);
}

std::string HttpGenerator::generate(const std::string& prompt) const {
    http::Response resp;
    try {
        resp = http::post_json(url_, dump_line(generate_request_body(prompt, endpoint_)), {}, endpoint_.request_timeout);
    } catch (const Error& e) {
        throw Error(ErrorCode::EndpointError, e.what());
    }
    if (resp.status != 200) {
        throw Error(ErrorCode::EndpointError, url_ + " returned HTTP " + std::to_string(resp.status));
    }
    try {
        return nlohmann::json::parse(resp.body).at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::EndpointError, url_ + " sent a malformed reply: " + e.what());
    }
}

bool HttpGenerator::probe() const {
    return http::reachable(url_, std::min(endpoint_.request_timeout, std::chrono::milliseconds(5000)));
}

ordered_json HttpGenerator::describe() const { return to_json(endpoint_); }

HintList generate_hints(const std::string& question, const TextGenerator& hint_generator) {
    std::string raw = hint_generator.generate(question);
    HintList hints;
    for (const std::string& piece : split_hints(raw)) {
        try {
            hints.push_back(sanitize_hint(piece));
        } catch (const Error&) {
        }
    }
    if (hints.empty()) log::debug("hint model returned no hints");
    return hints;
}

EvalRecord solve(const Problem& problem, const TextGenerator& hint_generator, const TextGenerator& code_generator,
                 const SandboxConfig& sandbox, const NumericTolerance& tol) {
    EvalRecord r = start_record(problem);
    try {
        r.hints_used = generate_hints(problem.question, hint_generator);
    } catch (const Error& e) {
        r.error = e.what();
        r.category = ErrorCategory::CompilationError;
        return r;
    }
    finish_with_code(r, problem, code_generator, sandbox, tol);
    return r;
}

HintList gold_hint_prefix(const HintList& gold_hints, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) {
        throw Error(ErrorCode::InvalidArgument, "gold-hint fraction must lie in [0, 1]");
    }
    // The epsilon keeps 0.7 * 10 = 7.000000000000001 from rounding up to 8.
    double scaled = fraction * static_cast<double>(gold_hints.size());
    auto count = static_cast<std::size_t>(std::ceil(scaled - 1e-9));
    count = std::min(count, gold_hints.size());
    return HintList(gold_hints.begin(), gold_hints.begin() + static_cast<std::ptrdiff_t>(count));
}

EvalRecord solve_with_gold_hints(const Problem& problem, const HintList* gold_hints, double fraction,
                                 const TextGenerator& code_generator, const SandboxConfig& sandbox,
                                 const NumericTolerance& tol) {
    if (gold_hints == nullptr) {
        throw Error(ErrorCode::MissingGoldHints, "no verified hints for problem '" + problem.id + "'");
    }
    EvalRecord r = start_record(problem);
    r.hint_source = HintSource::Gold;
    r.gold_fraction = fraction;
    r.hints_used = gold_hint_prefix(*gold_hints, fraction);
    finish_with_code(r, problem, code_generator, sandbox, tol);
    return r;
}

std::string SuiteMode::tag() const {
    if (kind == Kind::TwoStage) return "two_stage";
    return "gold_fraction_" + format_number(fraction);
}

SuiteResult run_suite(const std::vector<Problem>& problems, const SuiteOptions& options) {
    const bool two_stage = options.mode.kind == SuiteMode::Kind::TwoStage;
    if (options.code_generator == nullptr) throw Error(ErrorCode::InvalidArgument, "run_suite needs a code generator");
    if (two_stage && options.hint_generator == nullptr) {
        throw Error(ErrorCode::InvalidArgument, "two-stage mode needs a hint generator");
    }
    if (!two_stage) gold_hint_prefix({}, options.mode.fraction);
    options.sandbox.validate();
    options.tolerance.validate();

    if (two_stage && !options.hint_generator->probe()) {
        throw Error(ErrorCode::EndpointError, "hint endpoint is unreachable");
    }
    if (!options.code_generator->probe()) throw Error(ErrorCode::EndpointError, "code endpoint is unreachable");

    std::vector<EvalRecord> records(problems.size());
    std::atomic<std::size_t> next{0};
    auto solve_one = [&](const Problem& p) {
        if (two_stage) return solve(p, *options.hint_generator, *options.code_generator, options.sandbox, options.tolerance);
        const HintList* gold = nullptr;
        if (options.gold_hints) {
            auto it = options.gold_hints->find(p.id);
            if (it != options.gold_hints->end()) gold = &it->second;
        }
        try {
            return solve_with_gold_hints(p, gold, options.mode.fraction, *options.code_generator, options.sandbox,
                                         options.tolerance);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MissingGoldHints) throw;
            EvalRecord r = start_record(p);
            r.hint_source = HintSource::Gold;
            r.gold_fraction = options.mode.fraction;
            r.error = e.what();
            return r;
        }
    };
    // Only a broken sandbox (SandboxSpawnFailure) escapes solve; it stops the suite.
    std::atomic<bool> abort{false};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < problems.size() && !abort; i = next++) {
            try {
                records[i] = solve_one(problems[i]);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                abort = true;
                return;
            }
            if (!records[i].error.empty()) log::warn("item '" + problems[i].id + "' failed: " + records[i].error);
        }
    };
    {
        std::size_t n = std::min<std::size_t>(std::max(1u, options.max_in_flight), problems.size());
        std::vector<std::jthread> pool;
        for (std::size_t i = 0; i < n; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    std::size_t correct = 0, understanding = 0, compilation = 0, failed = 0;
    for (const EvalRecord& r : records) {
        correct += r.category == ErrorCategory::Correct;
        understanding += r.category == ErrorCategory::UnderstandingError;
        compilation += r.category == ErrorCategory::CompilationError;
        failed += !r.error.empty();
    }
    ordered_json manifest;
    manifest["mode"] = two_stage ? "two_stage" : "gold_fraction";
    manifest["gold_fraction"] = two_stage ? ordered_json(nullptr) : ordered_json(options.mode.fraction);
    manifest["n_items"] = records.size();
    manifest["n_correct"] = correct;
    manifest["n_understanding_errors"] = understanding;
    manifest["n_compilation_errors"] = compilation;
    manifest["n_failed_items"] = failed;
    manifest["hint_endpoint"] = two_stage ? options.hint_generator->describe() : ordered_json(nullptr);
    manifest["code_endpoint"] = options.code_generator->describe();
    manifest["sandbox"] = to_json(options.sandbox);
    manifest["tolerance"] = to_json(options.tolerance);
    manifest["max_in_flight"] = options.max_in_flight;
    return {std::move(records), std::move(manifest)};
}

ordered_json eval_record_to_json(const EvalRecord& r) {
    ordered_json j;
    j["id"] = r.problem_id;
    j["gold"] = number_to_json(r.gold);
    j["hint_source"] = r.hint_source == HintSource::Generated ? "generated" : "gold";
    j["gold_fraction"] = r.hint_source == HintSource::Gold ? ordered_json(r.gold_fraction) : ordered_json(nullptr);
    j["hints"] = r.hints_used;
    j["code"] = r.code;
    j["outcome"] = r.outcome ? outcome_to_json(*r.outcome) : ordered_json(nullptr);
    j["predicted"] = r.predicted ? number_to_json(*r.predicted) : ordered_json(nullptr);
    j["correct"] = r.correct;
    j["category"] = to_string(r.category);
    j["error"] = r.error.empty() ? ordered_json(nullptr) : ordered_json(r.error);
    return j;
}

EvalRecord eval_record_from_json(const ordered_json& j) {
    try {
        EvalRecord r;
        r.problem_id = j.at("id").get<std::string>();
        r.gold = j.at("gold").get<double>();
        const std::string source = j.at("hint_source").get<std::string>();
        if (source != "generated" && source != "gold") throw Error(ErrorCode::SchemaError, "bad hint_source");
        r.hint_source = source == "gold" ? HintSource::Gold : HintSource::Generated;
        if (j.contains("gold_fraction") && j["gold_fraction"].is_number()) r.gold_fraction = j["gold_fraction"].get<double>();
        r.hints_used = hints_from_json(j.at("hints"));
        r.code = j.at("code").get<std::string>();
        if (!j.at("outcome").is_null()) r.outcome = outcome_from_json(j["outcome"]);
        if (j.contains("predicted") && j["predicted"].is_number()) r.predicted = j["predicted"].get<double>();
        r.correct = j.at("correct").get<bool>();
        r.category = error_category_from_string(j.at("category").get<std::string>());
        if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("bad prediction record: ") + e.what());
    }
}

void write_predictions(const std::vector<EvalRecord>& records, const std::filesystem::path& path) {
    std::string content;
    for (const EvalRecord& r : records) content += dump_line(eval_record_to_json(r)) + '\n';
    write_file_atomic(path, content);
}

std::vector<EvalRecord> read_predictions(const std::filesystem::path& path) {
    std::vector<EvalRecord> records;
    for_each_jsonl(path, [&](std::size_t line, const ordered_json& j) {
        try {
            records.push_back(eval_record_from_json(j));
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaError, path.string() + " line " + std::to_string(line) + ": " + e.what());
        }
    });
    return records;
}

std::unordered_map<std::string, HintList> load_gold_hints(const std::filesystem::path& records_path) {
    std::unordered_map<std::string, HintList> out;
    for (const SynthRecord& r : read_records(records_path)) {
        if (r.verified) out[r.problem_id] = r.hints;
    }
    return out;
}

std::vector<ContractCheck> check_generation_endpoint(const std::string& url, std::chrono::milliseconds timeout) {
    const std::string target = generation_url(url);
    std::vector<ContractCheck> checks;
    auto post = [&](const std::string& body) { return http::post_json(target, body, {}, timeout); };
    auto record = [&](std::string name, auto&& fn) {
        ContractCheck c{std::move(name), false, {}};
        try {
            c.passed = fn(c.detail);
        } catch (const std::exception& e) {
            c.detail = e.what();
        }
        checks.push_back(std::move(c));
    };

    StageEndpoint probe{url, 8, 0.0, timeout};
    const std::string valid = dump_line(generate_request_body("Q?", probe));
    std::optional<std::string> first_text;

    record("valid request returns 200 {\"text\": str}", [&](std::string& detail) {
        auto resp = post(valid);
        if (resp.status != 200) {
            detail = "status " + std::to_string(resp.status);
            return false;
        }
        auto j = nlohmann::json::parse(resp.body, nullptr, false);
        if (j.is_discarded() || !j.is_object() || !j.contains("text") || !j["text"].is_string()) {
            detail = "body is not {\"text\": str}";
            return false;
        }
        first_text = j["text"].get<std::string>();
        return true;
    });
    record("malformed JSON body returns 400", [&](std::string& detail) {
        auto resp = post("{\"prompt\": ");
        detail = "status " + std::to_string(resp.status);
        return resp.status == 400;
    });
    record("body without a prompt returns 400", [&](std::string& detail) {
        auto resp = post(R"({"max_new_tokens": 8, "temperature": 0})");
        detail = "status " + std::to_string(resp.status);
        return resp.status == 400;
    });
    record("identical requests give identical text", [&](std::string& detail) {
        if (!first_text) {
            detail = "no valid reply to compare against";
            return false;
        }
        auto resp = post(valid);
        auto j = nlohmann::json::parse(resp.body, nullptr, false);
        bool same = resp.status == 200 && !j.is_discarded() && j.is_object() && j.contains("text") &&
                    j["text"].is_string() && j["text"].get<std::string>() == *first_text;
        if (!same) detail = "second reply differs";
        return same;
    });
    return checks;
}

} // namespace gfp
