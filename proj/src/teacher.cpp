// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/teacher.hpp"

#include "gfp/error.hpp"
#include "gfp/http.hpp"
#include "gfp/log.hpp"

#include <cstdlib>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>
#include <unordered_set>

namespace gfp {
namespace {

constexpr std::string_view kQuestionTag = "<question>";
constexpr std::string_view kSolutionTag = "<solution>";
constexpr std::string_view kJsonReminder =
    "\n\nYour previous reply was not valid JSON. Return only the JSON object "
    "{\"hints\": [...], \"code\": \"...\"}.";

bool retryable_status(int status) { return status == 429 || status >= 500; }

// Appends drafts to the checkpoint as workers finish them.
class CheckpointSink {
public:
    explicit CheckpointSink(const std::optional<std::filesystem::path>& path) {
        if (!path) return;
        if (path->has_parent_path()) std::filesystem::create_directories(path->parent_path());
        out_.open(*path, std::ios::binary | std::ios::app);
        if (!out_) throw Error(ErrorCode::IoError, "cannot open checkpoint " + path->string());
    }

    void append(const SynthDraft& draft) {
        if (!out_.is_open()) return;
        std::string line = dump_line(draft_to_json(draft)) + '\n';
        std::lock_guard lock(mutex_);
        out_ << line << std::flush;
    }

private:
    std::mutex mutex_;
    std::ofstream out_;
};

} // namespace

void TeacherConfig::validate() const {
    if (!(temperature >= 0)) throw Error(ErrorCode::InvalidArgument, "teacher temperature must be >= 0");
    if (parallelism < 1) throw Error(ErrorCode::InvalidArgument, "teacher parallelism must be >= 1");
    if (max_retries < 0) throw Error(ErrorCode::InvalidArgument, "teacher max_retries must be >= 0");
    if (initial_backoff.count() < 0) throw Error(ErrorCode::InvalidArgument, "teacher backoff must be >= 0");
    if (request_timeout.count() <= 0) throw Error(ErrorCode::InvalidArgument, "teacher request timeout must be > 0");
    http::parse_url(endpoint_url);
}

std::string render_prompt(const Problem& problem, std::string_view prompt_template) {
    if (!problem.solution) {
        throw Error(ErrorCode::MissingSolution, "problem '" + problem.id + "' has no reference solution");
    }
    std::string out;
    out.reserve(prompt_template.size() + problem.question.size() + problem.solution->size());
    std::size_t i = 0;
    while (i < prompt_template.size()) {
        std::string_view rest = prompt_template.substr(i);
        if (rest.starts_with(kQuestionTag)) {
            out += problem.question;
            i += kQuestionTag.size();
        } else if (rest.starts_with(kSolutionTag)) {
            out += *problem.solution;
            i += kSolutionTag.size();
        } else {
            out.push_back(prompt_template[i++]);
        }
    }
    return out;
}

TeacherReply parse_reply(std::string_view raw) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(raw);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::MalformedJson, e.what());
    }
    if (!j.is_object()) throw Error(ErrorCode::WrongType, "reply is not a JSON object");
    if (!j.contains("hints")) throw Error(ErrorCode::MissingKey, "hints");
    if (!j.contains("code")) throw Error(ErrorCode::MissingKey, "code");
    const auto& hints = j["hints"];
    const auto& code = j["code"];
    if (!hints.is_array()) throw Error(ErrorCode::WrongType, "'hints' must be an array of strings");
    if (!code.is_string()) throw Error(ErrorCode::WrongType, "'code' must be a string");
    if (hints.empty()) throw Error(ErrorCode::EmptyField, "'hints' is empty");

    TeacherReply reply;
    for (const auto& h : hints) {
        if (!h.is_string()) throw Error(ErrorCode::WrongType, "'hints' must be an array of strings");
        try {
            reply.hints.push_back(sanitize_hint(h.get<std::string>()));
        } catch (const Error&) {
            throw Error(ErrorCode::EmptyField, "a hint is empty");
        }
    }
    reply.code = code.get<std::string>();
    if (trim(reply.code).empty()) throw Error(ErrorCode::EmptyField, "'code' is empty");
    return reply;
}

std::string load_teacher_api_key() {
    const char* key = std::getenv(std::string(kTeacherApiKeyEnv).c_str());
    if (key == nullptr || *key == '\0') {
        throw Error(ErrorCode::CredentialMissing,
                    "environment variable " + std::string(kTeacherApiKeyEnv) + " is not set");
    }
    return key;
}

ordered_json chat_request_body(const TeacherConfig& cfg, const std::string& user_message) {
    ordered_json body;
    body["model"] = cfg.model_name;
    body["temperature"] = cfg.temperature;
    if (cfg.json_response) body["response_format"] = {{"type", "json_object"}};
    body["messages"] = ordered_json::array({
        {{"role", "system"}, {"content", ""}},
        {{"role", "user"}, {"content", user_message}},
    });
    return body;
}

TeacherClient::TeacherClient(TeacherConfig cfg, std::string api_key, std::string prompt_template)
    : cfg_(std::move(cfg)), api_key_(std::move(api_key)), template_(std::move(prompt_template)) {
    cfg_.validate();
}

std::string TeacherClient::send_chat(const std::string& user_message, int& attempts) const {
    const std::string body = dump_line(chat_request_body(cfg_, user_message));
    http::Headers headers;
    if (!api_key_.empty()) headers.emplace_back("Authorization", "Bearer " + api_key_);

    std::string last_failure;
    auto backoff = cfg_.initial_backoff;
    for (int attempt = 0; attempt <= cfg_.max_retries; ++attempt) {
        if (attempt > 0) {
            ++retries_;
            std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
        ++attempts;
        ++requests_;
        http::Response resp;
        try {
            resp = http::post_json(cfg_.endpoint_url, body, headers, cfg_.request_timeout);
        } catch (const Error& e) {
            if (e.code() != ErrorCode::TransportError) throw;
            last_failure = e.what();
            continue;
        }
        if (retryable_status(resp.status)) {
            last_failure = "HTTP " + std::to_string(resp.status);
            continue;
        }
        if (resp.status != 200) {
            throw Error(ErrorCode::HttpStatusError, "teacher endpoint returned HTTP " + std::to_string(resp.status));
        }
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(resp.body);
            return j.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::MalformedJson, std::string("unexpected chat response: ") + e.what());
        }
    }
    throw Error(ErrorCode::TransportError,
                "gave up after " + std::to_string(cfg_.max_retries + 1) + " attempts; last failure: " + last_failure);
}

TeacherReply TeacherClient::request_synthesis(const Problem& problem, int* attempts) const {
    int sent = 0;
    const std::string prompt = render_prompt(problem, template_);
    try {
        std::string content = send_chat(prompt, sent);
        try {
            TeacherReply reply = parse_reply(content);
            if (attempts) *attempts = sent;
            return reply;
        } catch (const Error& e) {
            if (!cfg_.reask_on_parse_error || !is_parse_error(e.code())) throw;
            log::warn("problem '" + problem.id + "': unparsable reply, re-asking once");
        }
        TeacherReply reply = parse_reply(send_chat(prompt + std::string(kJsonReminder), sent));
        if (attempts) *attempts = sent;
        return reply;
    } catch (...) {
        if (attempts) *attempts = sent;
        throw;
    }
}

ordered_json draft_to_json(const SynthDraft& draft) {
    ordered_json j;
    j["id"] = draft.problem_id;
    j["status"] = draft.ok ? "ok" : "failed";
    j["hints"] = draft.hints;
    j["code"] = draft.code;
    j["error"] = draft.ok ? ordered_json(nullptr) : ordered_json(draft.error);
    return j;
}

SynthDraft draft_from_json(const ordered_json& j) {
    try {
        SynthDraft d;
        d.problem_id = j.at("id").get<std::string>();
        d.ok = j.at("status").get<std::string>() == "ok";
        d.hints = j.at("hints").get<HintList>();
        d.code = j.at("code").get<std::string>();
        if (j.contains("error") && j["error"].is_string()) d.error = j["error"].get<std::string>();
        return d;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("bad synthesis record: ") + e.what());
    }
}

std::vector<SynthDraft> read_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string() + ": file not found or unreadable");
    std::vector<SynthDraft> drafts;
    std::unordered_map<std::string, std::size_t> where;
    std::string line;
    std::size_t number = 0;
    while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        SynthDraft d;
        try {
            d = draft_from_json(ordered_json::parse(line));
        } catch (const std::exception&) {
            log::warn(path.string() + " line " + std::to_string(number) + ": skipping unreadable checkpoint record");
            continue;
        }
        auto [it, inserted] = where.emplace(d.problem_id, drafts.size());
        if (inserted) drafts.push_back(std::move(d));
        else drafts[it->second] = std::move(d);
    }
    return drafts;
}

std::vector<SynthDraft> synthesize_corpus(const std::vector<Problem>& problems, const TeacherClient& client,
                                          const std::optional<std::filesystem::path>& checkpoint) {
    std::vector<SynthDraft> previous;
    if (checkpoint && std::filesystem::exists(*checkpoint)) previous = read_checkpoint(*checkpoint);

    std::unordered_map<std::string, const SynthDraft*> done;
    for (const SynthDraft& d : previous) {
        if (d.ok) done[d.problem_id] = &d;
    }

    std::vector<SynthDraft> out(problems.size());
    std::vector<std::size_t> todo;
    for (std::size_t i = 0; i < problems.size(); ++i) {
        auto it = done.find(problems[i].id);
        if (it != done.end()) out[i] = *it->second;
        else todo.push_back(i);
    }
    if (!previous.empty()) {
        log::info("checkpoint: " + std::to_string(problems.size() - todo.size()) + " reused, " +
                  std::to_string(todo.size()) + " to request");
    }

    CheckpointSink sink(checkpoint);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> finished{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < todo.size(); k = next++) {
            const Problem& problem = problems[todo[k]];
            SynthDraft draft;
            draft.problem_id = problem.id;
            try {
                TeacherReply reply = client.request_synthesis(problem);
                draft.ok = true;
                draft.hints = std::move(reply.hints);
                draft.code = std::move(reply.code);
            } catch (const std::exception& e) {
                draft.error = e.what();
                log::warn("synthesis failed for '" + problem.id + "': " + draft.error);
            }
            sink.append(draft);
            out[todo[k]] = std::move(draft);
            std::size_t n = ++finished;
            if (n % 100 == 0) log::info("synthesized " + std::to_string(n) + "/" + std::to_string(todo.size()));
        }
    };

    std::size_t n_workers = std::min<std::size_t>(static_cast<std::size_t>(client.config().parallelism), todo.size());
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    pool.clear();

    if (checkpoint) {
        // Compact: input order first, then records for ids outside this run.
        std::unordered_set<std::string> ids;
        std::string content;
        for (const SynthDraft& d : out) {
            ids.insert(d.problem_id);
            content += dump_line(draft_to_json(d)) + '\n';
        }
        for (const SynthDraft& d : previous) {
            if (!ids.count(d.problem_id)) content += dump_line(draft_to_json(d)) + '\n';
        }
        write_file_atomic(*checkpoint, content);
    }
    return out;
}

} // namespace gfp
