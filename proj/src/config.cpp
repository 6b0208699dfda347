// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/config.hpp"

#include "gfp/error.hpp"

#include <set>

namespace gfp {
namespace {

using std::chrono::milliseconds;

// Reads optional keys from one JSON object and rejects keys nobody asked for.
class Section {
public:
    Section(const ordered_json& j, std::string name) : j_(j), name_(std::move(name)) {
        if (!j_.is_object()) throw Error(ErrorCode::SchemaError, "config section '" + name_ + "' must be an object");
    }

    template <typename T>
    void get(const char* key, T& out) {
        seen_.insert(key);
        if (!j_.contains(key)) return;
        try {
            out = j_[key].get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::SchemaError, "config key '" + name_ + "." + key + "': " + e.what());
        }
    }

    void get_ms(const char* key, milliseconds& out) {
        long long ms = out.count();
        get(key, ms);
        out = milliseconds(ms);
    }

    const ordered_json* child(const char* key) {
        seen_.insert(key);
        return j_.contains(key) ? &j_[key] : nullptr;
    }

    void finish() const {
        for (const auto& item : j_.items()) {
            if (!seen_.count(item.key())) {
                throw Error(ErrorCode::SchemaError, "unknown config key '" + name_ + "." + item.key() + "'");
            }
        }
    }

private:
    const ordered_json& j_;
    std::string name_;
    std::set<std::string> seen_;
};

void read(const ordered_json& j, TeacherConfig& cfg) {
    Section s(j, "teacher");
    s.get("endpoint_url", cfg.endpoint_url);
    s.get("model_name", cfg.model_name);
    s.get("temperature", cfg.temperature);
    s.get("json_response", cfg.json_response);
    s.get("max_retries", cfg.max_retries);
    s.get_ms("initial_backoff_ms", cfg.initial_backoff);
    s.get("parallelism", cfg.parallelism);
    s.get_ms("request_timeout_ms", cfg.request_timeout);
    s.get("reask_on_parse_error", cfg.reask_on_parse_error);
    s.finish();
}

void read(const ordered_json& j, SandboxConfig& cfg) {
    Section s(j, "sandbox");
    s.get("interpreter_command", cfg.interpreter_command);
    s.get_ms("timeout_ms", cfg.timeout);
    s.get("max_output_bytes", cfg.max_output_bytes);
    s.get("syntax_precheck", cfg.syntax_precheck);
    s.get("max_memory_bytes", cfg.max_memory_bytes);
    s.get("max_concurrent", cfg.max_concurrent);
    s.finish();
}

void read(const ordered_json& j, StageEndpoint& ep, const std::string& name) {
    Section s(j, name);
    s.get("url", ep.url);
    s.get("max_new_tokens", ep.max_new_tokens);
    s.get("temperature", ep.temperature);
    s.get_ms("request_timeout_ms", ep.request_timeout);
    s.finish();
}

void read(const ordered_json& j, NumericTolerance& tol) {
    Section s(j, "tolerance");
    s.get("absolute", tol.absolute);
    s.get("relative", tol.relative);
    s.finish();
}

void read(const ordered_json& j, PathsConfig& p) {
    Section s(j, "paths");
    s.get("corpus", p.corpus);
    s.get("test_corpus", p.test_corpus);
    s.get("checkpoint", p.checkpoint);
    s.get("out_dir", p.out_dir);
    s.get("predictions", p.predictions);
    s.get("gold_hints", p.gold_hints);
    s.get("prompt_template", p.prompt_template);
    s.finish();
}

void read(const ordered_json& j, TrainerDefaults& t) {
    Section s(j, "trainer");
    s.get("batch_size", t.batch_size);
    s.get("epochs", t.epochs);
    s.get("learning_rate", t.learning_rate);
    s.finish();
}

} // namespace

void PipelineConfig::validate() const {
    teacher.validate();
    sandbox.validate();
    hint_endpoint.validate();
    code_endpoint.validate();
    tolerance.validate();
    for (double f : ablation_fractions) {
        if (!(f >= 0.0 && f <= 1.0)) throw Error(ErrorCode::InvalidArgument, "ablation fractions must lie in [0, 1]");
    }
    if (max_in_flight < 1) throw Error(ErrorCode::InvalidArgument, "max_in_flight must be >= 1");
    if (trainer.batch_size < 1 || trainer.epochs < 1 || !(trainer.learning_rate > 0)) {
        throw Error(ErrorCode::InvalidArgument, "trainer defaults must be positive");
    }
}

ordered_json to_json(const TeacherConfig& cfg) {
    ordered_json j;
    j["endpoint_url"] = cfg.endpoint_url;
    j["model_name"] = cfg.model_name;
    j["temperature"] = cfg.temperature;
    j["json_response"] = cfg.json_response;
    j["max_retries"] = cfg.max_retries;
    j["initial_backoff_ms"] = cfg.initial_backoff.count();
    j["parallelism"] = cfg.parallelism;
    j["request_timeout_ms"] = cfg.request_timeout.count();
    j["reask_on_parse_error"] = cfg.reask_on_parse_error;
    return j;
}

ordered_json to_json(const SandboxConfig& cfg) {
    ordered_json j;
    j["interpreter_command"] = cfg.interpreter_command;
    j["timeout_ms"] = cfg.timeout.count();
    j["max_output_bytes"] = cfg.max_output_bytes;
    j["syntax_precheck"] = cfg.syntax_precheck;
    j["max_memory_bytes"] = cfg.max_memory_bytes;
    j["max_concurrent"] = cfg.max_concurrent;
    return j;
}

ordered_json to_json(const StageEndpoint& ep) {
    ordered_json j;
    j["url"] = ep.url;
    j["max_new_tokens"] = ep.max_new_tokens;
    j["temperature"] = ep.temperature;
    j["request_timeout_ms"] = ep.request_timeout.count();
    return j;
}

ordered_json to_json(const NumericTolerance& tol) {
    ordered_json j;
    j["absolute"] = tol.absolute;
    j["relative"] = tol.relative;
    return j;
}

ordered_json to_json(const PipelineConfig& cfg) {
    ordered_json j;
    ordered_json paths;
    paths["corpus"] = cfg.paths.corpus;
    paths["test_corpus"] = cfg.paths.test_corpus;
    paths["checkpoint"] = cfg.paths.checkpoint;
    paths["out_dir"] = cfg.paths.out_dir;
    paths["predictions"] = cfg.paths.predictions;
    paths["gold_hints"] = cfg.paths.gold_hints;
    paths["prompt_template"] = cfg.paths.prompt_template;
    j["paths"] = paths;
    j["teacher"] = to_json(cfg.teacher);
    j["sandbox"] = to_json(cfg.sandbox);
    j["hint_endpoint"] = to_json(cfg.hint_endpoint);
    j["code_endpoint"] = to_json(cfg.code_endpoint);
    j["tolerance"] = to_json(cfg.tolerance);
    j["ablation_fractions"] = cfg.ablation_fractions;
    j["max_in_flight"] = cfg.max_in_flight;
    j["trainer"] = {{"batch_size", cfg.trainer.batch_size},
                    {"epochs", cfg.trainer.epochs},
                    {"learning_rate", cfg.trainer.learning_rate}};
    return j;
}

PipelineConfig pipeline_config_from_json(const ordered_json& j) {
    PipelineConfig cfg;
    Section s(j, "config");
    if (auto* c = s.child("paths")) read(*c, cfg.paths);
    if (auto* c = s.child("teacher")) read(*c, cfg.teacher);
    if (auto* c = s.child("sandbox")) read(*c, cfg.sandbox);
    if (auto* c = s.child("hint_endpoint")) read(*c, cfg.hint_endpoint, "hint_endpoint");
    if (auto* c = s.child("code_endpoint")) read(*c, cfg.code_endpoint, "code_endpoint");
    if (auto* c = s.child("tolerance")) read(*c, cfg.tolerance);
    if (auto* c = s.child("trainer")) read(*c, cfg.trainer);
    s.get("ablation_fractions", cfg.ablation_fractions);
    s.get("max_in_flight", cfg.max_in_flight);
    s.finish();
    return cfg;
}

PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    ordered_json j;
    try {
        j = ordered_json::parse(read_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, path.string() + ": " + e.what());
    }
    return pipeline_config_from_json(j);
}

void save_pipeline_config(const PipelineConfig& cfg, const std::filesystem::path& path) {
    write_file_atomic(path, to_json(cfg).dump(2) + "\n");
}

} // namespace gfp
