// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/dataset.hpp"

#include "gfp/error.hpp"

namespace gfp {
namespace {

Stage stage_from_string(std::string_view name) {
    if (name == "hint") return Stage::HintGen;
    if (name == "code") return Stage::CodeGen;
    throw Error(ErrorCode::SchemaError, "stage must be \"hint\" or \"code\"");
}

SynthRecord skeleton(const SynthDraft& draft) {
    SynthRecord r;
    r.problem_id = draft.problem_id;
    r.hints = draft.hints;
    r.code = draft.code;
    if (!draft.ok) r.synthesis_error = draft.error.empty() ? "synthesis failed" : draft.error;
    return r;
}

void set_outcome(SynthRecord& r, ExecOutcome outcome, double gold, const NumericTolerance& tol) {
    r.verified = outcome.is_value() && answer_matches(outcome.value_text, outcome.value, gold, tol);
    r.outcome = std::move(outcome);
}

} // namespace

std::string_view to_string(RecordFate fate) {
    switch (fate) {
    case RecordFate::Kept: return "kept";
    case RecordFate::WrongAnswer: return "wrong_answer";
    case RecordFate::ExecFailure: return "exec_failure";
    case RecordFate::SynthesisFailure: return "synthesis_failure";
    }
    return "?";
}

RecordFate record_fate(const SynthRecord& record) {
    if (!record.outcome) return RecordFate::SynthesisFailure;
    if (record.verified) return RecordFate::Kept;
    return record.outcome->is_value() ? RecordFate::WrongAnswer : RecordFate::ExecFailure;
}

ordered_json stats_to_json(const BuildStats& stats) {
    ordered_json j;
    j["total"] = stats.total;
    j["kept"] = stats.kept;
    j["removed_wrong_answer"] = stats.removed_wrong_answer;
    j["removed_exec_failure"] = stats.removed_exec_failure;
    j["removed_synthesis_failure"] = stats.removed_synthesis_failure;
    return j;
}

SynthRecord verify_record(const SynthDraft& draft, double gold, const SandboxConfig& cfg,
                          const NumericTolerance& tol) {
    SynthRecord r = skeleton(draft);
    if (draft.ok) set_outcome(r, run_program(draft.code, cfg), gold, tol);
    return r;
}

std::vector<SynthRecord> verify_drafts(const std::vector<SynthDraft>& drafts, const Corpus& corpus,
                                       const SandboxConfig& cfg, const NumericTolerance& tol) {
    std::vector<SynthRecord> records;
    std::vector<std::string> codes;
    std::vector<std::size_t> slots;
    records.reserve(drafts.size());
    for (const SynthDraft& d : drafts) {
        corpus.at(d.problem_id);
        if (d.ok) {
            codes.push_back(d.code);
            slots.push_back(records.size());
        }
        records.push_back(skeleton(d));
    }
    std::vector<ExecOutcome> outcomes = run_batch(codes, cfg);
    for (std::size_t k = 0; k < slots.size(); ++k) {
        SynthRecord& r = records[slots[k]];
        set_outcome(r, std::move(outcomes[k]), corpus.at(r.problem_id).gold, tol);
    }
    return records;
}

TrainingSets build_training_sets(const std::vector<SynthRecord>& records, const Corpus& corpus) {
    TrainingSets out;
    for (const SynthRecord& r : records) {
        const Problem& problem = corpus.at(r.problem_id);
        ++out.stats.total;
        switch (record_fate(r)) {
        case RecordFate::Kept:
            ++out.stats.kept;
            out.hint_pairs.push_back({Stage::HintGen, problem.question, join_hints(r.hints)});
            out.code_pairs.push_back({Stage::CodeGen, build_code_input(problem.question, r.hints), r.code});
            break;
        case RecordFate::WrongAnswer: ++out.stats.removed_wrong_answer; break;
        case RecordFate::ExecFailure: ++out.stats.removed_exec_failure; break;
        case RecordFate::SynthesisFailure: ++out.stats.removed_synthesis_failure; break;
        }
    }
    return out;
}

void write_pairs(const std::vector<TrainPair>& pairs, const std::filesystem::path& path) {
    std::string content;
    for (const TrainPair& p : pairs) {
        ordered_json j;
        j["stage"] = to_string(p.stage);
        j["input"] = p.input;
        j["target"] = p.target;
        content += dump_line(j);
        content += '\n';
    }
    write_file_atomic(path, content);
}

std::vector<TrainPair> read_pairs(const std::filesystem::path& path) {
    std::vector<TrainPair> pairs;
    for_each_jsonl(path, [&](std::size_t line, const ordered_json& j) {
        auto fail = [&](const std::string& why) {
            throw Error(ErrorCode::SchemaError, path.string() + " line " + std::to_string(line) + ": " + why);
        };
        if (!j.is_object()) fail("not an object");
        for (const char* key : {"stage", "input", "target"}) {
            if (!j.contains(key) || !j[key].is_string()) fail(std::string("missing string field '") + key + "'");
        }
        TrainPair p;
        try {
            p.stage = stage_from_string(j["stage"].get<std::string>());
        } catch (const Error& e) {
            fail(e.what());
        }
        p.input = j["input"].get<std::string>();
        p.target = j["target"].get<std::string>();
        pairs.push_back(std::move(p));
    });
    return pairs;
}

ordered_json record_to_json(const SynthRecord& record) {
    ordered_json j;
    j["id"] = record.problem_id;
    j["hints"] = record.hints;
    j["code"] = record.code;
    j["verified"] = record.verified;
    j["fate"] = to_string(record_fate(record));
    j["outcome"] = record.outcome ? outcome_to_json(*record.outcome) : ordered_json(nullptr);
    j["synthesis_error"] = record.synthesis_error.empty() ? ordered_json(nullptr) : ordered_json(record.synthesis_error);
    return j;
}

SynthRecord record_from_json(const ordered_json& j) {
    try {
        SynthRecord r;
        r.problem_id = j.at("id").get<std::string>();
        r.hints = j.at("hints").get<HintList>();
        r.code = j.at("code").get<std::string>();
        r.verified = j.at("verified").get<bool>();
        if (j.contains("outcome") && !j["outcome"].is_null()) r.outcome = outcome_from_json(j["outcome"]);
        if (j.contains("synthesis_error") && j["synthesis_error"].is_string()) {
            r.synthesis_error = j["synthesis_error"].get<std::string>();
        }
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::SchemaError, std::string("bad verified record: ") + e.what());
    }
}

void write_records(const std::vector<SynthRecord>& records, const std::filesystem::path& path) {
    std::string content;
    for (const SynthRecord& r : records) content += dump_line(record_to_json(r)) + '\n';
    write_file_atomic(path, content);
}

std::vector<SynthRecord> read_records(const std::filesystem::path& path) {
    std::vector<SynthRecord> records;
    for_each_jsonl(path, [&](std::size_t line, const ordered_json& j) {
        try {
            records.push_back(record_from_json(j));
        } catch (const Error& e) {
            throw Error(ErrorCode::SchemaError, path.string() + " line " + std::to_string(line) + ": " + e.what());
        }
    });
    return records;
}

} // namespace gfp
