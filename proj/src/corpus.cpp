// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/corpus.hpp"

#include "gfp/error.hpp"

#include <cmath>

namespace gfp {
namespace {

double gold_from_json(const ordered_json& value) {
    if (value.is_number()) return value.get<double>();
    if (value.is_string()) return parse_gold_answer(value.get<std::string>());
    throw Error(ErrorCode::SchemaError, "gold must be a number");
}

Problem problem_from_record(const ordered_json& rec, const std::string& fallback_id) {
    if (!rec.is_object()) throw Error(ErrorCode::SchemaError, "record is not an object");
    Problem p;
    if (rec.contains("sQuestion")) {
        // MultiArith
        p.id = rec.contains("iIndex") ? "multiarith-" + rec["iIndex"].dump() : fallback_id;
        p.question = rec["sQuestion"].get<std::string>();
        const auto& sols = rec.at("lSolutions");
        if (!sols.is_array() || sols.empty()) throw Error(ErrorCode::SchemaError, "lSolutions must be a non-empty array");
        p.gold = gold_from_json(sols[0]);
        return p;
    }
    if (!rec.contains("question") || !rec["question"].is_string()) {
        throw Error(ErrorCode::SchemaError, "missing string field 'question'");
    }
    p.question = rec["question"].get<std::string>();
    if (rec.contains("gold")) {
        if (!rec.contains("id") || !rec["id"].is_string()) throw Error(ErrorCode::SchemaError, "missing string field 'id'");
        p.id = rec["id"].get<std::string>();
        p.gold = gold_from_json(rec["gold"]);
        if (rec.contains("solution") && !rec["solution"].is_null()) {
            if (!rec["solution"].is_string()) throw Error(ErrorCode::SchemaError, "solution must be a string or null");
            p.solution = rec["solution"].get<std::string>();
        }
        return p;
    }
    if (rec.contains("answer") && rec["answer"].is_string()) {
        // GSM8K: the answer field is both the explained solution and the gold.
        p.id = rec.contains("id") && rec["id"].is_string() ? rec["id"].get<std::string>() : fallback_id;
        p.solution = rec["answer"].get<std::string>();
        p.gold = parse_gold_answer(*p.solution);
        return p;
    }
    throw Error(ErrorCode::SchemaError, "record has neither 'gold' nor 'answer'");
}

} // namespace

Corpus::Corpus(std::vector<Problem> problems) : problems_(std::move(problems)) {
    index_.reserve(problems_.size());
    for (std::size_t i = 0; i < problems_.size(); ++i) {
        const Problem& p = problems_[i];
        if (p.id.empty()) throw Error(ErrorCode::SchemaError, "problem " + std::to_string(i + 1) + " has an empty id");
        if (trim(p.question).empty()) throw Error(ErrorCode::SchemaError, "problem '" + p.id + "' has an empty question");
        if (!std::isfinite(p.gold)) throw Error(ErrorCode::SchemaError, "problem '" + p.id + "' has a non-finite gold answer");
        if (!index_.emplace(p.id, i).second) throw Error(ErrorCode::SchemaError, "duplicate problem id '" + p.id + "'");
    }
}

const Problem* Corpus::find(const std::string& id) const {
    auto it = index_.find(id);
    return it == index_.end() ? nullptr : &problems_[it->second];
}

const Problem& Corpus::at(const std::string& id) const {
    if (const Problem* p = find(id)) return *p;
    throw Error(ErrorCode::UnknownProblemId, "no problem with id '" + id + "'");
}

Corpus load_corpus(const std::filesystem::path& path) {
    std::string stem = path.stem().string();
    std::vector<Problem> problems;
    auto convert = [&](std::size_t number, const ordered_json& rec) {
        try {
            problems.push_back(problem_from_record(rec, stem + "-" + std::to_string(number)));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::SchemaError, path.string() + " record " + std::to_string(number) + ": " + e.what());
        } catch (const Error& e) {
            throw Error(e.code(), path.string() + " record " + std::to_string(number) + ": " + e.what());
        }
    };

    std::string content = read_file(path);
    std::size_t first = content.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && content[first] == '[') {
        ordered_json array;
        try {
            array = ordered_json::parse(content);
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(ErrorCode::SchemaError, path.string() + ": invalid JSON array (" + e.what() + ")");
        }
        for (std::size_t i = 0; i < array.size(); ++i) convert(i + 1, array[i]);
    } else {
        for_each_jsonl(path, convert);
    }
    return Corpus(std::move(problems));
}

ordered_json problem_to_json(const Problem& problem) {
    ordered_json j;
    j["id"] = problem.id;
    j["question"] = problem.question;
    j["solution"] = problem.solution ? ordered_json(*problem.solution) : ordered_json(nullptr);
    j["gold"] = number_to_json(problem.gold);
    return j;
}

void write_corpus(const std::filesystem::path& path, const std::vector<Problem>& problems) {
    std::string out;
    for (const Problem& p : problems) {
        out += dump_line(problem_to_json(p));
        out += '\n';
    }
    write_file_atomic(path, out);
}

} // namespace gfp
