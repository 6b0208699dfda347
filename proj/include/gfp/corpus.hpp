// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gfp/core.hpp"

#include "gfp/jsonl.hpp"

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace gfp {

/// An ordered set of problems with unique ids.
class Corpus {
public:
    Corpus() = default;
    /// Validates the Problem invariants; throws SchemaError on a duplicate id,
    /// an empty id or question, or a non-finite gold answer.
    explicit Corpus(std::vector<Problem> problems);

    const std::vector<Problem>& problems() const noexcept { return problems_; }
    std::size_t size() const noexcept { return problems_.size(); }
    bool empty() const noexcept { return problems_.empty(); }

    const Problem* find(const std::string& id) const;
    /// Throws UnknownProblemId.
    const Problem& at(const std::string& id) const;

private:
    std::vector<Problem> problems_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Loads a corpus file. Accepted layouts, detected per record:
///   - canonical JSONL: {"id", "question", "solution": str|null, "gold": number}
///   - GSM8K JSONL: {"question", "answer"}; the id is "<stem>-<line>" and the
///     gold answer is extracted from the "#### " line
///   - a JSON array (MultiArith style) of canonical records or of
///     {"iIndex", "sQuestion", "lSolutions"} objects
Corpus load_corpus(const std::filesystem::path& path);

ordered_json problem_to_json(const Problem& problem);

void write_corpus(const std::filesystem::path& path, const std::vector<Problem>& problems);

} // namespace gfp
