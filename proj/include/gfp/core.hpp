// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gfp {

/// Separator placed between consecutive hints in a hint-stage target.
inline constexpr std::string_view kHintSeparator = " & ";
/// Separator between the question and its hints in a code-stage input.
inline constexpr std::string_view kSectionSeparator = " ## ";

/// One benchmark item. `solution` is only present for training-split items.
struct Problem {
    std::string id;
    std::string question;
    std::optional<std::string> solution;
    double gold = 0.0;

    bool operator==(const Problem&) const = default;
};

/// Ordered, sanitized hints. Every element is non-empty and free of both
/// separator tokens.
using HintList = std::vector<std::string>;

enum class Stage { HintGen, CodeGen };

std::string_view to_string(Stage stage);

/// One supervised example: `input` is what the student model sees, `target`
/// what it must learn to emit.
struct TrainPair {
    Stage stage = Stage::HintGen;
    std::string input;
    std::string target;

    bool operator==(const TrainPair&) const = default;
};

struct NumericTolerance {
    double absolute = 1e-6;
    double relative = 1e-6;

    /// Throws InvalidArgument when either bound is negative or non-finite.
    void validate() const;

    bool operator==(const NumericTolerance&) const = default;
};

std::string trim(std::string_view text);

/// Replaces every " & " and " ## " with ", ", collapses whitespace runs and
/// trims. Throws EmptyHint if nothing is left.
std::string sanitize_hint(std::string_view raw);

std::string join_hints(const HintList& hints);

/// Splits on " & ", trims each piece and drops the empty ones.
HintList split_hints(std::string_view joined);

/// `question ## h1 & h2 ...`, or the bare question when there are no hints.
std::string build_code_input(std::string_view question, const HintList& hints);

/// Extracts the number after the last "#### " marker of a GSM8K-style answer
/// field, or parses the whole field when it is a bare number. Thousands
/// separators are dropped.
double parse_gold_answer(std::string_view answer_field);

/// Strict finite-number parse of the entire (trimmed) text. Returns nullopt
/// on trailing garbage, inf or nan.
std::optional<double> parse_number(std::string_view text);

/// |predicted - gold| <= max(tol.absolute, tol.relative * |gold|)
bool numbers_match(double predicted, double gold, const NumericTolerance& tol = {});

/// Accepts `predicted_text` as a match when it is the exact integer rendering
/// of `gold`; otherwise falls back to numbers_match on the parsed value.
bool answer_matches(std::string_view predicted_text, double predicted, double gold,
                    const NumericTolerance& tol = {});

/// Shortest round-trip decimal rendering ("18", "0.25", "1e+21").
std::string format_number(double value);

} // namespace gfp
