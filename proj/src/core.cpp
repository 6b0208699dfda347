// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/core.hpp"

#include "gfp/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>

namespace gfp {
namespace {

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

// Collapses every whitespace run into one space and trims the ends.
std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char c : text) {
        if (is_space(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) out.push_back(' ');
        pending_space = false;
        out.push_back(c);
    }
    return out;
}

// One substitution pass over `text` padded with a space on each side, so a
// separator that would form at a join boundary (a leading "& " or a trailing
// " ##") is caught too.
std::string replace_separators_once(std::string_view text) {
    std::string padded;
    padded.reserve(text.size() + 2);
    padded.push_back(' ');
    padded.append(text);
    padded.push_back(' ');

    std::string out;
    out.reserve(padded.size());
    std::size_t i = 0;
    while (i < padded.size()) {
        std::string_view rest(padded.data() + i, padded.size() - i);
        std::size_t skip = 0;
        if (rest.starts_with(kHintSeparator)) skip = kHintSeparator.size();
        else if (rest.starts_with(kSectionSeparator)) skip = kSectionSeparator.size();
        if (skip == 0) {
            out.push_back(padded[i++]);
            continue;
        }
        while (!out.empty() && is_space(out.back())) out.pop_back();
        out += ", ";
        i += skip;
        while (i < padded.size() && is_space(padded[i])) ++i;
    }
    return collapse_whitespace(out);
}

} // namespace

std::string_view to_string(Stage stage) {
    return stage == Stage::HintGen ? "hint" : "code";
}

void NumericTolerance::validate() const {
    if (!std::isfinite(absolute) || !std::isfinite(relative) || absolute < 0 || relative < 0) {
        throw Error(ErrorCode::InvalidArgument, "tolerances must be finite and nonnegative");
    }
}

std::string trim(std::string_view text) {
    auto first = std::find_if_not(text.begin(), text.end(), is_space);
    auto last = std::find_if_not(text.rbegin(), text.rend(), is_space).base();
    return first < last ? std::string(first, last) : std::string();
}

std::string sanitize_hint(std::string_view raw) {
    std::string current = collapse_whitespace(raw);
    // A replacement can expose a new separator (", & x"), so iterate to a
    // fixpoint. Every productive pass shortens the text.
    for (;;) {
        std::string next = replace_separators_once(current);
        if (next == current) break;
        current = std::move(next);
    }
    if (current.empty()) {
        throw Error(ErrorCode::EmptyHint, "hint is empty after sanitization");
    }
    return current;
}

std::string join_hints(const HintList& hints) {
    std::string out;
    for (std::size_t i = 0; i < hints.size(); ++i) {
        if (i > 0) out += kHintSeparator;
        out += hints[i];
    }
    return out;
}

HintList split_hints(std::string_view joined) {
    HintList hints;
    std::size_t start = 0;
    for (;;) {
        std::size_t pos = joined.find(kHintSeparator, start);
        std::string piece = trim(joined.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (!piece.empty()) hints.push_back(std::move(piece));
        if (pos == std::string_view::npos) break;
        start = pos + kHintSeparator.size();
    }
    return hints;
}

std::string build_code_input(std::string_view question, const HintList& hints) {
    std::string out(question);
    if (hints.empty()) return out;
    out += kSectionSeparator;
    out += join_hints(hints);
    return out;
}

std::optional<double> parse_number(std::string_view text) {
    std::string body = trim(text);
    std::string_view view = body;
    if (view.starts_with('+')) view.remove_prefix(1);
    if (view.empty()) return std::nullopt;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), value);
    if (ec != std::errc() || ptr != view.data() + view.size() || !std::isfinite(value)) {
        return std::nullopt;
    }
    return value;
}

double parse_gold_answer(std::string_view answer_field) {
    constexpr std::string_view kMarker = "#### ";
    std::size_t marker = answer_field.rfind(kMarker);
    if (marker == std::string_view::npos) {
        if (auto bare = parse_number(answer_field)) return *bare;
        throw Error(ErrorCode::NoMarkerAndNotNumeric,
                    "answer has no '#### ' marker and is not a number");
    }
    std::string_view tail = answer_field.substr(marker + kMarker.size());
    tail = tail.substr(0, tail.find('\n'));
    std::string digits;
    for (char c : tail) {
        if (c != ',') digits.push_back(c);
    }
    if (auto value = parse_number(digits)) return *value;
    throw Error(ErrorCode::UnparsableNumber, "cannot parse gold answer '" + trim(tail) + "'");
}

bool numbers_match(double predicted, double gold, const NumericTolerance& tol) {
    if (!std::isfinite(predicted) || !std::isfinite(gold)) return false;
    return std::fabs(predicted - gold) <= std::max(tol.absolute, tol.relative * std::fabs(gold));
}

bool answer_matches(std::string_view predicted_text, double predicted, double gold,
                    const NumericTolerance& tol) {
    constexpr double kExactIntegerLimit = 9007199254740992.0; // 2^53
    if (std::isfinite(gold) && std::trunc(gold) == gold && std::fabs(gold) < kExactIntegerLimit) {
        if (trim(predicted_text) == std::to_string(static_cast<std::int64_t>(gold))) return true;
    }
    return numbers_match(predicted, gold, tol);
}

std::string format_number(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

} // namespace gfp
