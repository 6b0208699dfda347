// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gfp/core.hpp"
#include "gfp/corpus.hpp"
#include "gfp/error.hpp"
#include "test_support.hpp"

#include <cmath>
#include <fstream>
#include <random>

using namespace gfp;

namespace {

template <typename Fn>
ErrorCode code_of(Fn&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected gfp::Error");
    return ErrorCode::InvalidArgument;
}

std::string random_text(std::mt19937& rng, std::string_view alphabet, std::size_t max_len) {
    std::uniform_int_distribution<std::size_t> len(0, max_len);
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::string s(len(rng), ' ');
    for (char& c : s) c = alphabet[pick(rng)];
    return s;
}

std::size_t count_overlapping(std::string_view text, std::string_view needle) {
    std::size_t n = 0;
    for (std::size_t pos = text.find(needle); pos != std::string_view::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("sanitize_hint replaces separators") {
    CHECK(sanitize_hint("needs 3 & 4 eggs") == "needs 3, 4 eggs");
    CHECK(sanitize_hint("plain hint") == "plain hint");
    CHECK(sanitize_hint("a ## b") == "a, b");
    CHECK(sanitize_hint("  spaced\tout \n hint ") == "spaced out hint");
    CHECK(sanitize_hint("a   &   b") == "a, b");
    CHECK(code_of([] { sanitize_hint(" \t\n"); }) == ErrorCode::EmptyHint);
    CHECK(code_of([] { sanitize_hint(""); }) == ErrorCode::EmptyHint);
}

TEST_CASE("sanitize_hint removes separators that would form at join boundaries") {
    // A trailing " &" would merge with the next " & " separator.
    std::string h = sanitize_hint("total is 5 &");
    CHECK(split_hints(join_hints({h, "next"})) == HintList{h, "next"});
    std::string lead = sanitize_hint("## heading");
    CHECK(build_code_input("Q?", {"a", lead}).find(" ## ", 4) == std::string::npos);
}

TEST_CASE("join_hints") {
    CHECK(join_hints({"h1", "h2"}) == "h1 & h2");
    CHECK(join_hints({"only"}) == "only");
    CHECK(join_hints({}) == "");
}

TEST_CASE("split_hints") {
    CHECK(split_hints("h1 & h2") == HintList{"h1", "h2"});
    CHECK(split_hints("  h1  ") == HintList{"h1"});
    CHECK(split_hints("") == HintList{});
    CHECK(split_hints(" h1 &  h2 & ") == HintList{"h1", "h2"});
}

TEST_CASE("build_code_input uses the exact separators") {
    CHECK(build_code_input("Q?", {"h1", "h2"}) == "Q? ## h1 & h2");
    CHECK(build_code_input("Q?", {}) == "Q?");
    CHECK(build_code_input("Q?", {"h"}) == "Q? ## h");
}

TEST_CASE("parse_gold_answer on GSM8K answer fields") {
    // Answer fields copied from GSM8K training records.
    CHECK(parse_gold_answer("Natalia sold 48/2 = <<48/2=24>>24 clips in May.\n"
                            "Natalia sold 48+24 = <<48+24=72>>72 clips altogether in April and May.\n#### 72") == 72);
    CHECK(parse_gold_answer("Weng earns 12/60 = $<<12/60=0.2>>0.2 per minute.\n"
                            "Working 50 minutes, she earned 0.2 x 50 = $<<0.2*50=10>>10.\n#### 10") == 10);
    CHECK(parse_gold_answer("In the beginning, Betty has only 100 / 2 = $<<100/2=50>>50.\n"
                            "Betty's grandparents gave her 15 * 2 = $<<15*2=30>>30.\n"
                            "This means, Betty needs 100 - 50 - 30 - 15 = $<<100-50-30-15=5>>5 more.\n#### 5") == 5);
    CHECK(parse_gold_answer("Maila read 12 x 2 = <<12*2=24>>24 pages today.\n"
                            "So she was able to read a total of 12 + 24 = <<12+24=36>>36 pages since yesterday.\n"
                            "There are 120 - 36 = <<120-36=84>>84 pages left to be read.\n"
                            "Since she wants to read half of the remaining pages tomorrow, then she should read "
                            "84/2 = <<84/2=42>>42 pages.\n#### 42") == 42);
    CHECK(parse_gold_answer("He writes each friend 3*2=<<3*2=6>>6 pages a week\n"
                            "So he writes 6*2=<<6*2=12>>12 pages every week\n"
                            "That means he writes 12*52=<<12*52=624>>624 pages a year\n#### 624") == 624);
    CHECK(parse_gold_answer("\xe2\x80\xa6step text\xe2\x80\xa6\n#### 18") == 18);
    CHECK(parse_gold_answer("#### 1,234") == 1234);
    CHECK(parse_gold_answer("#### -3.5") == -3.5);
    CHECK(parse_gold_answer("#### 18\n") == 18);
    CHECK(parse_gold_answer("42") == 42);
    CHECK(parse_gold_answer(" 7.25 ") == 7.25);
}

TEST_CASE("parse_gold_answer errors") {
    CHECK(code_of([] { parse_gold_answer("no marker here"); }) == ErrorCode::NoMarkerAndNotNumeric);
    CHECK(code_of([] { parse_gold_answer("#### twelve"); }) == ErrorCode::UnparsableNumber);
    CHECK(code_of([] { parse_gold_answer("#### "); }) == ErrorCode::UnparsableNumber);
    CHECK(code_of([] { parse_gold_answer("#### inf"); }) == ErrorCode::UnparsableNumber);
}

TEST_CASE("numbers_match") {
    CHECK(numbers_match(18.0, 18));
    CHECK_FALSE(numbers_match(5, 6));

    // Oracle: compute the gap in extended precision before asserting.
    // |0.333333 - 1/3| = 3.33e-7, which is inside the 1e-6 absolute bound.
    const long double gap = std::fabs(0.333333L - 1.0L / 3.0L);
    CHECK(gap == doctest::Approx(3.3333333e-7).epsilon(1e-6));
    CHECK(gap <= 1e-6L);
    CHECK(numbers_match(0.333333, 1.0 / 3.0, {1e-6, 0.0}));
    CHECK_FALSE(numbers_match(0.33333, 1.0 / 3.0, {1e-6, 0.0}));

    // Relative bound dominates for large gold values.
    CHECK(numbers_match(1e9 + 500, 1e9, {1e-6, 1e-6}));
    CHECK_FALSE(numbers_match(1e9 + 1500, 1e9, {1e-6, 1e-6}));
    CHECK_FALSE(numbers_match(NAN, 1.0));
}

TEST_CASE("numbers_match follows the stated formula on random inputs") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> value(-1e4, 1e4);
    std::uniform_real_distribution<double> tol(0, 1e-2);
    for (int i = 0; i < 2000; ++i) {
        double p = value(rng), g = value(rng);
        if (i % 3 == 0) p = g + tol(rng) * (i % 2 ? 1 : -1);
        NumericTolerance t{tol(rng), tol(rng)};
        bool expected = std::fabs(p - g) <= std::max(t.absolute, t.relative * std::fabs(g));
        CHECK(numbers_match(p, g, t) == expected);
    }
}

TEST_CASE("answer_matches accepts exact integer text") {
    CHECK(answer_matches("18", 18.0, 18));
    CHECK(answer_matches("18.0", 18.0, 18));
    CHECK_FALSE(answer_matches("17", 17.0, 18));
}

TEST_CASE("tolerance validation") {
    CHECK_NOTHROW(NumericTolerance{}.validate());
    CHECK(code_of([] { NumericTolerance{-1, 0}.validate(); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { NumericTolerance{0, INFINITY}.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("property: split(join(h)) == h for sanitized hint lists") {
    std::mt19937 rng(1234);
    std::uniform_int_distribution<int> count(0, 6);
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        HintList hints;
        for (int k = count(rng); k > 0; --k) {
            // Raw hints deliberately include separator characters.
            std::string raw = random_text(rng, "ab1 &#,", 12);
            try {
                hints.push_back(sanitize_hint(raw));
            } catch (const Error&) {
            }
        }
        for (const auto& h : hints) {
            REQUIRE(h.find(kHintSeparator) == std::string::npos);
            REQUIRE(h.find(kSectionSeparator) == std::string::npos);
            REQUIRE(trim(h) == h);
        }
        CHECK(split_hints(join_hints(hints)) == hints);
        ++checked;
    }
    CHECK(checked >= 1000);
}

TEST_CASE("property: sanitize_hint is idempotent") {
    std::mt19937 rng(99);
    int checked = 0;
    for (int i = 0; i < 3000; ++i) {
        std::string raw = random_text(rng, "xy &#\t,", 16);
        std::string once;
        try {
            once = sanitize_hint(raw);
        } catch (const Error&) {
            continue;
        }
        CHECK(sanitize_hint(once) == once);
        ++checked;
    }
    CHECK(checked >= 1000);
}

TEST_CASE("property: code input holds the question or exactly one section separator") {
    std::mt19937 rng(2024);
    std::uniform_int_distribution<int> count(0, 5);
    for (int i = 0; i < 2000; ++i) {
        std::string question = trim(random_text(rng, "What is 3+4? ab", 20));
        if (question.empty()) question = "Q?";
        HintList hints;
        for (int k = count(rng); k > 0; --k) {
            try {
                hints.push_back(sanitize_hint(random_text(rng, "h2 &#", 10)));
            } catch (const Error&) {
            }
        }
        std::string input = build_code_input(question, hints);
        if (hints.empty()) CHECK(input == question);
        else CHECK(count_overlapping(input, kSectionSeparator) == 1);
    }
}

TEST_CASE("property: parse_gold_answer inverts '#### n' for integers") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<long long> value(-1'000'000'000, 1'000'000'000);
    std::vector<long long> cases{-1'000'000'000, -1, 0, 1, 1'000'000'000};
    for (int i = 0; i < 1000; ++i) cases.push_back(value(rng));
    for (long long n : cases) {
        CHECK(parse_gold_answer("#### " + std::to_string(n)) == static_cast<double>(n));
    }
}

TEST_CASE("corpus loading") {
    testing::ScratchDir dir;
    SUBCASE("canonical JSONL") {
        std::ofstream(dir / "c.jsonl") << R"({"id":"a","question":"Q1","solution":"S1","gold":18})" "\n"
                                       << R"({"id":"b","question":"Q2","solution":null,"gold":2.5})" "\n";
        Corpus c = load_corpus(dir / "c.jsonl");
        REQUIRE(c.size() == 2);
        CHECK(c.at("a").solution == std::optional<std::string>("S1"));
        CHECK(c.at("b").gold == 2.5);
        CHECK_FALSE(c.at("b").solution);
    }
    SUBCASE("GSM8K JSONL") {
        std::ofstream(dir / "train.jsonl") << R"({"question":"Q1","answer":"step\n#### 1,200"})" "\n"
                                           << R"({"question":"Q2","answer":"#### 7"})" "\n";
        Corpus c = load_corpus(dir / "train.jsonl");
        REQUIRE(c.size() == 2);
        CHECK(c.problems()[0].id == "train-1");
        CHECK(c.problems()[0].gold == 1200);
        CHECK(c.problems()[1].solution == std::optional<std::string>("#### 7"));
    }
    SUBCASE("MultiArith array") {
        std::ofstream(dir / "ma.json") << R"([{"iIndex":3,"sQuestion":"Q","lSolutions":[9.0]}])";
        Corpus c = load_corpus(dir / "ma.json");
        CHECK(c.at("multiarith-3").gold == 9);
    }
    SUBCASE("duplicate ids are rejected") {
        std::ofstream(dir / "d.jsonl") << R"({"id":"a","question":"Q","gold":1})" "\n"
                                       << R"({"id":"a","question":"Q","gold":1})" "\n";
        CHECK(code_of([&] { load_corpus(dir / "d.jsonl"); }) == ErrorCode::SchemaError);
    }
    SUBCASE("blank question is rejected") {
        std::ofstream(dir / "e.jsonl") << R"({"id":"a","question":"  ","gold":1})" "\n";
        CHECK(code_of([&] { load_corpus(dir / "e.jsonl"); }) == ErrorCode::SchemaError);
    }
    SUBCASE("missing file") {
        CHECK(code_of([&] { load_corpus(dir / "nope.jsonl"); }) == ErrorCode::IoError);
    }
    SUBCASE("write then load") {
        std::vector<Problem> ps{{"x", "What?", "because", 3}, {"y", "Why?", std::nullopt, 0.5}};
        write_corpus(dir / "w.jsonl", ps);
        CHECK(load_corpus(dir / "w.jsonl").problems() == ps);
    }
    CHECK(code_of([] { Corpus().at("missing"); }) == ErrorCode::UnknownProblemId);
}
