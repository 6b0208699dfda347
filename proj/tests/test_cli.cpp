// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include "gfp/corpus.hpp"
#include "gfp/dataset.hpp"
#include "gfp/jsonl.hpp"
#include "test_support.hpp"

#include <fstream>

using namespace gfp;
using gfp::testing::MockReply;
using gfp::testing::MockRequest;
using gfp::testing::MockServer;
using gfp::testing::run_command;

namespace {

const std::string kCli = GFP_CLI_PATH;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string quote(const std::filesystem::path& p) { return "'" + p.string() + "'"; }

} // namespace

TEST_CASE("exec prints the outcome") {
    testing::ScratchDir dir;
    std::ofstream(dir / "prog.py") << "result = 2 + 3\n";
    auto r = run_command(kCli + " exec --file " + quote(dir / "prog.py"));
    CHECK(r.exit_code == 0);
    CHECK(r.out == "Value(5)\n");
}

TEST_CASE("missing input exits 1") {
    auto r = run_command(kCli + " -q build --in /nonexistent/ckpt.jsonl --corpus /nonexistent/c.jsonl 2>&1");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("not found") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
    CHECK(run_command(kCli + " frobnicate 2>/dev/null").exit_code == 2);
    CHECK(run_command(kCli + " exec 2>/dev/null").exit_code == 2);
    CHECK(run_command(kCli + " --help >/dev/null").exit_code == 0);
}

TEST_CASE("config prints the effective settings") {
    auto r = run_command(kCli + " config");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["trainer"]["batch_size"] == 8);
    CHECK(j["teacher"]["temperature"] == 0.0);
}

TEST_CASE("eval writes the requested reports") {
    testing::ScratchDir dir;
    std::ofstream(dir / "preds.jsonl")
        << R"({"id":"a","gold":1,"hint_source":"generated","gold_fraction":null,"hints":[],"code":"result = 1",)"
           R"("outcome":{"status":"Value","value":1,"value_text":"1","stderr":"","exit_code":0},"predicted":1,"correct":true,"category":"correct","error":null})"
        << "\n"
        << R"({"id":"b","gold":2,"hint_source":"generated","gold_fraction":null,"hints":[],"code":"",)"
           R"("outcome":null,"predicted":null,"correct":false,"category":"compilation_error","error":"down"})"
        << "\n";
    auto r = run_command(kCli + " -q eval --preds " + quote(dir / "preds.jsonl") + " --name Toy --format csv --out-dir " +
                         quote(dir.path()) + " 2>&1");
    INFO(r.out);
    REQUIRE(r.exit_code == 0);
    CHECK(slurp(dir / "report.csv") == "dataset,n,accuracy,understanding,compilation\r\nToy,2,50.00,0,1\r\n");
    CHECK_FALSE(std::filesystem::exists(dir / "report.md"));
}

TEST_CASE("full pipeline through the command line") {
    testing::ScratchDir dir;
    // Three training problems; the teacher gets one of them wrong.
    write_corpus(dir / "train.jsonl", {{"t1", "What is 2+2?", "#### 4", 4},
                                       {"t2", "What is 3*3?", "#### 9", 9},
                                       {"t3", "What is 10-7?", "#### 3", 3}});
    write_corpus(dir / "test.jsonl", {{"e1", "What is 5+5?", std::nullopt, 10}, {"e2", "What is 6+1?", std::nullopt, 7}});

    MockServer teacher([](const MockRequest& req) {
        auto body = nlohmann::json::parse(req.body);
        std::string prompt = body["messages"][1]["content"];
        std::string code = "result = 0";
        if (prompt.find("2+2") != std::string::npos) code = "result = 2 + 2";
        if (prompt.find("3*3") != std::string::npos) code = "result = 3 * 3";
        nlohmann::json content{{"hints", {"look at the numbers", "combine them"}}, {"code", code}};
        return MockReply{200, testing::chat_reply(content.dump())};
    });
    auto hints = testing::generation_server([](const std::string&) { return "add the two numbers"; });
    auto code = testing::generation_server([](const std::string& in) {
        return in.starts_with("What is 5+5?") ? std::string("result = 5 + 5") : std::string("result = 6 - 1");
    });

    std::string env = "TEACHER_API_KEY=sk-test ";
    auto synth = run_command(env + kCli + " -q synthesize --corpus " + quote(dir / "train.jsonl") + " --checkpoint " +
                             quote(dir / "synth.jsonl") + " --endpoint " + teacher.url() + "/v1/chat/completions 2>&1");
    INFO(synth.out);
    REQUIRE(synth.exit_code == 0);
    CHECK(teacher.hits() == 3);

    auto build = run_command(kCli + " -q build --in " + quote(dir / "synth.jsonl") + " --corpus " +
                             quote(dir / "train.jsonl") + " --out-dir " + quote(dir / "out") + " 2>&1");
    INFO(build.out);
    REQUIRE(build.exit_code == 0);
    auto code_pairs = read_pairs(dir / "out/code_pairs.jsonl");
    REQUIRE(code_pairs.size() == 2);
    CHECK(code_pairs[0].input == "What is 2+2? ## look at the numbers & combine them");
    CHECK(nlohmann::json::parse(slurp(dir / "out/stats.json"))["removed_wrong_answer"] == 1);

    auto infer = run_command(kCli + " -q infer --corpus " + quote(dir / "test.jsonl") + " --hint-url " + hints->url() +
                             " --code-url " + code->url() + " --out " + quote(dir / "preds.jsonl") + " 2>&1");
    INFO(infer.out);
    REQUIRE(infer.exit_code == 0);
    CHECK(std::filesystem::exists(dir / "preds.manifest.json"));

    auto eval = run_command(kCli + " -q eval --preds " + quote(dir / "preds.jsonl") + " --name Mock --corpus " +
                            quote(dir / "test.jsonl") + " --format both --out-dir " + quote(dir.path()) + " 2>&1");
    INFO(eval.out);
    REQUIRE(eval.exit_code == 0);
    CHECK(slurp(dir / "report.csv") == "dataset,n,accuracy,understanding,compilation\r\nMock,2,50.00,1,0\r\n");
    CHECK(std::filesystem::exists(dir / "report.md"));
}

TEST_CASE("synthesize without a key exits 1") {
    testing::ScratchDir dir;
    write_corpus(dir / "train.jsonl", {{"t1", "Q", "#### 1", 1}});
    auto r = run_command("env -u TEACHER_API_KEY " + kCli + " -q synthesize --corpus " + quote(dir / "train.jsonl") +
                         " --checkpoint " + quote(dir / "s.jsonl") + " 2>&1");
    CHECK(r.exit_code == 1);
    CHECK(r.out.find("TEACHER_API_KEY") != std::string::npos);
}

TEST_CASE("check-endpoint") {
    auto good = testing::generation_server([](const std::string& p) { return p; });
    auto ok = run_command(kCli + " check-endpoint --url " + good->url());
    CHECK(ok.exit_code == 0);
    MockServer bad([](const MockRequest&) { return MockReply{200, "{\"text\":\"x\"}"}; });
    CHECK(run_command(kCli + " -q check-endpoint --url " + bad.url() + " 2>&1").exit_code == 1);
}

TEST_CASE("global options work after the subcommand") {
    testing::ScratchDir dir;
    std::ofstream(dir / "cfg.json") << R"({"trainer":{"epochs":3}})";
    for (const std::string& args : {" --config " + quote(dir / "cfg.json") + " config",
                                    " config --config " + quote(dir / "cfg.json")}) {
        auto r = run_command(kCli + args);
        REQUIRE(r.exit_code == 0);
        CHECK(nlohmann::json::parse(r.out)["trainer"]["epochs"] == 3);
    }
}
