// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

// gfp: command-line driver for the synthesis, build, inference and
// evaluation pipeline. Exit codes: 0 success, 1 operational error, 2 usage.

#include "gfp/config.hpp"
#include "gfp/corpus.hpp"
#include "gfp/dataset.hpp"
#include "gfp/error.hpp"
#include "gfp/evaluator.hpp"
#include "gfp/executor.hpp"
#include "gfp/inference.hpp"
#include "gfp/log.hpp"
#include "gfp/teacher.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace gfp;

namespace {

// Flags that override config-file values when given.
struct Overrides {
    std::optional<std::string> corpus, test_corpus, checkpoint, out_dir, predictions, gold_hints, prompt_template;
    std::optional<std::string> teacher_url, teacher_model;
    std::optional<int> parallelism, max_retries;
    std::optional<std::string> hint_url, code_url;
    std::optional<unsigned> max_in_flight, max_concurrent;
    std::optional<long long> timeout_ms;
    std::optional<std::string> fractions;
};

std::vector<double> parse_fractions(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        auto v = parse_number(item);
        if (!v) throw Error(ErrorCode::InvalidArgument, "bad fraction '" + item + "'");
        out.push_back(*v);
    }
    return out;
}

PipelineConfig effective_config(const std::optional<std::string>& config_path, const Overrides& o) {
    PipelineConfig cfg = config_path ? load_pipeline_config(*config_path) : PipelineConfig{};
    auto set = [](auto& dst, const auto& src) {
        if (src) dst = *src;
    };
    set(cfg.paths.corpus, o.corpus);
    set(cfg.paths.test_corpus, o.test_corpus);
    set(cfg.paths.checkpoint, o.checkpoint);
    set(cfg.paths.out_dir, o.out_dir);
    set(cfg.paths.predictions, o.predictions);
    set(cfg.paths.gold_hints, o.gold_hints);
    set(cfg.paths.prompt_template, o.prompt_template);
    set(cfg.teacher.endpoint_url, o.teacher_url);
    set(cfg.teacher.model_name, o.teacher_model);
    set(cfg.teacher.parallelism, o.parallelism);
    set(cfg.teacher.max_retries, o.max_retries);
    set(cfg.hint_endpoint.url, o.hint_url);
    set(cfg.code_endpoint.url, o.code_url);
    set(cfg.max_in_flight, o.max_in_flight);
    set(cfg.sandbox.max_concurrent, o.max_concurrent);
    if (o.timeout_ms) cfg.sandbox.timeout = std::chrono::milliseconds(*o.timeout_ms);
    if (o.fractions) cfg.ablation_fractions = parse_fractions(*o.fractions);
    cfg.validate();
    return cfg;
}

const std::string& require_path(const std::string& value, const char* what) {
    if (value.empty()) throw Error(ErrorCode::InvalidArgument, std::string("no ") + what + " given");
    if (!fs::exists(value)) throw Error(ErrorCode::IoError, std::string(what) + " '" + value + "': file not found");
    return value;
}

fs::path manifest_path_for(const fs::path& predictions) {
    fs::path p = predictions;
    p.replace_extension(".manifest.json");
    return p;
}

void print_summary(const ordered_json& manifest) {
    log::info("items " + manifest["n_items"].dump() + ", correct " + manifest["n_correct"].dump() +
              ", understanding errors " + manifest["n_understanding_errors"].dump() + ", compilation errors " +
              manifest["n_compilation_errors"].dump());
}

int cmd_synthesize(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(require_path(cfg.paths.corpus, "corpus"));
    std::string api_key = load_teacher_api_key();
    std::string tmpl = cfg.paths.prompt_template.empty()
                           ? std::string(default_prompt_template())
                           : read_file(require_path(cfg.paths.prompt_template, "prompt template"));
    TeacherClient client(cfg.teacher, api_key, tmpl);
    auto drafts = synthesize_corpus(corpus.problems(), client, fs::path(cfg.paths.checkpoint));
    std::size_t ok = 0;
    for (const auto& d : drafts) ok += d.ok;
    log::info("synthesized " + std::to_string(ok) + "/" + std::to_string(drafts.size()) + " problems into " +
              cfg.paths.checkpoint);
    return 0;
}

int cmd_build(const PipelineConfig& cfg) {
    const std::string& in = require_path(cfg.paths.checkpoint, "synthesis checkpoint");
    Corpus corpus = load_corpus(require_path(cfg.paths.corpus, "corpus"));
    auto drafts = read_checkpoint(in);
    auto records = verify_drafts(drafts, corpus, cfg.sandbox, cfg.tolerance);
    TrainingSets sets = build_training_sets(records, corpus);
    const fs::path out = cfg.paths.out_dir;
    write_pairs(sets.hint_pairs, out / "hint_pairs.jsonl");
    write_pairs(sets.code_pairs, out / "code_pairs.jsonl");
    write_records(records, out / "records.jsonl");
    write_file_atomic(out / "stats.json", stats_to_json(sets.stats).dump(2) + "\n");
    std::cout << stats_to_json(sets.stats).dump(2) << "\n";
    return 0;
}

int cmd_infer(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(require_path(cfg.paths.test_corpus, "test corpus"));
    HttpGenerator hints(cfg.hint_endpoint);
    HttpGenerator code(cfg.code_endpoint);
    SuiteOptions opts;
    opts.hint_generator = &hints;
    opts.code_generator = &code;
    opts.sandbox = cfg.sandbox;
    opts.tolerance = cfg.tolerance;
    opts.max_in_flight = cfg.max_in_flight;
    SuiteResult result = run_suite(corpus.problems(), opts);
    write_predictions(result.records, cfg.paths.predictions);
    write_file_atomic(manifest_path_for(cfg.paths.predictions), result.manifest.dump(2) + "\n");
    print_summary(result.manifest);
    return 0;
}

int cmd_ablate(const PipelineConfig& cfg) {
    Corpus corpus = load_corpus(require_path(cfg.paths.test_corpus, "test corpus"));
    auto gold = load_gold_hints(require_path(cfg.paths.gold_hints, "gold hints"));
    HttpGenerator code(cfg.code_endpoint);
    const fs::path out = cfg.paths.out_dir;
    std::vector<std::pair<double, Report>> curve;
    std::vector<Report> reports;
    for (double f : cfg.ablation_fractions) {
        SuiteOptions opts;
        opts.mode = SuiteMode::gold(f);
        opts.code_generator = &code;
        opts.gold_hints = &gold;
        opts.sandbox = cfg.sandbox;
        opts.tolerance = cfg.tolerance;
        opts.max_in_flight = cfg.max_in_flight;
        SuiteResult result = run_suite(corpus.problems(), opts);
        fs::path preds = out / ("predictions_gold_" + format_number(f) + ".jsonl");
        write_predictions(result.records, preds);
        write_file_atomic(manifest_path_for(preds), result.manifest.dump(2) + "\n");
        Report r = score(result.records, corpus, "gold " + format_number(f), opts.mode.tag(), cfg.tolerance);
        curve.emplace_back(f, r);
        reports.push_back(r);
    }
    std::string csv = ablation_curve(curve);
    write_file_atomic(out / "ablation.csv", csv);
    std::cout << csv;
    return 0;
}

struct EvalArgs {
    std::vector<std::string> preds;
    std::vector<std::string> names;
    std::string format = "markdown";
    std::string label;
    std::string params;
};

// Predictions carry their gold answers, so eval also works without the
// original corpus.
Corpus corpus_from_predictions(const std::vector<EvalRecord>& records) {
    std::vector<Problem> problems;
    for (const EvalRecord& r : records) problems.push_back({r.problem_id, r.problem_id, std::nullopt, r.gold});
    return Corpus(std::move(problems));
}

std::string mode_of(const std::vector<EvalRecord>& records) {
    if (records.empty() || records.front().hint_source == HintSource::Generated) return "two_stage";
    return SuiteMode::gold(records.front().gold_fraction).tag();
}

int cmd_eval(const PipelineConfig& cfg, const EvalArgs& args, const std::optional<std::string>& corpus_flag) {
    if (args.preds.empty()) throw Error(ErrorCode::InvalidArgument, "no --preds given");
    if (!args.names.empty() && args.names.size() != args.preds.size()) {
        throw Error(ErrorCode::InvalidArgument, "--name must be given once per --preds");
    }
    std::optional<Corpus> corpus;
    if (corpus_flag) corpus = load_corpus(require_path(*corpus_flag, "corpus"));

    std::vector<Report> reports;
    for (std::size_t i = 0; i < args.preds.size(); ++i) {
        auto records = read_predictions(require_path(args.preds[i], "predictions"));
        std::string name = args.names.empty() ? fs::path(args.preds[i]).stem().string() : args.names[i];
        Corpus fallback = corpus ? Corpus{} : corpus_from_predictions(records);
        reports.push_back(score(records, corpus ? *corpus : fallback, name, mode_of(records), cfg.tolerance));
    }

    const fs::path out = cfg.paths.out_dir;
    auto emit = [&](ReportFormat fmt, const char* file) {
        std::string text = render_report(reports, fmt);
        write_file_atomic(out / file, text);
        std::cout << text;
    };
    if (args.format == "markdown" || args.format == "both") emit(ReportFormat::Markdown, "report.md");
    if (args.format == "csv" || args.format == "both") emit(ReportFormat::Csv, "report.csv");

    if (!args.label.empty()) {
        ComparisonRow row{args.label, args.params, {}};
        std::vector<std::string> datasets;
        for (const Report& r : reports) {
            datasets.push_back(r.dataset_name);
            row.accuracies.emplace_back(r.accuracy_percent());
        }
        write_file_atomic(out / "table.md", render_comparison_table(datasets, {row}, ReportFormat::Markdown));
    }
    return 0;
}

int cmd_exec(const PipelineConfig& cfg, const std::string& file) {
    std::string code = read_file(require_path(file, "program file"));
    ExecOutcome outcome = run_program(code, cfg.sandbox);
    std::cout << describe(outcome) << "\n";
    if (!outcome.is_value() && !outcome.stderr_excerpt.empty()) log::info("stderr:\n" + outcome.stderr_excerpt);
    return 0;
}

int cmd_check_endpoint(const std::string& url) {
    bool all = true;
    for (const ContractCheck& c : check_generation_endpoint(url)) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name;
        if (!c.passed && !c.detail.empty()) std::cout << " (" << c.detail << ")";
        std::cout << "\n";
        all = all && c.passed;
    }
    return all ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gap-filling hint + program-of-thought pipeline"};
    app.require_subcommand(1);
    app.fallthrough();
    std::optional<std::string> config_path;
    bool quiet = false;
    app.add_option("--config", config_path, "JSON pipeline config; flags override it");
    app.add_flag("-q,--quiet", quiet, "only log errors");

    Overrides o;
    auto* synth = app.add_subcommand("synthesize", "teacher synthesis: corpus -> checkpoint JSONL");
    synth->add_option("--corpus", o.corpus, "training corpus");
    synth->add_option("--checkpoint,--out", o.checkpoint, "synthesis checkpoint (resumed if present)");
    synth->add_option("--endpoint", o.teacher_url, "chat-completions URL");
    synth->add_option("--model", o.teacher_model, "teacher model name");
    synth->add_option("--parallelism", o.parallelism, "requests in flight");
    synth->add_option("--max-retries", o.max_retries, "retries per request");
    synth->add_option("--template", o.prompt_template, "prompt template file");

    auto* build = app.add_subcommand("build", "verify a checkpoint and write the training pairs");
    build->add_option("--in,--checkpoint", o.checkpoint, "synthesis checkpoint");
    build->add_option("--corpus", o.corpus, "training corpus");
    build->add_option("--out-dir", o.out_dir, "output directory");
    build->add_option("--max-concurrent", o.max_concurrent, "parallel sandbox runs");
    build->add_option("--timeout-ms", o.timeout_ms, "per-program timeout");

    auto* infer = app.add_subcommand("infer", "two-stage inference over a test corpus");
    infer->add_option("--corpus", o.test_corpus, "test corpus");
    infer->add_option("--hint-url", o.hint_url, "hint model endpoint");
    infer->add_option("--code-url", o.code_url, "code model endpoint");
    infer->add_option("--out", o.predictions, "predictions JSONL");
    infer->add_option("--max-in-flight", o.max_in_flight, "items processed concurrently");
    infer->add_option("--timeout-ms", o.timeout_ms, "per-program timeout");

    auto* ablate = app.add_subcommand("ablate", "gold-hint ablation sweep");
    ablate->add_option("--corpus", o.test_corpus, "test corpus");
    ablate->add_option("--gold-hints", o.gold_hints, "records.jsonl from build");
    ablate->add_option("--code-url", o.code_url, "code model endpoint");
    ablate->add_option("--fractions", o.fractions, "comma-separated fractions in [0,1]");
    ablate->add_option("--out-dir", o.out_dir, "output directory");
    ablate->add_option("--max-in-flight", o.max_in_flight, "items processed concurrently");

    EvalArgs eval_args;
    std::optional<std::string> eval_corpus;
    auto* eval = app.add_subcommand("eval", "score predictions and render reports");
    eval->add_option("--preds", eval_args.preds, "predictions JSONL (repeatable)");
    eval->add_option("--name", eval_args.names, "dataset name per --preds");
    eval->add_option("--corpus", eval_corpus, "corpus with gold answers (default: golds stored in predictions)");
    eval->add_option("--format", eval_args.format, "markdown, csv or both")
        ->check(CLI::IsMember({"markdown", "csv", "both"}));
    eval->add_option("--out-dir", o.out_dir, "output directory (default: current directory)");
    eval->add_option("--label", eval_args.label, "also write table.md with this system label");
    eval->add_option("--params", eval_args.params, "parameter count shown in table.md");

    std::string exec_file;
    auto* exec = app.add_subcommand("exec", "run one program file in the sandbox");
    exec->add_option("--file", exec_file, "program file")->required();
    exec->add_option("--timeout-ms", o.timeout_ms, "timeout");

    std::string endpoint_url;
    auto* check = app.add_subcommand("check-endpoint", "test a generation server against the wire contract");
    check->add_option("--url", endpoint_url, "server base URL")->required();

    auto* show = app.add_subcommand("config", "print the effective configuration");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "gfp: " << e.what() << "\n\n" << app.help();
        return 2;
    }

    log::set_quiet(quiet);
    try {
        if (eval->parsed() && !o.out_dir) o.out_dir = ".";
        PipelineConfig cfg = effective_config(config_path, o);
        if (synth->parsed()) return cmd_synthesize(cfg);
        if (build->parsed()) return cmd_build(cfg);
        if (infer->parsed()) return cmd_infer(cfg);
        if (ablate->parsed()) return cmd_ablate(cfg);
        if (eval->parsed()) return cmd_eval(cfg, eval_args, eval_corpus);
        if (exec->parsed()) return cmd_exec(cfg, exec_file);
        if (check->parsed()) return cmd_check_endpoint(endpoint_url);
        if (show->parsed()) {
            std::cout << to_json(cfg).dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        log::error(e.what());
        return 1;
    }
    return 2;
}
