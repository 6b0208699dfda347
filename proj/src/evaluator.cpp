// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#include "gfp/evaluator.hpp"

#include "gfp/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

namespace gfp {
namespace {

constexpr std::string_view kCrlf = "\r\n";

std::string avg_cell(const std::vector<std::int64_t>& values) {
    if (values.empty()) return "-";
    std::int64_t sum = 0;
    for (auto v : values) sum += v;
    return format_hundredths(divide_rounded(sum, static_cast<std::int64_t>(values.size())));
}

std::string markdown_row(const std::vector<std::string>& cells) {
    std::string out = "|";
    for (const auto& c : cells) {
        std::string escaped;
        for (char ch : c) {
            if (ch == '|') escaped += "\\|";
            else if (ch == '\n' || ch == '\r') escaped += ' ';
            else escaped += ch;
        }
        out += " " + escaped + " |";
    }
    return out + "\n";
}

std::string csv_row(const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i) out += ',';
        out += csv_field(cells[i]);
    }
    return out + std::string(kCrlf);
}

std::string render_rows(const std::vector<std::string>& header, const std::string& md_align,
                        const std::vector<std::vector<std::string>>& rows, ReportFormat format) {
    std::string out;
    if (format == ReportFormat::Csv) {
        out += csv_row(header);
        for (const auto& r : rows) out += csv_row(r);
        return out;
    }
    out += markdown_row(header);
    out += md_align + "\n";
    for (const auto& r : rows) out += markdown_row(r);
    return out;
}

} // namespace

std::int64_t divide_rounded(std::int64_t numerator, std::int64_t denominator) {
    return (2 * numerator + denominator) / (2 * denominator);
}

std::string format_hundredths(std::int64_t hundredths) {
    std::string sign = hundredths < 0 ? "-" : "";
    std::int64_t v = std::llabs(hundredths);
    std::string frac = std::to_string(v % 100);
    if (frac.size() < 2) frac.insert(0, "0");
    return sign + std::to_string(v / 100) + "." + frac;
}

Report score(const std::vector<EvalRecord>& records, const Corpus& corpus, std::string dataset_name, std::string mode,
             const NumericTolerance& tol) {
    if (records.empty()) throw Error(ErrorCode::EmptyRecordSet, "no records to score");
    Report report;
    report.dataset_name = std::move(dataset_name);
    report.mode = std::move(mode);
    for (const EvalRecord& r : records) {
        const Problem& problem = corpus.at(r.problem_id);
        ErrorCategory category = r.outcome ? error_category(*r.outcome, problem.gold, tol) : ErrorCategory::CompilationError;
        ++report.n_items;
        switch (category) {
        case ErrorCategory::Correct: ++report.n_correct; break;
        case ErrorCategory::UnderstandingError: ++report.n_understanding_errors; break;
        case ErrorCategory::CompilationError: ++report.n_compilation_errors; break;
        }
    }
    report.accuracy_hundredths =
        divide_rounded(10000 * static_cast<std::int64_t>(report.n_correct), static_cast<std::int64_t>(report.n_items));
    return report;
}

std::string csv_field(std::string_view text) {
    if (text.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(text);
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string render_report(const std::vector<Report>& reports, ReportFormat format) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::int64_t> accuracies;
    for (const Report& r : reports) {
        rows.push_back({r.dataset_name, std::to_string(r.n_items), format_hundredths(r.accuracy_hundredths),
                        std::to_string(r.n_understanding_errors), std::to_string(r.n_compilation_errors)});
        accuracies.push_back(r.accuracy_hundredths);
    }
    if (reports.size() > 1) rows.push_back({"AVG", "", avg_cell(accuracies), "", ""});
    return render_rows({"dataset", "n", "accuracy", "understanding", "compilation"},
                       "|---|---:|---:|---:|---:|", rows, format);
}

std::string render_comparison_table(const std::vector<std::string>& datasets, const std::vector<ComparisonRow>& rows,
                                    ReportFormat format) {
    std::vector<std::string> header{"Models", "#Params"};
    header.insert(header.end(), datasets.begin(), datasets.end());
    header.push_back("AVG");
    std::string align = "|---|---|";
    for (std::size_t i = 0; i <= datasets.size(); ++i) align += "---:|";

    std::vector<std::vector<std::string>> cells;
    for (const ComparisonRow& row : rows) {
        if (row.accuracies.size() != datasets.size()) {
            throw Error(ErrorCode::InvalidArgument, "row '" + row.label + "' has the wrong number of columns");
        }
        std::vector<std::string> line{row.label, row.params};
        std::vector<std::int64_t> present;
        for (const auto& acc : row.accuracies) {
            if (!acc) {
                line.emplace_back("-");
                continue;
            }
            std::int64_t h = std::llround(*acc * 100.0);
            present.push_back(h);
            line.push_back(format_hundredths(h));
        }
        line.push_back(avg_cell(present));
        cells.push_back(std::move(line));
    }
    return render_rows(header, align, cells, format);
}

std::string ablation_curve(const std::vector<std::pair<double, Report>>& reports_by_fraction) {
    std::vector<std::pair<double, std::int64_t>> points;
    for (const auto& [fraction, report] : reports_by_fraction) {
        if (!(fraction >= 0.0 && fraction <= 1.0)) {
            throw Error(ErrorCode::InvalidArgument, "fraction " + format_number(fraction) + " is outside [0, 1]");
        }
        points.emplace_back(fraction, report.accuracy_hundredths);
    }
    std::sort(points.begin(), points.end());
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (points[i].first == points[i - 1].first) {
            throw Error(ErrorCode::DuplicateFraction, "fraction " + format_number(points[i].first) + " appears twice");
        }
    }
    std::string out = "fraction,accuracy";
    out += kCrlf;
    for (const auto& [fraction, acc] : points) {
        out += format_number(fraction) + "," + format_hundredths(acc);
        out += kCrlf;
    }
    return out;
}

} // namespace gfp
