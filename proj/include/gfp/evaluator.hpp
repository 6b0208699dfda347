// Copyright (c) 2026 The GFP Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include "gfp/core.hpp"
#include "gfp/corpus.hpp"
#include "gfp/inference.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace gfp {

/// Accuracy and error taxonomy for one dataset. Accuracy is kept as an
/// integer number of hundredths of a percent, so rendering never drifts.
struct Report {
    std::string dataset_name;
    std::size_t n_items = 0;
    std::size_t n_correct = 0;
    std::int64_t accuracy_hundredths = 0;
    std::size_t n_understanding_errors = 0;
    std::size_t n_compilation_errors = 0;
    std::string mode;

    double accuracy_percent() const { return static_cast<double>(accuracy_hundredths) / 100.0; }

    bool operator==(const Report&) const = default;
};

/// round(numerator / denominator), ties away from zero, for nonnegative
/// operands.
std::int64_t divide_rounded(std::int64_t numerator, std::int64_t denominator);

/// "24.87", "73.00"
std::string format_hundredths(std::int64_t hundredths);

/// Re-derives every category from the outcome and the corpus gold answer
/// rather than trusting the stored flags. A record without an outcome counts
/// as a compilation error. Throws EmptyRecordSet or UnknownProblemId.
Report score(const std::vector<EvalRecord>& records, const Corpus& corpus, std::string dataset_name,
             std::string mode = "two_stage", const NumericTolerance& tol = {});

enum class ReportFormat { Markdown, Csv };

/// Columns: dataset, n, accuracy, understanding, compilation. More than one
/// report adds an AVG row holding the mean accuracy.
std::string render_report(const std::vector<Report>& reports, ReportFormat format);

/// One row of a system-comparison table: models down, datasets across,
/// then an AVG column over the datasets that have a value.
struct ComparisonRow {
    std::string label;
    std::string params;
    std::vector<std::optional<double>> accuracies; // one per dataset column
};

std::string render_comparison_table(const std::vector<std::string>& datasets, const std::vector<ComparisonRow>& rows,
                                    ReportFormat format);

/// CSV "fraction,accuracy" sorted by fraction. Throws DuplicateFraction.
std::string ablation_curve(const std::vector<std::pair<double, Report>>& reports_by_fraction);

/// RFC 4180 field quoting.
std::string csv_field(std::string_view text);

} // namespace gfp
