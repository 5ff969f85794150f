// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "popest/estimator.hpp"

namespace popest {

struct GroundTruthRow {
    std::string type_label;
    long units = 0;
    std::optional<double> reported_diff_pct;  ///< previously published percentage, if any
};

/// |estimated - ground| / ground * 100. Ground truth is always the denominator.
double percent_diff(long estimated, long ground);

struct ReportRow {
    std::string type_label;
    long estimated_units = 0;
    long ground_units = 0;
    double diff_pct = 0.0;
    std::optional<double> reported_diff_pct;
};

/// How a previously published percentage relates to the recomputed one.
enum class DiffAgreement {
    consistent,            ///< equal after rounding to 2 decimals
    truncated,             ///< differs by less than 0.01 (digits cut rather than rounded)
    estimate_denominator,  ///< matches |e - g| / e instead of / g
    unexplained,
};

const char* to_string(DiffAgreement a) noexcept;

struct ReportFootnote {
    std::string type_label;
    double recomputed_pct = 0.0;
    double reported_pct = 0.0;
    DiffAgreement agreement = DiffAgreement::consistent;
    std::string text;
};

struct ValidationReport {
    std::vector<ReportRow> rows;  ///< sorted by type label
    ReportRow total;              ///< type_label "TOTAL"
    std::vector<ReportFootnote> footnotes;
};

/// Every label must appear on both sides; LabelMismatch lists the offenders.
ValidationReport validate_report(const SocietyEstimate& est, const std::vector<GroundTruthRow>& gt);

DiffAgreement classify_reported(long estimated, long ground, double reported_pct);

/// Ground-truth CSV: type_label,units[,reported_diff_pct]. An optional TOTAL row
/// must equal the per-type sum and only carries a reported total percentage.
std::vector<GroundTruthRow> read_ground_truth_csv(std::istream& in);

/// Report CSV: type_label,estimated_units,ground_units,diff_pct (2 decimals), last row TOTAL.
void write_report_csv(std::ostream& out, const ValidationReport& report);

} // namespace popest
