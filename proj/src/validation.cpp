// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include "popest/validation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <set>

#include "popest/csv.hpp"

namespace popest {

double percent_diff(long estimated, long ground) {
    if (ground == 0) throw InvalidArgument("percent_diff: ground truth of 0 units has no baseline");
    return std::abs(static_cast<double>(estimated - ground)) / static_cast<double>(ground) * 100.0;
}

const char* to_string(DiffAgreement a) noexcept {
    switch (a) {
    case DiffAgreement::consistent: return "consistent";
    case DiffAgreement::truncated: return "truncated";
    case DiffAgreement::estimate_denominator: return "estimate_denominator";
    case DiffAgreement::unexplained: return "unexplained";
    }
    return "unexplained";
}

DiffAgreement classify_reported(long estimated, long ground, double reported_pct) {
    const double recomputed = percent_diff(estimated, ground);
    const double gap = std::abs(recomputed - reported_pct);
    if (gap <= 0.005 + 1e-9) return DiffAgreement::consistent;
    if (gap < 0.01 && reported_pct <= recomputed) return DiffAgreement::truncated;
    if (estimated != 0) {
        const double alt = std::abs(static_cast<double>(estimated - ground)) /
                           static_cast<double>(estimated) * 100.0;
        if (std::abs(alt - reported_pct) < 0.05) return DiffAgreement::estimate_denominator;
    }
    return DiffAgreement::unexplained;
}

namespace {

ReportFootnote make_footnote(const ReportRow& row) {
    ReportFootnote note;
    note.type_label = row.type_label;
    note.recomputed_pct = row.diff_pct;
    note.reported_pct = *row.reported_diff_pct;
    note.agreement = classify_reported(row.estimated_units, row.ground_units, note.reported_pct);
    const std::string recomputed = csv::fixed(row.diff_pct, 2);
    const std::string reported = csv::fixed(note.reported_pct, 2);
    switch (note.agreement) {
    case DiffAgreement::consistent:
        note.text = row.type_label + ": reported " + reported + " agrees with recomputed " + recomputed;
        break;
    case DiffAgreement::truncated:
        note.text = row.type_label + ": reported " + reported + " vs recomputed " + recomputed +
                    " (reported value truncated, not rounded)";
        break;
    case DiffAgreement::estimate_denominator:
        note.text = row.type_label + ": reported " + reported + " vs recomputed " + recomputed +
                    " (reported value uses the estimate as denominator: " +
                    csv::fixed(std::abs(static_cast<double>(row.estimated_units - row.ground_units)) /
                                   static_cast<double>(row.estimated_units) * 100.0,
                               2) +
                    ")";
        break;
    case DiffAgreement::unexplained:
        note.text = row.type_label + ": reported " + reported + " vs recomputed " + recomputed +
                    " (unexplained discrepancy)";
        break;
    }
    return note;
}

} // namespace

ValidationReport validate_report(const SocietyEstimate& est, const std::vector<GroundTruthRow>& gt) {
    std::map<std::string, const GroundTruthRow*> truth;
    const GroundTruthRow* stated_total = nullptr;
    for (const auto& row : gt) {
        if (row.type_label == "TOTAL") {
            stated_total = &row;
            continue;
        }
        if (!truth.emplace(row.type_label, &row).second)
            throw InvalidArgument("duplicate ground-truth type '" + row.type_label + "'");
    }
    std::vector<std::string> missing;
    for (const auto& [label, totals] : est.by_type)
        if (!truth.count(label)) missing.push_back(label);
    for (const auto& [label, row] : truth)
        if (!est.by_type.count(label)) missing.push_back(label);
    if (!missing.empty()) {
        std::sort(missing.begin(), missing.end());
        std::string msg = "type labels present on one side only:";
        for (const auto& m : missing) msg += " " + m;
        throw LabelMismatch(msg, missing);
    }

    ValidationReport report;
    report.total.type_label = "TOTAL";
    for (const auto& [label, row] : truth) {
        ReportRow r;
        r.type_label = label;
        r.estimated_units = est.by_type.at(label).units;
        r.ground_units = row->units;
        r.diff_pct = percent_diff(r.estimated_units, r.ground_units);
        r.reported_diff_pct = row->reported_diff_pct;
        report.total.estimated_units += r.estimated_units;
        report.total.ground_units += r.ground_units;
        report.rows.push_back(std::move(r));
    }
    report.total.diff_pct = percent_diff(report.total.estimated_units, report.total.ground_units);
    if (stated_total) {
        if (stated_total->units != report.total.ground_units)
            throw InvalidArgument("ground-truth TOTAL row (" + std::to_string(stated_total->units) +
                                  ") disagrees with the per-type sum (" +
                                  std::to_string(report.total.ground_units) + ")");
        report.total.reported_diff_pct = stated_total->reported_diff_pct;
    }
    for (const auto& r : report.rows)
        if (r.reported_diff_pct) report.footnotes.push_back(make_footnote(r));
    if (report.total.reported_diff_pct) report.footnotes.push_back(make_footnote(report.total));
    return report;
}

std::vector<GroundTruthRow> read_ground_truth_csv(std::istream& in) {
    const auto t = csv::read(in);
    const auto c_type = t.column("type_label");
    const auto c_units = t.column("units");
    const auto c_reported = t.find_column("reported_diff_pct");
    std::vector<GroundTruthRow> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
        const auto& row = t.rows[i];
        GroundTruthRow g;
        g.type_label = row[c_type];
        g.units = csv::parse_integer(row[c_units], t.lines[i], "units");
        if (g.units < 0) throw ParseError("units must be >= 0", t.lines[i]);
        if (c_reported && !row[*c_reported].empty())
            g.reported_diff_pct = csv::parse_real(row[*c_reported], t.lines[i], "reported_diff_pct");
        if (!seen.insert(g.type_label).second)
            throw ParseError("duplicate type_label '" + g.type_label + "'", t.lines[i]);
        out.push_back(std::move(g));
    }
    return out;
}

void write_report_csv(std::ostream& out, const ValidationReport& report) {
    out << "type_label,estimated_units,ground_units,diff_pct\n";
    auto emit = [&](const ReportRow& r) {
        out << csv::escape(r.type_label) << ',' << r.estimated_units << ',' << r.ground_units << ','
            << csv::fixed(r.diff_pct, 2) << '\n';
    };
    for (const auto& r : report.rows) emit(r);
    emit(report.total);
}

} // namespace popest
