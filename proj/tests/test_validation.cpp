// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The popest Authors

#include <doctest.h>

#include <sstream>

#include "popest/validation.hpp"

using namespace popest;

namespace {

SocietyEstimate society(const std::map<std::string, long>& units) {
    SocietyEstimate s;
    for (const auto& [k, u] : units) {
        s.by_type[k].units = u;
        s.total_units += u;
    }
    return s;
}

} // namespace

TEST_CASE("percent difference uses ground truth as denominator") {
    CHECK(percent_diff(136, 133) == doctest::Approx(300.0 / 133.0));
    CHECK(percent_diff(133, 136) == doctest::Approx(300.0 / 136.0));
    CHECK(percent_diff(50, 50) == 0.0);
    CHECK(percent_diff(0, 10) == doctest::Approx(100.0));
    CHECK_THROWS_AS(percent_diff(5, 0), InvalidArgument);
}

TEST_CASE("reported percentage classification") {
    CHECK(classify_reported(240, 241, 0.41) == DiffAgreement::consistent);
    CHECK(classify_reported(136, 133, 2.25) == DiffAgreement::truncated);
    CHECK(classify_reported(208, 211, 1.44) == DiffAgreement::estimate_denominator);
    CHECK(classify_reported(32, 31, 3.1) == DiffAgreement::estimate_denominator);
    CHECK(classify_reported(32, 43, 34.35) == DiffAgreement::estimate_denominator);
    CHECK(classify_reported(100, 100, 7.0) == DiffAgreement::unexplained);
    CHECK(std::string(to_string(DiffAgreement::truncated)) == "truncated");
}

TEST_CASE("report rows, totals and footnotes") {
    const auto est = society({{"B", 30}, {"A", 90}});
    const std::vector<GroundTruthRow> gt = {{"A", 100, 10.0}, {"B", 30, 5.0}};
    const auto rep = validate_report(est, gt);
    REQUIRE(rep.rows.size() == 2);
    CHECK(rep.rows[0].type_label == "A");
    CHECK(rep.rows[0].diff_pct == doctest::Approx(10.0));
    CHECK(rep.total.type_label == "TOTAL");
    CHECK(rep.total.estimated_units == 120);
    CHECK(rep.total.ground_units == 130);
    CHECK(rep.total.diff_pct == doctest::Approx(1000.0 / 130.0));
    REQUIRE(rep.footnotes.size() == 2);
    CHECK(rep.footnotes[0].type_label == "A");
    CHECK(rep.footnotes[0].agreement == DiffAgreement::consistent);
    CHECK(rep.footnotes[1].type_label == "B");
    CHECK(rep.footnotes[1].agreement == DiffAgreement::unexplained);
    CHECK(rep.footnotes[1].text.find("unexplained") != std::string::npos);
}

TEST_CASE("label mismatch") {
    const auto est = society({{"A", 10}, {"C", 5}});
    const std::vector<GroundTruthRow> gt = {{"A", 10, std::nullopt}, {"B", 5, std::nullopt}};
    try {
        validate_report(est, gt);
        FAIL("expected throw");
    } catch (const LabelMismatch& e) {
        const std::string msg = e.what();
        CHECK(msg.find("B") != std::string::npos);
        CHECK(msg.find("C") != std::string::npos);
    }
}

TEST_CASE("stated total must equal the per-type sum") {
    const auto est = society({{"A", 10}});
    CHECK_THROWS(validate_report(est, {{"A", 10, std::nullopt}, {"TOTAL", 11, std::nullopt}}));
    const auto rep = validate_report(est, {{"A", 12, std::nullopt}, {"TOTAL", 12, 16.0}});
    CHECK(rep.total.reported_diff_pct == 16.0);
    CHECK(rep.total.diff_pct == doctest::Approx(200.0 / 12.0));
}

TEST_CASE("ground-truth and report CSV") {
    std::istringstream in("type_label,units,reported_diff_pct\nType1,133,2.25\nType2,211,\nTOTAL,344,\n");
    const auto gt = read_ground_truth_csv(in);
    REQUIRE(gt.size() == 3);
    CHECK(gt[0].units == 133);
    CHECK(*gt[0].reported_diff_pct == 2.25);
    CHECK_FALSE(gt[1].reported_diff_pct);

    std::istringstream plain("type_label,units\nX,5\n");
    CHECK(read_ground_truth_csv(plain).size() == 1);
    std::istringstream bad("type_label,units\nX,five\n");
    CHECK_THROWS_AS(read_ground_truth_csv(bad), ParseError);
    std::istringstream neg("type_label,units\nX,-1\n");
    CHECK_THROWS(read_ground_truth_csv(neg));

    const auto rep = validate_report(society({{"Type1", 136}, {"Type2", 208}}), gt);
    std::ostringstream out;
    write_report_csv(out, rep);
    CHECK(out.str() ==
          "type_label,estimated_units,ground_units,diff_pct\n"
          "Type1,136,133,2.26\n"
          "Type2,208,211,1.42\n"
          "TOTAL,344,344,0.00\n");
}
