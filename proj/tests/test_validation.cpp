#include <catch2/catch_amalgamated.hpp>

#include "restim/validation.hpp"

using namespace restim;
using namespace restim::validation;

TEST_CASE("fresh suite passes end to end") {
    const ValidationReport report = run_validation(20240811);
    for (const CheckResult& check : report.checks) {
        INFO(check.name << ": " << check.details);
        CHECK(check.passed);
    }
    CHECK(report.all_passed());

    const nlohmann::json doc = report.to_json();
    CHECK(doc.at("all_passed") == true);
    CHECK(doc.at("checks").size() == report.checks.size());
    REQUIRE(doc.at("findings").contains("update_rule_coefficient"));
    REQUIRE(doc.at("findings").contains("opportunity_threshold_formula"));

    SECTION("findings flag the inconsistent printed variants") {
        const auto& update_rule = doc.at("findings").at("update_rule_coefficient");
        CHECK(update_rule.at("implemented_consistent_with_quadrature") == true);
        CHECK(update_rule.at("alternate_consistent_with_quadrature") == false);

        const auto& threshold = doc.at("findings").at("opportunity_threshold_formula");
        CHECK(threshold.at("implemented_consistent_with_simulated_usage") == true);
        CHECK(threshold.at("alternate_consistent_with_simulated_usage") == false);
        for (const auto& row : threshold.at("per_gamma")) {
            CHECK(row.at("linear_exponent_matches_usage") == false);
            CHECK(row.at("plateau_matches_sqrt_within_tenth_horizon") == true);
        }
    }

    SECTION("report serialization is deterministic") {
        CHECK(report.to_json().dump(2) == report.to_json().dump(2));
    }
}

TEST_CASE("injected doubled coefficient is caught by the quadrature route") {
    const CheckResult good =
        check_update_rule_coefficient(stage_gain_linear_coefficient, "lambda_beta_plus_one");
    const CheckResult bad =
        check_update_rule_coefficient(stage_gain_doubled_coefficient, "two_lambda_beta_plus_one");
    CHECK(good.passed);
    CHECK_FALSE(bad.passed);
}

TEST_CASE("injected linear usage exponent is caught by the simulated usage") {
    const CheckResult good = check_usage_law(usage_sqrt_exponent, "sqrt_exponent", 99, 4000);
    const CheckResult bad = check_usage_law(usage_linear_exponent, "linear_exponent", 99, 4000);
    CHECK(good.passed);
    CHECK_FALSE(bad.passed);
}

TEST_CASE("usage candidates are far apart at high snr") {
    // the two printed formulas disagree by more than 17 budget units at
    // gamma = 10, T = 100, which is what makes the mismatch detectable
    CHECK(usage_linear_exponent(100, 10.0) - usage_sqrt_exponent(100, 10.0) > 17.0);
}
