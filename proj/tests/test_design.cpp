#include <doctest.h>

#include <vector>

#include "rbeval/errors.hpp"
#include "rbeval/stats/design.hpp"
#include "rbeval/stats/glm.hpp"

using namespace rbeval;
using namespace rbeval::stats;

namespace {

RunRecord rec(Family f, Artifact a, Outcome o, const std::string& base = "b0") {
    RunRecord r;
    static int k = 0;
    r.run_id = "run-" + std::to_string(k++);
    r.model_id = "m";
    r.base_id = base;
    r.family = f;
    r.artifact_type = a;
    r.outcome = o;
    return r;
}

std::vector<RunRecord> two_family_sample() {
    std::vector<RunRecord> v;
    // role_framing is most frequent (3 rows); magnitude_scaling has 2.
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::FullCompliance));
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::MagnitudeScaling, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::MagnitudeScaling, Artifact::OtherMixed, Outcome::PartialCompliance));
    return v;
}

}  // namespace

TEST_CASE("encode_factors builds intercept plus dummies with the modal reference") {
    const auto dm = encode_factors(two_family_sample(), {Predictor::Family});
    CHECK(dm.n() == 5);
    CHECK(dm.p() == 2);
    REQUIRE(dm.col_names.size() == 2);
    CHECK(dm.col_names[0] == "(intercept)");
    CHECK(dm.col_names[1] == "family:magnitude_scaling");  // role_framing is the reference
    REQUIRE(dm.factors.size() == 1);
    CHECK(dm.factors[0].levels ==
          std::vector<std::string>{"role_framing", "magnitude_scaling"});
    CHECK(dm.factors[0].reference == 0);

    for (std::size_t i = 0; i < 5; ++i) CHECK(dm.X(static_cast<Eigen::Index>(i), 0) == 1.0);
    CHECK(dm.X(0, 1) == 0.0);
    CHECK(dm.X(3, 1) == 1.0);
    CHECK(dm.X(4, 1) == 1.0);
}

TEST_CASE("responses and clusters align with rows") {
    const auto dm = encode_factors(two_family_sample(), {Predictor::Family});
    CHECK(dm.y_flip == std::vector<int>{0, 1, 0, 0, 1});
    CHECK(dm.y_full == std::vector<int>{0, 1, 0, 0, 0});
    CHECK(dm.y3 == std::vector<int>{0, 2, 0, 0, 1});
    CHECK(dm.cluster_ids == std::vector<std::string>{"b0", "b0", "b0", "b0", "b0"});
}

TEST_CASE("frequency ties resolve to the earlier canonical level") {
    std::vector<RunRecord> v;
    v.push_back(rec(Family::ConditionalFraming, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::AbstractionPressure, Artifact::OtherMixed, Outcome::Refusal));
    const auto dm = encode_factors(v, {Predictor::Family});
    CHECK(dm.factors[0].reference == 0);  // conditional_framing comes first canonically
    CHECK(dm.col_names[1] == "family:abstraction_pressure");
}

TEST_CASE("reference override is honored and validated") {
    const auto dm = encode_factors(two_family_sample(), {Predictor::Family},
                                   {{"family", "magnitude_scaling"}});
    CHECK(dm.factors[0].reference == 1);
    CHECK(dm.col_names[1] == "family:role_framing");

    CHECK_THROWS_WITH_AS(
        encode_factors(two_family_sample(), {Predictor::Family},
                       {{"family", "conditional_framing"}}),
        doctest::Contains("not observed"), AnalysisError);
}

TEST_CASE("two predictors stack their dummy blocks") {
    std::vector<RunRecord> v = two_family_sample();
    v.push_back(rec(Family::RoleFraming, Artifact::MalwareCode, Outcome::Refusal));
    v.push_back(rec(Family::MagnitudeScaling, Artifact::MalwareCode, Outcome::Refusal));
    const auto dm = encode_factors(v, {Predictor::Family, Predictor::ArtifactType});
    CHECK(dm.p() == 3);
    CHECK(dm.col_names[1] == "family:magnitude_scaling");
    CHECK(dm.col_names[2] == "artifact_type:malware_code");  // other_mixed is modal
    // Dummy columns of one factor plus its reference add up to the intercept.
    for (std::size_t i = 0; i < dm.n(); ++i) {
        double family_sum = dm.X(static_cast<Eigen::Index>(i), 1);
        const bool is_reference = dm.factors[0].codes[i] == dm.factors[0].reference;
        CHECK(family_sum + (is_reference ? 1.0 : 0.0) == 1.0);
    }
}

TEST_CASE("a factor with one observed level is rejected") {
    std::vector<RunRecord> v;
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::FullCompliance));
    CHECK_THROWS_WITH_AS(encode_factors(v, {Predictor::Family}),
                         doctest::Contains("fewer than two"), AnalysisError);
}

TEST_CASE("no coded records is an analysis error") {
    std::vector<RunRecord> v;
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::Refusal));
    v[0].outcome.reset();
    CHECK_THROWS_AS(encode_factors(v, {Predictor::Family}), AnalysisError);
}

TEST_CASE("rank deficiency names the collinear column") {
    // Duplicate the dummy column by hand and check the fit refuses it.
    const auto dm = encode_factors(two_family_sample(), {Predictor::Family});
    Eigen::MatrixXd X(dm.X.rows(), 3);
    X.col(0) = dm.X.col(0);
    X.col(1) = dm.X.col(1);
    X.col(2) = dm.X.col(1);  // exact copy
    std::vector<std::string> names = {"(intercept)", "family:magnitude_scaling", "dup"};
    CHECK_THROWS_WITH_AS(fit_binary_logistic(X, dm.y_flip, names, "flip"),
                         doctest::Contains("rank deficient"), AnalysisError);
    // The named column must be one of the two interchangeable copies.
    try {
        fit_binary_logistic(X, dm.y_flip, names, "flip");
    } catch (const AnalysisError& e) {
        const std::string msg = e.what();
        const bool names_a_copy = msg.find("family:magnitude_scaling") != std::string::npos ||
                                  msg.find("dup") != std::string::npos;
        CHECK(names_a_copy);
        CHECK(msg.find("(intercept)") == std::string::npos);
    }
}

TEST_CASE("scan_separation flags constant and tiny strata") {
    std::vector<RunRecord> v;
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::MagnitudeScaling, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::MagnitudeScaling, Artifact::OtherMixed, Outcome::FullCompliance));
    v.push_back(rec(Family::ConstraintInsertion, Artifact::OtherMixed, Outcome::Refusal));
    const auto dm = encode_factors(v, {Predictor::Family});
    const auto scan = scan_separation(dm, dm.y_flip);
    REQUIRE(scan.constant_strata.size() == 1);
    CHECK(scan.constant_strata[0].factor == "family");
    CHECK(scan.constant_strata[0].level == "role_framing");
    CHECK(scan.constant_strata[0].n == 2);
    REQUIRE(scan.small_strata.size() == 1);
    CHECK(scan.small_strata[0].level == "constraint_insertion");
    CHECK(scan.any());
}

TEST_CASE("detect_separation reports constant-outcome strata in canonical order") {
    std::vector<RunRecord> v;
    // malware: always refusal. ransomware: mixed. keylogger: single record.
    v.push_back(rec(Family::RoleFraming, Artifact::MalwareCode, Outcome::Refusal));
    v.push_back(rec(Family::RoleFraming, Artifact::MalwareCode, Outcome::Refusal));
    v.push_back(rec(Family::RoleFraming, Artifact::RansomwareText, Outcome::Refusal));
    v.push_back(rec(Family::RoleFraming, Artifact::RansomwareText, Outcome::FullCompliance));
    v.push_back(rec(Family::RoleFraming, Artifact::KeyloggerCode, Outcome::PartialCompliance));

    const auto seps = detect_separation(v, Predictor::ArtifactType);
    REQUIRE(seps.size() == 2);
    CHECK(seps[0].factor == "artifact_type");
    CHECK(seps[0].level == "keylogger_code");
    CHECK(seps[0].constant_outcome == Outcome::PartialCompliance);
    CHECK(seps[0].small_stratum);
    CHECK(seps[1].level == "malware_code");
    CHECK(seps[1].constant_outcome == Outcome::Refusal);
    CHECK(seps[1].n == 2);
    CHECK(!seps[1].small_stratum);
}

TEST_CASE("detect_separation is empty when every stratum is mixed") {
    std::vector<RunRecord> v;
    v.push_back(rec(Family::RoleFraming, Artifact::MalwareCode, Outcome::Refusal));
    v.push_back(rec(Family::RoleFraming, Artifact::MalwareCode, Outcome::FullCompliance));
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::Refusal));
    v.push_back(rec(Family::RoleFraming, Artifact::OtherMixed, Outcome::PartialCompliance));
    CHECK(detect_separation(v, Predictor::ArtifactType).empty());
}
