#include <doctest.h>

#include <string>
#include <vector>

#include "rbeval/domain.hpp"
#include "rbeval/errors.hpp"
#include "rbeval/records_io.hpp"
#include "test_util.hpp"

using namespace rbeval;
using testutil::TempDir;

TEST_CASE("run record JSONL round trip preserves every field") {
    RunRecord r;
    r.run_id = "m:b:role_framing:2";
    r.model_id = "m";
    r.base_id = "b";
    r.family = Family::RoleFraming;
    r.variant_index = 2;
    r.artifact_type = Artifact::KeyloggerCode;
    r.prompt_text = "line one\nline two, with comma";
    r.response_text = "I can't help with that.";
    r.outcome = Outcome::PartialCompliance;
    r.valid = true;
    r.timestamp = "2026-01-02T03:04:05Z";

    const auto j = record_to_json(r);
    const RunRecord back = record_from_json(j);
    CHECK(back.run_id == r.run_id);
    CHECK(back.model_id == r.model_id);
    CHECK(back.base_id == r.base_id);
    CHECK(back.family == r.family);
    CHECK(back.variant_index == r.variant_index);
    CHECK(back.artifact_type == r.artifact_type);
    CHECK(back.prompt_text == r.prompt_text);
    CHECK(back.response_text == r.response_text);
    CHECK(back.outcome == r.outcome);
    CHECK(back.valid == r.valid);
    CHECK(back.timestamp == r.timestamp);
}

TEST_CASE("uncoded outcome serializes as null") {
    RunRecord r;
    r.run_id = "x";
    const auto j = record_to_json(r);
    CHECK(j.at("outcome").is_null());
    CHECK(!record_from_json(j).outcome.has_value());
}

TEST_CASE("records file round trip") {
    TempDir dir;
    std::vector<RunRecord> recs(3);
    for (int i = 0; i < 3; ++i) {
        recs[i].run_id = "r" + std::to_string(i);
        recs[i].model_id = "m";
        recs[i].base_id = "b" + std::to_string(i);
        recs[i].outcome = i == 0 ? std::optional<Outcome>{} : std::optional<Outcome>{Outcome::Refusal};
    }
    write_records(dir.file("r.jsonl"), recs);
    const auto back = read_records(dir.file("r.jsonl"));
    REQUIRE(back.size() == 3);
    CHECK(back[1].base_id == "b1");
    CHECK(!back[0].outcome.has_value());
    CHECK(back[2].outcome == Outcome::Refusal);
}

TEST_CASE("duplicate run ids in a records file are rejected") {
    TempDir dir;
    std::vector<RunRecord> recs(2);
    recs[0].run_id = recs[1].run_id = "same";
    write_records(dir.file("dup.jsonl"), recs);
    CHECK_THROWS_WITH_AS(read_records(dir.file("dup.jsonl")), doctest::Contains("same"),
                         ValidationError);
}

TEST_CASE("malformed JSONL reports the line number") {
    TempDir dir;
    testutil::write_file(dir.file("bad.jsonl"),
                         R"({"id":"a","text":"t","artifact_type":"malware_code","refusal_verified":true})"
                         "\nnot json at all\n");
    CHECK_THROWS_WITH_AS(read_corpus(dir.file("bad.jsonl")), doctest::Contains(":2:"),
                         ValidationError);
}

TEST_CASE("corpus round trip and duplicate id rejection") {
    TempDir dir;
    std::vector<BasePrompt> corpus(2);
    corpus[0] = {"a", "text a", Artifact::MalwareCode, true};
    corpus[1] = {"b", "text b", Artifact::OtherMixed, false};
    write_corpus(dir.file("c.jsonl"), corpus);
    const auto back = read_corpus(dir.file("c.jsonl"));
    REQUIRE(back.size() == 2);
    CHECK(back[0].artifact_type == Artifact::MalwareCode);
    CHECK(back[0].refusal_verified);
    CHECK(!back[1].refusal_verified);

    corpus[1].id = "a";
    write_corpus(dir.file("dup.jsonl"), corpus);
    CHECK_THROWS_AS(read_corpus(dir.file("dup.jsonl")), ValidationError);
}

TEST_CASE("perturbed prompt round trip") {
    TempDir dir;
    std::vector<PerturbedPrompt> ps(1);
    ps[0] = {"b:conditional_framing:4", "b", Family::ConditionalFraming, 4, "text",
             Artifact::RansomwareText};
    write_prompts(dir.file("p.jsonl"), ps);
    const auto back = read_prompts(dir.file("p.jsonl"));
    REQUIRE(back.size() == 1);
    CHECK(back[0].family == Family::ConditionalFraming);
    CHECK(back[0].variant_index == 4);
    CHECK(back[0].artifact_type == Artifact::RansomwareText);
}

TEST_CASE("missing file raises a validation error") {
    CHECK_THROWS_AS(read_records("/nonexistent/nowhere.jsonl"), ValidationError);
}

TEST_CASE("record json rejects unknown outcome strings") {
    nlohmann::json j = record_to_json(RunRecord{});
    j["outcome"] = "definitely";
    CHECK_THROWS_AS(record_from_json(j), ValidationError);
}
