#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "codirector/errors.hpp"
#include "codirector/verifiers.hpp"

using namespace codirector;
using nlohmann::json;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(FIXTURE_DIR) + "/" + name);
    REQUIRE(in.good());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace

TEST_CASE("extract_json_object strips fences, prose, and trailing noise") {
    CHECK(extract_json_object("```json\n{\"a\": 1}\n```") == "{\"a\": 1}");
    CHECK(extract_json_object("Sure, here you go:\n{\"a\": {\"b\": 2}} trailing") ==
          "{\"a\": {\"b\": 2}}");
    CHECK(extract_json_object(R"({"s": "brace } in string", "x": 1})") ==
          R"({"s": "brace } in string", "x": 1})");
    CHECK(extract_json_object(R"({"s": "escaped \" quote }", "x": 1})") ==
          R"({"s": "escaped \" quote }", "x": 1})");
    CHECK_THROWS_AS(extract_json_object("no json here"), SchemaError);
    CHECK_THROWS_AS(extract_json_object("{\"unbalanced\": 1"), SchemaError);
}

TEST_CASE("golden storyline report parses and round-trips exactly") {
    const std::string doc = fixture("storyline_report.json");
    const VerifierReport report = parse_storyline_report(doc);
    CHECK(report.score == doctest::Approx(80.0));
    CHECK(report.breakdown.at("hook_quality") == doctest::Approx(16.0));
    CHECK(report.breakdown.size() == 5);
    CHECK_FALSE(report.efficacy.has_value());

    const json serialized = serialize_storyline_report(report);
    CHECK(serialized == json::parse(doc));
    // a second pass through parse/serialize is a fixed point
    CHECK(serialize_storyline_report(parse_storyline_report(serialized.dump())) == serialized);
}

TEST_CASE("golden keyframe report parses and round-trips") {
    const std::string doc = fixture("keyframe_report.json");
    const VerifierReport report = parse_keyframe_report(doc);
    CHECK(report.score == doctest::Approx(67.5));
    REQUIRE(report.flagged_indices.has_value());
    CHECK(*report.flagged_indices == std::vector<int>{1, 3});
    REQUIRE(report.efficacy.has_value());
    CHECK(report.efficacy->narrative_mode == doctest::Approx(64.0));
    CHECK(report.actionable_feedback ==
          "Regenerate the flagged frames keeping the protagonist's jacket and making the "
          "product label legible.");

    const json serialized = serialize_keyframe_report(report);
    CHECK(serialize_keyframe_report(parse_keyframe_report(serialized.dump())) == serialized);
}

TEST_CASE("golden video report parses and round-trips exactly") {
    const std::string doc = fixture("video_report.json");
    const VerifierReport report = parse_video_report(doc);
    CHECK(report.score == doctest::Approx(83.0));
    CHECK(report.primary_fault == "video");
    REQUIRE(report.efficacy.has_value());
    CHECK(report.efficacy->creative_strategy == doctest::Approx(84.0));
    REQUIRE(report.efficacy_justifications.has_value());
    CHECK(report.efficacy_justifications->size() == 3);

    const json serialized = serialize_video_report(report);
    CHECK(serialized == json::parse(doc));
    CHECK(serialize_video_report(parse_video_report(serialized.dump())) == serialized);

    const FactoredReward reward = extract_reward(report);
    CHECK(reward.r_cs == doctest::Approx(84.0));
    CHECK(reward.r_nm == doctest::Approx(76.0));
    CHECK(reward.r_aa == doctest::Approx(81.0));
    CHECK(reward.aggregate == doctest::Approx(83.0));
}

TEST_CASE("golden bench report parses and round-trips exactly") {
    const std::string doc = fixture("bench_report.json");
    const BenchScores scores = parse_bench_report(doc);
    CHECK(scores.vaf == doctest::Approx(91.0));
    CHECK(scores.vq == doctest::Approx(74.0));
    const json serialized = serialize_bench_report(scores);
    CHECK(serialized == json::parse(doc));
}

TEST_CASE("reward extraction requires the efficacy triple") {
    VerifierReport report = parse_storyline_report(fixture("storyline_report.json"));
    CHECK_THROWS_AS(extract_reward(report), ContractError);
}

namespace {

json random_video_report(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> slot(0.0, 20.0);
    std::uniform_real_distribution<double> pct(0.0, 100.0);
    json doc;
    double sum = 0.0;
    for (const auto& key : video_breakdown_keys()) {
        const double v = slot(rng);
        doc["breakdown"][key] = v;
        sum += v;
    }
    doc["score"] = sum;
    doc["mab_efficacy_scores"] = {{"creative_strategy", pct(rng)},
                                  {"narrative_mode", pct(rng)},
                                  {"aesthetic_archetype", pct(rng)}};
    doc["feedback"] = "random feedback";
    doc["actionable_feedback"] = "random directive";
    doc["primary_fault"] = std::vector<std::string>{"storyline", "image", "video"}[rng() % 3];
    return doc;
}

}  // namespace

TEST_CASE("1000 randomized valid reports satisfy score == sum(breakdown)") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 1000; ++i) {
        const json doc = random_video_report(rng);
        const VerifierReport report = parse_video_report(doc.dump());
        double sum = 0.0;
        for (const auto& [key, v] : report.breakdown) sum += v;
        CHECK(report.score == doctest::Approx(sum).epsilon(1e-9));
    }
}

TEST_CASE("1000 mutated invalid reports are rejected with field-naming errors") {
    std::mt19937_64 rng(123);
    int rejected = 0;
    for (int i = 0; i < 1000; ++i) {
        json doc = random_video_report(rng);
        std::string expected_fragment;
        switch (i % 8) {
            case 0:
                doc.erase("score");
                expected_fragment = "score";
                break;
            case 1:
                doc["score"] = doc["score"].get<double>() + 1.0;
                expected_fragment = "score";
                break;
            case 2:
                doc["breakdown"].erase("coherence");
                expected_fragment = "coherence";
                break;
            case 3:
                doc["breakdown"]["visual_quality"] = 25.0;  // above the 0-20 slot
                expected_fragment = "visual_quality";
                break;
            case 4:
                doc.erase("mab_efficacy_scores");
                expected_fragment = "mab_efficacy_scores";
                break;
            case 5:
                doc["primary_fault"] = "audio";
                expected_fragment = "primary_fault";
                break;
            case 6:
                doc.erase("actionable_feedback");
                expected_fragment = "actionable_feedback";
                break;
            case 7:
                doc["mab_efficacy_scores"]["narrative_mode"] = -5.0;
                expected_fragment = "narrative_mode";
                break;
        }
        try {
            parse_video_report(doc.dump());
        } catch (const SchemaError& e) {
            ++rejected;
            CHECK(std::string(e.what()).find(expected_fragment) != std::string::npos);
        }
    }
    CHECK(rejected == 1000);
}

TEST_CASE("keyframe flags default to empty and reject bad payloads") {
    json doc = json::parse(fixture("keyframe_report.json"));
    doc["actionable_feedback"] = "plain string feedback";
    const VerifierReport report = parse_keyframe_report(doc.dump());
    REQUIRE(report.flagged_indices.has_value());
    CHECK(report.flagged_indices->empty());

    doc["flagged_indices"] = "not an array";
    CHECK_THROWS_WITH_AS(parse_keyframe_report(doc.dump()),
                         doctest::Contains("flagged_indices"), SchemaError);
}
