#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "codirector/backends.hpp"
#include "codirector/errors.hpp"
#include "codirector/pipeline.hpp"

using namespace codirector;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const char* kPrompt =
    "Acme builds SmartWatch (wearable), targeting women aged 25-34 in Berlin who are "
    "interested in fitness.";

SimEnvironment pipeline_env() {
    SimEnvironment env;
    env.true_values = {std::vector<double>{58.0, 76.0, 52.0},
                       std::vector<double>{54.0, 62.0, 78.0},
                       std::vector<double>{48.0, 74.0, 55.0, 66.0}};
    env.noise_sigma = 4.0;
    env.seed = 21;
    return env;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("codirector-pipe-" + name);
    fs::remove_all(dir);
    return dir;
}

std::string hash_directory(const fs::path& root) {
    std::vector<std::string> entries;
    for (const auto& entry : fs::recursive_directory_iterator(root)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        const std::string content{std::istreambuf_iterator<char>(in),
                                  std::istreambuf_iterator<char>()};
        entries.push_back(fs::relative(entry.path(), root).generic_string() + ":" +
                          sha256_hex(content));
    }
    std::sort(entries.begin(), entries.end());
    std::string combined;
    for (const auto& e : entries) combined += e + "\n";
    return sha256_hex(combined);
}

}  // namespace

TEST_CASE("blob store is content addressed and idempotent") {
    const fs::path dir = fresh_dir("store");
    BlobStore store(dir);
    const std::string ref = store.put("payload");
    CHECK(ref == sha256_hex("payload"));
    CHECK(store.put("payload") == ref);
    CHECK(store.contains(ref));
    CHECK(store.get(ref) == "payload");
    CHECK_FALSE(store.contains(sha256_hex("other")));
    CHECK_THROWS_AS(store.get(sha256_hex("other")), std::exception);
    fs::remove_all(dir);
}

TEST_CASE("ingest parses the six-point prompt and annotates visuals") {
    SimBackend backend(pipeline_env());
    auto [constraints, visuals] =
        ingest(kPrompt, {{"logo-blob", "logo"}, {"product-blob", "product"}}, backend);
    CHECK(constraints.brand == "Acme");
    CHECK(constraints.product == "SmartWatch");
    CHECK(constraints.gender == "women");
    CHECK(constraints.age == "25-34");
    CHECK(constraints.location == "Berlin");
    CHECK(constraints.interest == "fitness");
    REQUIRE(visuals.size() == 2);
    CHECK(visuals[0].role == VisualRole::Logo);
    CHECK(visuals[1].role == VisualRole::Product);
}

TEST_CASE("ingest rejects prompts with missing six-point fields") {
    SimBackend backend(pipeline_env());
    CHECK_THROWS_AS(ingest("Acme builds SmartWatch, targeting everyone.", {}, backend),
                    IngestionError);
    CHECK_THROWS_AS(ingest("", {}, backend), IngestionError);
}

TEST_CASE("warm start prior documents parse into per-arm priors") {
    const std::string doc = json{
        {"priors", json::array({{{"dimension", "creative_strategy"}, {"arm_index", 1},
                                 {"score", 88.0}}})}}.dump();
    const auto priors = parse_warm_start_priors(doc, 2.0);
    REQUIRE(priors.size() == 1);
    CHECK(priors[0].dimension == CreativeDimension::CreativeStrategy);
    CHECK(priors[0].arm_index == 1);
    CHECK(priors[0].prior_value == doctest::Approx(88.0));
    CHECK(priors[0].prior_weight == doctest::Approx(2.0));
    CHECK_THROWS_AS(parse_warm_start_priors("{\"nope\": []}"), SchemaError);
}

TEST_CASE("a full sim run produces valid, complete records") {
    SimBackend backend(pipeline_env());
    BanditPolicy policy = BanditPolicy::create(1.41421356, RewardMode::Factored);
    const fs::path dir = fresh_dir("full");

    const RunResult result = run({kPrompt, {}}, 4, policy, backend, {}, 17, dir, true);
    REQUIRE(result.records.size() == 4);
    REQUIRE(result.best_index >= 0);
    for (const auto& record : result.records) {
        REQUIRE_FALSE(record.failed);
        CHECK(record.storyboard.scenes.size() == 4);
        CHECK(record.keyframes.size() == 4);
        CHECK(record.clips.size() == 4);
        CHECK(record.storyboard.total_duration_s() == doctest::Approx(12.0));
        CHECK_FALSE(record.audio.music_ref.empty());
        CHECK_FALSE(record.final_video.manifest_ref.empty());
        REQUIRE(record.report.efficacy.has_value());
        validate_run_record(record, {}, result.visuals);
    }
    // best is the score argmax, earliest on ties
    for (int t = 0; t < 4; ++t) {
        if (result.records[t].report.score >
            result.records[result.best_index].report.score) {
            FAIL("best_index is not the argmax");
        }
    }
    // run directory layout
    CHECK(fs::exists(dir / "policy.json"));
    for (int t = 0; t < 4; ++t) {
        const fs::path iter = dir / ("iter-" + std::to_string(t));
        for (const char* name :
             {"directives.json", "brief.json", "storyline.json", "storyboard.json",
              "manifest.json", "report.json"}) {
            CHECK(fs::exists(iter / name));
        }
        CHECK(fs::exists(iter / "keyframes" / "keyframes.json"));
        CHECK(fs::exists(iter / "clips" / "clips.json"));
        CHECK(fs::exists(iter / "audio" / "audio.json"));
    }
    // policy.json reflects the four updates
    std::ifstream in(dir / "policy.json");
    const BanditPolicy persisted = BanditPolicy::from_json(json::parse(in));
    double observed = 0.0;
    for (int a = 0; a < 3; ++a) {
        observed += persisted.stats(CreativeDimension::CreativeStrategy, a).pulls;
    }
    CHECK(observed == doctest::Approx(3.0 + 4.0));  // 3 warm pseudo-pulls + 4 updates
    fs::remove_all(dir);
}

TEST_CASE("identical seeds reproduce the run directory bit for bit") {
    const fs::path d1 = fresh_dir("det1");
    const fs::path d2 = fresh_dir("det2");
    for (const fs::path& dir : {d1, d2}) {
        SimBackend backend(pipeline_env());
        BanditPolicy policy = BanditPolicy::create(1.41421356, RewardMode::Factored);
        run({kPrompt, {}}, 3, policy, backend, {}, 99, dir, true);
    }
    CHECK(hash_directory(d1) == hash_directory(d2));

    const fs::path d3 = fresh_dir("det3");
    {
        SimEnvironment env = pipeline_env();
        env.seed = 1234;  // different env seed changes the artifacts
        SimBackend backend(env);
        BanditPolicy policy = BanditPolicy::create(1.41421356, RewardMode::Factored);
        run({kPrompt, {}}, 3, policy, backend, {}, 99, d3, true);
    }
    CHECK(hash_directory(d1) != hash_directory(d3));
    fs::remove_all(d1);
    fs::remove_all(d2);
    fs::remove_all(d3);
}

TEST_CASE("a persistently malformed judge fails the iteration without a policy update") {
    SimBackend backend(pipeline_env());
    BanditPolicy policy = BanditPolicy::create(1.41421356, RewardMode::Factored);
    const fs::path dir = fresh_dir("failiter");

    // Enough malformed judge replies to defeat the single re-ask in the first
    // iteration's storyline loop.
    backend.malform_next_judge = 2;
    const RunResult result = run({kPrompt, {}}, 2, policy, backend, {}, 5, dir, false);
    REQUIRE(result.records.size() == 2);
    CHECK(result.records[0].failed);
    CHECK_FALSE(result.records[0].error.empty());
    CHECK(fs::exists(dir / "iter-0" / "error.json"));
    CHECK_FALSE(result.records[1].failed);
    CHECK(result.best_index == 1);

    // only the successful iteration updated the policy
    double pulls = 0.0;
    for (int a = 0; a < 3; ++a) {
        pulls += policy.stats(CreativeDimension::CreativeStrategy, a).pulls;
    }
    CHECK(pulls == doctest::Approx(1.0));
    fs::remove_all(dir);
}

TEST_CASE("validate_run_record catches structural violations") {
    SimBackend backend(pipeline_env());
    BanditPolicy policy = BanditPolicy::create(1.41421356, RewardMode::Factored);
    const fs::path dir = fresh_dir("struct");
    const RunResult result = run({kPrompt, {}}, 1, policy, backend, {}, 31, dir, true);
    REQUIRE(result.best_index == 0);
    const RunRecord& good = result.records[0];

    RunRecord missing_clip = good;
    missing_clip.clips.pop_back();
    CHECK_THROWS_AS(validate_run_record(missing_clip, {}, result.visuals), ValidationError);

    RunRecord bad_duration = good;
    bad_duration.clips[0].duration_s += 1.0;
    CHECK_THROWS_AS(validate_run_record(bad_duration, {}, result.visuals), ValidationError);

    RunRecord unknown_entity = good;
    unknown_entity.storyboard.scenes[0].entity_flags.push_back("ghost entity");
    CHECK_THROWS_AS(validate_run_record(unknown_entity, {}, result.visuals), ValidationError);

    RunRecord failed = good;
    failed.failed = true;
    CHECK_THROWS_AS(validate_run_record(failed, {}, result.visuals), ValidationError);
    fs::remove_all(dir);
}

TEST_CASE("clips embed their conditioning keyframes") {
    SimBackend backend(pipeline_env());
    BanditPolicy policy = BanditPolicy::create(1.41421356, RewardMode::Factored);
    const fs::path dir = fresh_dir("prov");
    const RunResult result = run({kPrompt, {}}, 1, policy, backend, {}, 8, dir, true);
    REQUIRE(result.best_index == 0);
    const RunRecord& record = result.records[0];
    BlobStore store(dir / "blobs");
    for (const auto& clip : record.clips) {
        const auto frame = std::find_if(
            record.keyframes.begin(), record.keyframes.end(),
            [&](const Keyframe& k) { return k.scene_index == clip.scene_index; });
        REQUIRE(frame != record.keyframes.end());
        CHECK(store.get(clip.video_ref).find("src:" + frame->image_ref) !=
              std::string::npos);
    }
    fs::remove_all(dir);
}
