#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "codirector/benchmark.hpp"
#include "codirector/errors.hpp"

using namespace codirector;
using nlohmann::json;

namespace {

// 50 brands x 4 products, each in a Stereotypical/Unconventional pair: 400
// scenarios. Pairs are assigned whole to splits: 100 Hillclimb, 80
// in-domain validation, 20 out-of-domain validation.
std::string synthetic_corpus() {
    std::string out;
    int id = 0;
    int pair_index = 0;
    for (int b = 0; b < 50; ++b) {
        for (int p = 0; p < 4; ++p) {
            const std::string brand = "Brand" + std::to_string(b);
            const std::string product = "Product" + std::to_string(b) + "_" + std::to_string(p);
            Split split = Split::Hillclimb;
            if (pair_index >= 100) split = Split::ValidationInDomain;
            if (pair_index >= 180) split = Split::ValidationOOD;
            ++pair_index;
            for (DemographicType type :
                 {DemographicType::Stereotypical, DemographicType::Unconventional}) {
                Scenario s;
                s.id = id++;
                s.brand = brand;
                s.product = product;
                s.gender = type == DemographicType::Stereotypical ? "women" : "men";
                s.age = "25-34";
                s.location = "Berlin";
                s.interest = "fitness";
                s.demographic_type = type;
                s.logo_ref = "assets/" + brand + "/logo.png";
                s.product_ref = "assets/" + brand + "/" + product + ".png";
                s.split = split;
                out += s.to_json().dump() + "\n";
            }
        }
    }
    return out;
}

}  // namespace

TEST_CASE("synthetic 400-scenario corpus loads with the expected split sizes") {
    const std::filesystem::path path =
        std::filesystem::temp_directory_path() / "codirector-bench-corpus.jsonl";
    {
        std::ofstream out(path);
        out << synthetic_corpus();
    }
    const std::vector<Scenario> scenarios = load_scenarios(path);
    CHECK(scenarios.size() == 400);

    std::map<Split, int> split_counts;
    std::map<DemographicType, int> type_counts;
    for (const auto& s : scenarios) {
        ++split_counts[s.split];
        ++type_counts[s.demographic_type];
    }
    CHECK(split_counts[Split::Hillclimb] == 200);
    CHECK(split_counts[Split::ValidationInDomain] == 160);
    CHECK(split_counts[Split::ValidationOOD] == 40);
    CHECK(type_counts[DemographicType::Stereotypical] == 200);
    CHECK(type_counts[DemographicType::Unconventional] == 200);
    std::filesystem::remove(path);
}

TEST_CASE("malformed lines are reported with their line number") {
    const std::string good = Scenario{}.to_json().dump();
    try {
        parse_scenarios(good + "\n{not json\n");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    try {
        Scenario s;
        json doc = s.to_json();
        doc.erase("gender");
        parse_scenarios(good + "\n\n" + doc.dump() + "\n");
        FAIL("expected a validation error");
    } catch (const ValidationError& e) {
        const std::string what = e.what();
        CHECK(what.find("line 3") != std::string::npos);
        CHECK(what.find("gender") != std::string::npos);
    }
}

TEST_CASE("a scenario without its demographic counterpart is rejected") {
    Scenario a;
    a.id = 1;
    a.brand = "Solo";
    a.product = "Widget";
    a.demographic_type = DemographicType::Stereotypical;
    CHECK_THROWS_AS(parse_scenarios(a.to_json().dump() + "\n"), ValidationError);

    Scenario b = a;
    b.id = 2;
    b.demographic_type = DemographicType::Unconventional;
    CHECK(parse_scenarios(a.to_json().dump() + "\n" + b.to_json().dump() + "\n").size() == 2);

    // duplicated ids are rejected even when the pairing is complete
    b.id = 1;
    CHECK_THROWS_AS(parse_scenarios(a.to_json().dump() + "\n" + b.to_json().dump() + "\n"),
                    ValidationError);
}

TEST_CASE("scenario JSON round-trips") {
    Scenario s;
    s.id = 42;
    s.brand = "Acme";
    s.product = "SmartWatch";
    s.gender = "women";
    s.age = "25-34";
    s.location = "Berlin";
    s.interest = "fitness";
    s.demographic_type = DemographicType::Unconventional;
    s.logo_ref = "assets/acme/logo.png";
    s.product_ref = "assets/acme/watch.png";
    s.split = Split::ValidationOOD;
    const Scenario restored = Scenario::from_json(s.to_json());
    CHECK(restored.to_json() == s.to_json());
    CHECK(s.prompt() ==
          "Acme builds SmartWatch, targeting women aged 25-34 in Berlin who are interested "
          "in fitness.");
}

TEST_CASE("aggregate computes per-metric means and their overall average") {
    BenchScores a{82.1, 91.4, 82.0, 70.2, "", "", "", ""};
    const BenchAggregate single = aggregate({a});
    CHECK(single.vaf == doctest::Approx(82.1));
    CHECK(single.da == doctest::Approx(91.4));
    CHECK(single.ma == doctest::Approx(82.0));
    CHECK(single.vq == doctest::Approx(70.2));
    CHECK(single.avg == doctest::Approx((82.1 + 91.4 + 82.0 + 70.2) / 4.0));

    BenchScores zero{0.0, 0.0, 0.0, 0.0, "", "", "", ""};
    BenchScores full{100.0, 100.0, 100.0, 100.0, "", "", "", ""};
    const BenchAggregate mid = aggregate({zero, full});
    CHECK(mid.vaf == doctest::Approx(50.0));
    CHECK(mid.avg == doctest::Approx(50.0));

    // permutation invariance
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> v(0.0, 100.0);
    std::vector<BenchScores> results;
    for (int i = 0; i < 20; ++i) {
        results.push_back({v(rng), v(rng), v(rng), v(rng), "", "", "", ""});
    }
    const BenchAggregate base = aggregate(results);
    std::shuffle(results.begin(), results.end(), rng);
    const BenchAggregate shuffled = aggregate(results);
    CHECK(shuffled.vaf == doctest::Approx(base.vaf));
    CHECK(shuffled.avg == doctest::Approx(base.avg));

    CHECK(base.to_json().contains("VAF"));
    CHECK(base.to_json().at("Avg").get<double>() == doctest::Approx(base.avg));

    CHECK_THROWS_AS(aggregate({}), ValidationError);
}
