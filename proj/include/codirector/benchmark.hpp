#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "codirector/verifiers.hpp"

namespace codirector {

enum class DemographicType { Stereotypical, Unconventional };
enum class Split { Hillclimb, ValidationInDomain, ValidationOOD };

std::string demographic_type_name(DemographicType t);
DemographicType demographic_type_from(const std::string& name);
std::string split_name(Split s);
Split split_from(const std::string& name);

// One benchmark scenario: a six-point prompt plus its reference assets.
struct Scenario {
    int id = 0;
    std::string brand, product;
    std::string gender, age, location, interest;
    DemographicType demographic_type = DemographicType::Stereotypical;
    std::string logo_ref, product_ref;  // relative blob paths
    Split split = Split::Hillclimb;

    // "Brand builds Product, targeting Gender ... aged Age in Location who
    // are interested in Interest."
    std::string prompt() const;

    nlohmann::json to_json() const;
    static Scenario from_json(const nlohmann::json& doc);
};

// Reads a line-delimited JSON scenario file. Malformed lines are reported
// with their line number; every (brand, product) must appear with both
// demographic types.
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);
std::vector<Scenario> parse_scenarios(const std::string& text);

struct BenchAggregate {
    double vaf = 0.0, da = 0.0, ma = 0.0, vq = 0.0;
    double avg = 0.0;  // mean of the four metric means
    nlohmann::json to_json() const;
};

BenchAggregate aggregate(const std::vector<BenchScores>& results);

}  // namespace codirector
