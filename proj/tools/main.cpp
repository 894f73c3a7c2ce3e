// codirector: command-line entry points for the creative optimization engine.
//
// Exit codes (closed set):
//   0  success
//   2  configuration / input error
//   3  transport error (backend unreachable or exhausted retries)
//   4  schema error (malformed structured output)
//   5  assembly error (muxer failure)
//   6  artifact contract violation
//   7  no scenario / iteration succeeded
//   70 unexpected internal error
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "codirector/backends.hpp"
#include "codirector/benchmark.hpp"
#include "codirector/errors.hpp"
#include "codirector/experiment.hpp"
#include "codirector/pipeline.hpp"
#include "codirector/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace codirector;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitTransport = 3;
constexpr int kExitSchema = 4;
constexpr int kExitAssembly = 5;
constexpr int kExitContract = 6;
constexpr int kExitAllFailed = 7;
constexpr int kExitInternal = 70;

struct EngineConfig {
    int iterations = 4;
    int max_retries = 3;
    double tau_storyline = 75.0;
    double tau_keyframe = 75.0;
    double exploration_constant = 1.41421356;
    int scenes = 4;
    double runtime_s = 12.0;
    std::string backend_config;
    uint64_t seed = 0;

    void apply(const json& doc) {
        iterations = doc.value("iterations", iterations);
        max_retries = doc.value("max_retries", max_retries);
        tau_storyline = doc.value("tau_storyline", tau_storyline);
        tau_keyframe = doc.value("tau_keyframe", tau_keyframe);
        exploration_constant = doc.value("exploration_constant", exploration_constant);
        scenes = doc.value("scenes", scenes);
        runtime_s = doc.value("runtime_s", runtime_s);
        backend_config = doc.value("backend_config", backend_config);
        seed = doc.value("seed", seed);
    }

    void validate() const {
        if (iterations < 1) throw ConfigError("iterations must be >= 1");
        if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
        if (exploration_constant <= 0.0) throw ConfigError("exploration constant must be > 0");
        if (scenes < 1) throw ConfigError("scenes must be >= 1");
        if (runtime_s <= 0.0) throw ConfigError("runtime_s must be > 0");
    }

    PipelineOptions pipeline_options() const {
        PipelineOptions options;
        options.scenes = scenes;
        options.runtime_s = runtime_s;
        options.storyline_refinement = {tau_storyline, max_retries};
        options.keyframe_refinement = {tau_keyframe, max_retries};
        return options;
    }
};

struct GlobalFlags {
    std::string config_path;
    bool sim = false;
    std::string env_path;
    uint64_t seed = 0;
    bool seed_given = false;
    int jobs = 1;
    std::string out_dir = "runs";
};

SimEnvironment default_sim_env() {
    SimEnvironment env;
    env.true_values = {std::vector<double>{62.0, 78.0, 55.0},
                       std::vector<double>{70.0, 58.0, 66.0},
                       std::vector<double>{60.0, 72.0, 50.0, 65.0}};
    env.noise_sigma = 3.0;
    return env;
}

SimEnvironment resolve_env(const GlobalFlags& flags) {
    SimEnvironment env =
        flags.env_path.empty() ? default_sim_env() : SimEnvironment::load(flags.env_path);
    if (flags.seed_given || flags.env_path.empty()) env.seed = flags.seed;
    return env;
}

std::unique_ptr<Backend> make_backend(const GlobalFlags& flags, const EngineConfig& config) {
    if (flags.sim) return std::make_unique<SimBackend>(resolve_env(flags));
    if (config.backend_config.empty()) {
        throw ConfigError("no backend configured: pass --sim or a config with backend_config");
    }
    return std::make_unique<HttpBackend>(HttpBackendConfig::load(config.backend_config));
}

EngineConfig load_engine_config(const GlobalFlags& flags) {
    EngineConfig config;
    if (!flags.config_path.empty()) {
        std::ifstream in(flags.config_path);
        if (!in) throw ConfigError("cannot open config file: " + flags.config_path);
        json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded()) {
            throw ConfigError("config file is not valid JSON: " + flags.config_path);
        }
        config.apply(doc);
    }
    config.seed = flags.seed;
    config.validate();
    return config;
}

json run_summary(const RunResult& result, const fs::path& run_dir) {
    json iterations = json::array();
    for (const auto& record : result.records) {
        json entry = {{"iteration", record.iteration}, {"failed", record.failed}};
        if (record.failed) {
            entry["error"] = record.error;
        } else {
            entry["config"] = record.config.short_label();
            entry["score"] = record.report.score;
        }
        iterations.push_back(entry);
    }
    json doc = {{"run_dir", run_dir.string()}, {"iterations", iterations}};
    if (result.best_index >= 0) {
        const auto& best = result.records[result.best_index];
        BlobStore store(run_dir / "blobs");
        doc["best"] = {{"iteration", best.iteration},
                       {"config", best.config.short_label()},
                       {"score", best.report.score},
                       {"manifest_path", store.path_of(best.final_video.manifest_ref).string()}};
    }
    return doc;
}

struct RunInputs {
    std::string prompt;
    std::string scenario_file;
    int scenario_id = -1;
    std::vector<std::string> images;  // "hint=ref" or bare ref
    int iterations_override = 0;
    bool no_warm_start = false;
};

ScenarioInput resolve_scenario(const RunInputs& inputs) {
    ScenarioInput scenario;
    if (!inputs.prompt.empty()) {
        scenario.user_prompt = inputs.prompt;
    } else if (!inputs.scenario_file.empty()) {
        const auto scenarios = load_scenarios(inputs.scenario_file);
        if (scenarios.empty()) throw ConfigError("scenario file is empty");
        const Scenario* chosen = &scenarios.front();
        if (inputs.scenario_id >= 0) {
            chosen = nullptr;
            for (const auto& s : scenarios) {
                if (s.id == inputs.scenario_id) chosen = &s;
            }
            if (!chosen) {
                throw ConfigError("scenario id " + std::to_string(inputs.scenario_id) +
                                  " not present in " + inputs.scenario_file);
            }
        }
        scenario.user_prompt = chosen->prompt();
        scenario.images = {{chosen->logo_ref, "logo"}, {chosen->product_ref, "product"}};
    } else {
        throw ConfigError("pass --prompt or --scenario-file");
    }
    for (const auto& spec : inputs.images) {
        const auto eq = spec.find('=');
        if (eq == std::string::npos) {
            scenario.images.push_back({spec, "other"});
        } else {
            scenario.images.push_back({spec.substr(eq + 1), spec.substr(0, eq)});
        }
    }
    return scenario;
}

int cmd_run(const GlobalFlags& flags, const RunInputs& inputs) {
    EngineConfig config = load_engine_config(flags);
    if (inputs.iterations_override > 0) config.iterations = inputs.iterations_override;
    const ScenarioInput scenario = resolve_scenario(inputs);

    auto backend = make_backend(flags, config);
    BanditPolicy policy = BanditPolicy::create(config.exploration_constant, RewardMode::Factored);

    const std::string run_id =
        "run-" +
        sha256_hex(scenario.user_prompt + "|" + std::to_string(config.seed)).substr(0, 12);
    const fs::path run_dir = fs::path(flags.out_dir) / run_id;

    const RunResult result =
        run(scenario, config.iterations, policy, *backend, config.pipeline_options(),
            config.seed, run_dir, !inputs.no_warm_start);

    std::cout << run_summary(result, run_dir).dump(2) << "\n";
    return result.best_index >= 0 ? kExitOk : kExitAllFailed;
}

int cmd_simulate(const GlobalFlags& flags, const std::string& policy_name, int iterations,
                 int repeats, const std::string& out_file) {
    const SimEnvironment env = resolve_env(flags);
    ExperimentOptions options;
    options.iterations = iterations;
    options.repeats = repeats;
    options.seed = flags.seed;
    options.exploration_constant = load_engine_config(flags).exploration_constant;

    const ExperimentReport report =
        run_policy_experiment(env, policy_kind_from(policy_name), options);
    const json doc = report.to_json();

    fs::path out = out_file.empty()
                       ? fs::path(flags.out_dir) / ("simulate-" + policy_name + ".json")
                       : fs::path(out_file);
    fs::create_directories(out.parent_path().empty() ? "." : out.parent_path());
    std::ofstream(out) << doc.dump(2) << "\n";
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

int cmd_bench(const GlobalFlags& flags, const std::string& scenarios_file,
              const std::string& results_file, bool resume, int iterations_override) {
    EngineConfig config = load_engine_config(flags);
    if (iterations_override > 0) config.iterations = iterations_override;
    const auto scenarios = load_scenarios(scenarios_file);
    auto backend = make_backend(flags, config);

    const fs::path results_path =
        results_file.empty() ? fs::path(flags.out_dir) / "results.jsonl" : fs::path(results_file);
    if (!results_path.parent_path().empty()) fs::create_directories(results_path.parent_path());

    std::set<int> done;
    if (resume && fs::exists(results_path)) {
        std::ifstream in(results_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const json doc = json::parse(line, nullptr, false);
            if (!doc.is_discarded() && doc.contains("id")) done.insert(doc["id"].get<int>());
        }
    }

    std::vector<const Scenario*> todo;
    for (const auto& s : scenarios) {
        if (!done.count(s.id)) todo.push_back(&s);
    }

    std::mutex io_mutex;
    std::ofstream results(results_path, std::ios::app);
    std::atomic<std::size_t> cursor{0};
    std::atomic<int> succeeded{0};

    auto worker = [&]() {
        for (std::size_t i = cursor.fetch_add(1); i < todo.size(); i = cursor.fetch_add(1)) {
            const Scenario& s = *todo[i];
            try {
                ScenarioInput input;
                input.user_prompt = s.prompt();
                input.images = {{s.logo_ref, "logo"}, {s.product_ref, "product"}};

                BanditPolicy policy =
                    BanditPolicy::create(config.exploration_constant, RewardMode::Factored);
                const fs::path run_dir =
                    fs::path(flags.out_dir) / "bench" / ("scenario-" + std::to_string(s.id));
                const uint64_t seed = mix64(config.seed ^ static_cast<uint64_t>(s.id));
                const RunResult result = run(input, config.iterations, policy, *backend,
                                             config.pipeline_options(), seed, run_dir, true);
                if (result.best_index < 0) {
                    throw ValidationError("all iterations failed: " +
                                          result.records.front().error);
                }
                const auto& best = result.records[result.best_index];

                CapabilityRequest judge;
                judge.capability = Capability::Judge;
                judge.prompt = "Score this advertisement against the brief.\n\nBrief:\n" +
                               s.prompt() + "\n\nManifest: " + best.final_video.manifest_ref;
                judge.attachments = {best.final_video.manifest_ref};
                judge.params = {{"task", "bench_judge"}};
                const BenchScores scores = parse_bench_report(backend->invoke(judge).text);

                json line = serialize_bench_report(scores);
                line["id"] = s.id;
                std::lock_guard<std::mutex> lock(io_mutex);
                results << line.dump() << "\n";
                results.flush();
                ++succeeded;
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << "scenario " << s.id << " failed: " << e.what() << "\n";
            }
        }
    };

    const int jobs = std::max(1, flags.jobs);
    std::vector<std::thread> threads;
    for (int i = 0; i < jobs; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    results.close();

    if (!todo.empty() && succeeded.load() == 0) {
        std::cerr << "all scenarios failed\n";
        return kExitAllFailed;
    }

    // Table-style aggregate over everything recorded so far.
    std::vector<BenchScores> all;
    std::ifstream in(results_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const json doc = json::parse(line, nullptr, false);
        if (!doc.is_discarded()) all.push_back(parse_bench_report(doc.dump()));
    }
    if (!all.empty()) {
        json summary = aggregate(all).to_json();
        summary["n"] = all.size();
        std::cout << summary.dump(2) << "\n";
    }
    return kExitOk;
}

RatingsMatrix matrix_from_json(const json& rows, const std::string& where) {
    if (!rows.is_array()) throw ValidationError(where + ": ratings must be an array of rows");
    RatingsMatrix m;
    for (const auto& row : rows) {
        std::vector<std::optional<int>> parsed;
        for (const auto& cell : row) {
            if (cell.is_null()) {
                parsed.push_back(std::nullopt);
            } else {
                parsed.push_back(cell.get<int>());
            }
        }
        m.ratings.push_back(std::move(parsed));
    }
    m.validate();
    return m;
}

int cmd_stats(const GlobalFlags& flags, const std::string& ratings_file,
              const std::string& judge_file, const std::string& out_file) {
    (void)flags;
    auto load_json = [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open file: " + path);
        json doc = json::parse(in, nullptr, false);
        if (doc.is_discarded() || !doc.is_object()) {
            throw SchemaError(path + ": expected a JSON object");
        }
        return doc;
    };
    const json ratings_doc = load_json(ratings_file);
    json judge_doc = judge_file.empty() ? json::object() : load_json(judge_file);

    json report = json::object();
    for (const auto& [metric, rows] : ratings_doc.items()) {
        const RatingsMatrix m = matrix_from_json(rows, ratings_file + ":" + metric);
        json entry;
        entry["alpha"] = krippendorff_alpha(m, AlphaMetric::Interval);
        entry["kappa"] = pairwise_kappa(m);
        if (judge_doc.contains(metric)) {
            std::vector<double> judge = judge_doc[metric].get<std::vector<double>>();
            std::vector<double> mos;
            for (int item = 0; item < m.item_count(); ++item) {
                double total = 0.0;
                int count = 0;
                for (int rater = 0; rater < m.rater_count(); ++rater) {
                    if (m.ratings[rater][item]) {
                        total += *m.ratings[rater][item];
                        ++count;
                    }
                }
                if (count == 0) {
                    throw ValidationError(ratings_file + ":" + metric + ": item " +
                                          std::to_string(item) + " has no ratings");
                }
                mos.push_back(total / count);
            }
            const CorrelationSuite suite = correlation_suite(judge, mos);
            entry["pearson"] = suite.pearson;
            entry["spearman"] = suite.spearman;
            entry["mae"] = suite.mae;
        }
        report[metric] = entry;
    }

    if (!out_file.empty()) {
        std::ofstream(out_file) << report.dump(2) << "\n";
    }
    std::cout << report.dump(2) << "\n";
    return kExitOk;
}

int cmd_report(const GlobalFlags& flags, const std::string& run_dir_arg) {
    (void)flags;
    const fs::path run_dir(run_dir_arg);
    if (!fs::exists(run_dir)) throw ConfigError("run directory does not exist: " + run_dir_arg);

    json doc = {{"run_dir", run_dir.string()}, {"iterations", json::array()}};
    if (fs::exists(run_dir / "policy.json")) {
        std::ifstream in(run_dir / "policy.json");
        doc["policy"] = json::parse(in);
    }
    double best_score = -1.0;
    int best_iteration = -1;
    for (int t = 0;; ++t) {
        const fs::path iter_dir = run_dir / ("iter-" + std::to_string(t));
        if (!fs::exists(iter_dir)) break;
        json entry = {{"iteration", t}};
        if (fs::exists(iter_dir / "report.json")) {
            std::ifstream in(iter_dir / "report.json");
            const json report = json::parse(in);
            entry["score"] = report.value("score", 0.0);
            if (entry["score"].get<double>() > best_score) {
                best_score = entry["score"].get<double>();
                best_iteration = t;
            }
        } else if (fs::exists(iter_dir / "error.json")) {
            std::ifstream in(iter_dir / "error.json");
            entry["error"] = json::parse(in).value("error", "unknown");
        }
        doc["iterations"].push_back(entry);
    }
    if (best_iteration >= 0) {
        doc["best"] = {{"iteration", best_iteration}, {"score", best_score}};
    }
    std::cout << doc.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"codirector: bandit-steered video advertisement generation engine"};
    app.require_subcommand(1);

    GlobalFlags flags;
    app.add_option("--config", flags.config_path, "engine config JSON file");
    app.add_flag("--sim", flags.sim, "use the deterministic simulation backend");
    app.add_option("--env", flags.env_path, "simulation environment JSON file");
    auto* seed_opt = app.add_option("--seed", flags.seed, "deterministic seed");
    app.add_option("--jobs", flags.jobs, "scenario-level parallelism for bench");
    app.add_option("--out-dir", flags.out_dir, "output directory root");

    RunInputs run_inputs;
    auto* run_cmd = app.add_subcommand("run", "execute the optimization loop on one scenario");
    run_cmd->fallthrough();
    run_cmd->add_option("--prompt", run_inputs.prompt, "inline six-point prompt");
    run_cmd->add_option("--scenario-file", run_inputs.scenario_file, "scenarios.jsonl path");
    run_cmd->add_option("--scenario-id", run_inputs.scenario_id, "scenario id within the file");
    run_cmd->add_option("--image", run_inputs.images, "reference image as hint=ref");
    run_cmd->add_option("-T,--iterations", run_inputs.iterations_override, "iteration count");
    run_cmd->add_flag("--no-warm-start", run_inputs.no_warm_start, "skip warm-start priors");

    std::string sim_policy = "mab", sim_out;
    int sim_T = 10, sim_repeats = 200;
    auto* sim_cmd = app.add_subcommand("simulate", "offline policy experiment on a sim env");
    sim_cmd->fallthrough();
    sim_cmd->add_option("--policy", sim_policy, "mab|mab-cold|scalar|random");
    sim_cmd->add_option("-T,--iterations", sim_T, "iterations per repeat");
    sim_cmd->add_option("--repeats", sim_repeats, "number of seeds");
    sim_cmd->add_option("-o,--out", sim_out, "report output path");

    std::string bench_scenarios, bench_results;
    bool bench_resume = false;
    int bench_T = 0;
    auto* bench_cmd = app.add_subcommand("bench", "run and judge a scenario set");
    bench_cmd->fallthrough();
    bench_cmd->add_option("--scenarios", bench_scenarios, "scenarios.jsonl path")->required();
    bench_cmd->add_option("--results", bench_results, "results.jsonl sink");
    bench_cmd->add_flag("--resume", bench_resume, "skip scenario ids already in results");
    bench_cmd->add_option("-T,--iterations", bench_T, "iteration count per scenario");

    std::string stats_ratings, stats_judge, stats_out;
    auto* stats_cmd = app.add_subcommand("stats", "inter-rater agreement and judge alignment");
    stats_cmd->fallthrough();
    stats_cmd->add_option("--ratings", stats_ratings, "ratings matrices JSON")->required();
    stats_cmd->add_option("--judge", stats_judge, "judge scores JSON (0-100 per item)");
    stats_cmd->add_option("-o,--out", stats_out, "report output path");

    std::string report_dir;
    auto* report_cmd = app.add_subcommand("report", "summarize a finished run directory");
    report_cmd->fallthrough();
    report_cmd->add_option("run_dir", report_dir, "run directory")->required();

    try {
        app.parse(argc, argv);
        flags.seed_given = seed_opt->count() > 0;
        if (run_cmd->parsed()) return cmd_run(flags, run_inputs);
        if (sim_cmd->parsed()) {
            return cmd_simulate(flags, sim_policy, sim_T, sim_repeats, sim_out);
        }
        if (bench_cmd->parsed()) {
            return cmd_bench(flags, bench_scenarios, bench_results, bench_resume, bench_T);
        }
        if (stats_cmd->parsed()) return cmd_stats(flags, stats_ratings, stats_judge, stats_out);
        if (report_cmd->parsed()) return cmd_report(flags, report_dir);
        return kExitConfig;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const IngestionError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const TransportError& e) {
        std::cerr << "transport error: " << e.what() << "\n";
        return kExitTransport;
    } catch (const SchemaError& e) {
        std::cerr << "schema error: " << e.what() << "\n";
        return kExitSchema;
    } catch (const AssemblyError& e) {
        std::cerr << "assembly error: " << e.what() << "\n";
        return kExitAssembly;
    } catch (const ContractError& e) {
        std::cerr << "contract error: " << e.what() << "\n";
        return kExitContract;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return kExitContract;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
}
