// cwmw: effect estimation, tests and confidence intervals for clustered
// two-group data, plus a scenario simulation harness.

#include "cwmw/errors.hpp"
#include "cwmw/experiment.hpp"
#include "cwmw/inference.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 20240101;

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const cwmw::NoComparisonsError*>(&e) != nullptr) return 4;
    if (dynamic_cast<const cwmw::NegativeVarianceError*>(&e) != nullptr) return 3;
    if (dynamic_cast<const cwmw::DegenerateVarianceError*>(&e) != nullptr) return 3;
    return 2;
}

struct AnalyzeArgs {
    std::string input;
    std::string method = "tilde-t";
    double alpha = 0.05;
    std::int64_t resamples = -1; // -1: per-method default
    std::uint64_t seed = kDefaultSeed;
};

std::int64_t default_resamples(cwmw::TestMethod m) {
    return m == cwmw::TestMethod::hoffman ? 1000 : 10000;
}

ordered_json result_json(const std::string& method, const cwmw::InferenceResult& r) {
    ordered_json j;
    j["method"] = method;
    j["estimate"] = r.estimate.value;
    j["variance"] = r.variance.value;
    j["statistic"] = r.statistic;
    j["reference"] = r.reference == cwmw::Reference::student_t ? "student_t" : "standard_normal";
    if (r.df.has_value()) {
        j["df"] = *r.df;
    }
    j["p_value"] = r.p_value;
    j["ci_lower"] = r.ci_lower;
    j["ci_upper"] = r.ci_upper;
    j["alpha"] = r.alpha;
    j["seed"] = r.estimate.seed.value_or(0);
    j["resamples_used"] = std::max(r.estimate.resamples_used, r.variance.resamples_used);
    j["resamples_discarded"] =
        std::max(r.estimate.resamples_discarded, r.variance.resamples_discarded);
    j["warnings"] = ordered_json::array();
    const std::int64_t discarded = j["resamples_discarded"].get<std::int64_t>();
    if (discarded > 0) {
        j["warnings"].push_back("discarded " + std::to_string(discarded) +
                                " resamples unusable for this method");
    }
    return j;
}

int cmd_analyze(const AnalyzeArgs& args) {
    const cwmw::TestMethod method = cwmw::method_from_token(args.method);
    const cwmw::ClusteredDataset ds = cwmw::read_csv_file(args.input);
    const std::int64_t q = args.resamples > 0 ? args.resamples : default_resamples(method);

    ordered_json j;
    if (cwmw::method_is_point_only(method)) {
        const cwmw::Weighting w = method == cwmw::TestMethod::ignorable_u
                                      ? cwmw::Weighting::unweighted
                                      : cwmw::Weighting::weighted;
        const cwmw::EffectEstimate est = cwmw::p_ignorable(ds, w);
        j["method"] = args.method;
        j["estimate"] = est.value;
        j["alpha"] = args.alpha;
        j["seed"] = args.seed;
        j["resamples_used"] = 0;
        j["resamples_discarded"] = 0;
        j["warnings"] = ordered_json::array();
    } else {
        cwmw::InferenceResult r;
        switch (method) {
            case cwmw::TestMethod::tilde: r = cwmw::z_tilde_test(ds, args.alpha); break;
            case cwmw::TestMethod::tilde_t: r = cwmw::t_tilde_test(ds, args.alpha); break;
            case cwmw::TestMethod::hat: r = cwmw::z_hat_test(ds, args.alpha, q, args.seed); break;
            case cwmw::TestMethod::hat_star: r = cwmw::z_star_test(ds, args.alpha, args.seed); break;
            case cwmw::TestMethod::hoffman: r = cwmw::z_h_test(ds, args.alpha, q, args.seed); break;
            default: throw cwmw::InputError("unreachable");
        }
        if (!r.estimate.seed.has_value()) {
            r.estimate.seed = args.seed;
        }
        j = result_json(args.method, r);
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

struct SimulateArgs {
    std::string config;
    std::int64_t reps = 1000;
    std::string out = "report";
    std::vector<std::string> methods = {"tilde", "tilde-t"};
    int jobs = 1;
};

int cmd_simulate(const SimulateArgs& args) {
    const cwmw::ScenarioConfig cfg = cwmw::load_scenario_file(args.config);
    std::vector<cwmw::TestMethod> methods;
    methods.reserve(args.methods.size());
    for (const std::string& token : args.methods) {
        methods.push_back(cwmw::method_from_token(token));
    }
    cwmw::ExperimentOptions options;
    options.jobs = args.jobs;
    const cwmw::ExperimentReport report =
        cwmw::run_experiment(cfg, methods, args.reps, cfg.seed, options);

    const std::string csv_path = args.out + ".csv";
    const std::string json_path = args.out + ".json";
    std::ofstream csv(csv_path);
    if (!csv) throw cwmw::InputError("cannot write '" + csv_path + "'");
    csv << cwmw::report_csv(report);
    std::ofstream js(json_path);
    if (!js) throw cwmw::InputError("cannot write '" + json_path + "'");
    js << cwmw::report_json(report);
    std::cout << "wrote " << csv_path << " and " << json_path << " (seed " << cfg.seed << ", "
              << args.reps << " replications)\n";
    return 0;
}

struct TheoryArgs {
    int c1 = 0;
    int c2 = 0;
    std::int64_t oracle_draws = 0;
    std::uint64_t seed = kDefaultSeed;
};

int cmd_theory(const TheoryArgs& args) {
    const cwmw::TheoreticalEffects t = cwmw::theoretical_effects(args.c1, args.c2);
    ordered_json j;
    j["c1"] = args.c1;
    j["c2"] = args.c2;
    j["p"] = t.p;
    j["p0"] = t.p0;
    j["mu_d"] = t.mu_d;
    if (args.oracle_draws > 0) {
        cwmw::Rng rng(args.seed);
        const cwmw::McEffectOracle o = cwmw::mc_effect_oracle(args.c1, args.c2, args.oracle_draws, rng);
        j["p_mc"] = o.p_mc;
        j["p0_mc"] = o.p0_mc;
        j["se_p"] = o.se_p;
        j["se_p0"] = o.se_p0;
        j["oracle_draws"] = o.draws;
        j["seed"] = args.seed;
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Rank-based treatment effect inference for clustered two-group data"};
    app.require_subcommand(1);

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand("analyze", "Analyze a CSV dataset");
    analyze->add_option("--input", analyze_args.input, "CSV file (cluster,group,value)")
        ->required();
    analyze->add_option("--method", analyze_args.method,
                        "tilde | tilde-t | hat | hat-star | hoffman | ignorable-u | ignorable-w");
    analyze->add_option("--alpha", analyze_args.alpha, "two-sided level (default 0.05)");
    analyze
        ->add_option("--resamples", analyze_args.resamples,
                     "resample count for hat (default 10000) and hoffman (default 1000)")
        ->check(CLI::PositiveNumber);
    analyze->add_option("--seed", analyze_args.seed, "random seed (default 20240101)");

    SimulateArgs simulate_args;
    CLI::App* simulate = app.add_subcommand("simulate", "Run a scenario experiment");
    simulate->add_option("--config", simulate_args.config, "scenario key=value file")->required();
    simulate->add_option("--reps", simulate_args.reps, "replications (default 1000)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--out", simulate_args.out, "output basename (writes .csv and .json)");
    simulate->add_option("--methods", simulate_args.methods, "methods to evaluate")
        ->delimiter(',');
    simulate->add_option("--jobs", simulate_args.jobs, "worker threads (default 1)")
        ->check(CLI::Range(1, 512));

    TheoryArgs theory_args;
    CLI::App* theory = app.add_subcommand("theory", "Closed-form effects of the two-point size design");
    theory->add_option("--c1", theory_args.c1, "first size label (positive integer)")->required();
    theory->add_option("--c2", theory_args.c2, "second size label (positive integer)")->required();
    theory->add_option("--oracle-draws", theory_args.oracle_draws,
                       "also run the Monte Carlo oracle with this many draws");
    theory->add_option("--seed", theory_args.seed, "oracle seed (default 20240101)");

    try {
        app.parse(argc, argv);
        if (analyze->parsed()) return cmd_analyze(analyze_args);
        if (simulate->parsed()) return cmd_simulate(simulate_args);
        if (theory->parsed()) return cmd_theory(theory_args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    }
    return 2;
}
