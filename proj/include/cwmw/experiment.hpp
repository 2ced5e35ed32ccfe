#pragma once

#include "cwmw/simulation.hpp"

#include <string>

namespace cwmw {

enum class TestMethod : std::uint8_t {
    tilde,       // closed-form estimate, analytic variance, normal reference
    tilde_t,     // same with Student-t small-sample reference
    hat,         // Monte Carlo average estimate with difference variance
    hat_star,    // single-resample estimate and placement variance
    hoffman,     // closed-form estimate with conditional-variance estimate
    ignorable_u, // cluster-weighted baseline point estimate (no test)
    ignorable_w, // observation-weighted baseline point estimate (no test)
};

std::string method_token(TestMethod m);
TestMethod method_from_token(const std::string& token);
bool method_is_point_only(TestMethod m);

struct MethodReport {
    TestMethod method = TestMethod::tilde;
    std::int64_t replicates = 0;
    std::int64_t valid = 0; // replicates that produced a usable result
    std::int64_t rejections = 0;
    std::int64_t covered_p = 0;
    std::int64_t covered_p0 = 0;
    double estimate_sum = 0.0;
    std::int64_t negative_variance = 0;
    std::int64_t degenerate = 0;
    std::int64_t discarded_draws = 0;

    double rejection_rate() const;
    double coverage_p() const;
    double coverage_p0() const;
    double mean_estimate() const;
};

struct ExperimentReport {
    ScenarioConfig config;
    std::int64_t replications = 0;
    std::uint64_t master_seed = 0;
    double target_p = 0.5;
    std::optional<double> target_p0;
    std::vector<MethodReport> methods;
};

struct ExperimentOptions {
    int jobs = 1;
    std::int64_t q_hat = 10000;    // resamples behind the "hat" method
    std::int64_t q_hoffman = 1000; // resamples behind the Hoffman variance
};

// Run `replications` independent replicates of the scenario and evaluate
// every requested method on each generated dataset. Replicate r uses
// streams derived from derive_seed(master_seed, r); results are
// bit-identical for any worker count. Per-replicate failures (negative or
// degenerate variances) are tallied, not fatal.
ExperimentReport run_experiment(const ScenarioConfig& cfg, std::span<const TestMethod> methods,
                                std::int64_t replications, std::uint64_t master_seed,
                                const ExperimentOptions& options = {});

// One CSV row per method.
std::string report_csv(const ExperimentReport& report);

// Structured JSON document (serialized string).
std::string report_json(const ExperimentReport& report);

} // namespace cwmw
