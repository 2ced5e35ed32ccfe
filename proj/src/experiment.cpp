#include "cwmw/experiment.hpp"

#include "cwmw/errors.hpp"
#include "cwmw/inference.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace cwmw {

std::string method_token(TestMethod m) {
    switch (m) {
        case TestMethod::tilde: return "tilde";
        case TestMethod::tilde_t: return "tilde-t";
        case TestMethod::hat: return "hat";
        case TestMethod::hat_star: return "hat-star";
        case TestMethod::hoffman: return "hoffman";
        case TestMethod::ignorable_u: return "ignorable-u";
        case TestMethod::ignorable_w: return "ignorable-w";
    }
    return "unknown";
}

TestMethod method_from_token(const std::string& token) {
    if (token == "tilde") return TestMethod::tilde;
    if (token == "tilde-t") return TestMethod::tilde_t;
    if (token == "hat") return TestMethod::hat;
    if (token == "hat-star") return TestMethod::hat_star;
    if (token == "hoffman") return TestMethod::hoffman;
    if (token == "ignorable-u") return TestMethod::ignorable_u;
    if (token == "ignorable-w") return TestMethod::ignorable_w;
    throw InputError("unknown method '" + token + "'");
}

bool method_is_point_only(TestMethod m) {
    return m == TestMethod::ignorable_u || m == TestMethod::ignorable_w;
}

double MethodReport::rejection_rate() const {
    return valid > 0 ? static_cast<double>(rejections) / static_cast<double>(valid)
                     : std::numeric_limits<double>::quiet_NaN();
}

double MethodReport::coverage_p() const {
    return valid > 0 ? static_cast<double>(covered_p) / static_cast<double>(valid)
                     : std::numeric_limits<double>::quiet_NaN();
}

double MethodReport::coverage_p0() const {
    return valid > 0 ? static_cast<double>(covered_p0) / static_cast<double>(valid)
                     : std::numeric_limits<double>::quiet_NaN();
}

double MethodReport::mean_estimate() const {
    return valid > 0 ? estimate_sum / static_cast<double>(valid)
                     : std::numeric_limits<double>::quiet_NaN();
}

namespace {

enum class RepStatus : std::uint8_t { ok, negative_variance, degenerate };

struct RepOutcome {
    RepStatus status = RepStatus::ok;
    double estimate = 0.0;
    bool reject = false;
    bool cover_p = false;
    bool cover_p0 = false;
    std::int64_t discarded = 0;
};

RepOutcome evaluate_method(TestMethod m, const ClusteredDataset& ds, double alpha,
                           std::uint64_t seed, const ExperimentOptions& opt, double target_p,
                           std::optional<double> target_p0) {
    RepOutcome out;
    try {
        if (method_is_point_only(m)) {
            const Weighting w =
                m == TestMethod::ignorable_u ? Weighting::unweighted : Weighting::weighted;
            out.estimate = p_ignorable(ds, w).value;
            return out;
        }
        InferenceResult r;
        switch (m) {
            case TestMethod::tilde: r = z_tilde_test(ds, alpha); break;
            case TestMethod::tilde_t: r = t_tilde_test(ds, alpha); break;
            case TestMethod::hat: r = z_hat_test(ds, alpha, opt.q_hat, seed); break;
            case TestMethod::hat_star: r = z_star_test(ds, alpha, seed); break;
            case TestMethod::hoffman: r = z_h_test(ds, alpha, opt.q_hoffman, seed); break;
            default: throw InputError("unreachable");
        }
        out.estimate = r.estimate.value;
        out.reject = r.reject();
        out.cover_p = r.ci_lower < target_p && target_p < r.ci_upper;
        if (target_p0.has_value()) {
            out.cover_p0 = r.ci_lower < *target_p0 && *target_p0 < r.ci_upper;
        }
        out.discarded = std::max(r.estimate.resamples_discarded, r.variance.resamples_discarded);
        return out;
    } catch (const NegativeVarianceError&) {
        out.status = RepStatus::negative_variance;
    } catch (const Error&) {
        out.status = RepStatus::degenerate;
    }
    return out;
}

} // namespace

ExperimentReport run_experiment(const ScenarioConfig& cfg, std::span<const TestMethod> methods,
                                std::int64_t replications, std::uint64_t master_seed,
                                const ExperimentOptions& options) {
    if (replications < 1) {
        throw InputError("replications must be >= 1");
    }
    if (methods.empty()) {
        throw InputError("no methods requested");
    }
    ExperimentReport report;
    report.config = cfg;
    report.replications = replications;
    report.master_seed = master_seed;
    if (cfg.ics.has_value()) {
        report.target_p = theoretical_p(cfg.ics->first, cfg.ics->second);
        report.target_p0 = theoretical_p0(cfg.ics->first, cfg.ics->second);
    } else {
        report.target_p = 0.5;
    }

    const std::size_t n_methods = methods.size();
    std::vector<RepOutcome> slots(static_cast<std::size_t>(replications) * n_methods);

    const auto run_replicate = [&](std::int64_t r) {
        const std::uint64_t rep_seed = derive_seed(master_seed, static_cast<std::uint64_t>(r));
        try {
            Rng gen_rng(derive_seed(rep_seed, 0));
            const ClusteredDataset ds = gen_dataset(cfg, gen_rng);
            for (std::size_t k = 0; k < n_methods; ++k) {
                const std::uint64_t method_seed =
                    derive_seed(rep_seed, 1 + static_cast<std::uint64_t>(k));
                slots[static_cast<std::size_t>(r) * n_methods + k] =
                    evaluate_method(methods[k], ds, cfg.alpha_level, method_seed, options,
                                    report.target_p, report.target_p0);
            }
        } catch (const Error&) {
            // a replicate whose generated dataset cannot be analyzed at all
            // counts as degenerate for every method
            for (std::size_t k = 0; k < n_methods; ++k) {
                RepOutcome failed;
                failed.status = RepStatus::degenerate;
                slots[static_cast<std::size_t>(r) * n_methods + k] = failed;
            }
        }
    };

    const int jobs = std::max(1, options.jobs);
    if (jobs == 1) {
        for (std::int64_t r = 0; r < replications; ++r) run_replicate(r);
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::thread> workers;
        workers.reserve(static_cast<std::size_t>(jobs));
        for (int t = 0; t < jobs; ++t) {
            workers.emplace_back([&] {
                while (true) {
                    const std::int64_t r = next.fetch_add(1);
                    if (r >= replications) break;
                    run_replicate(r);
                }
            });
        }
        for (std::thread& w : workers) w.join();
    }

    report.methods.resize(n_methods);
    for (std::size_t k = 0; k < n_methods; ++k) {
        MethodReport& mr = report.methods[k];
        mr.method = methods[k];
        mr.replicates = replications;
        for (std::int64_t r = 0; r < replications; ++r) {
            const RepOutcome& o = slots[static_cast<std::size_t>(r) * n_methods + k];
            switch (o.status) {
                case RepStatus::negative_variance:
                    ++mr.negative_variance;
                    continue;
                case RepStatus::degenerate:
                    ++mr.degenerate;
                    continue;
                case RepStatus::ok:
                    break;
            }
            ++mr.valid;
            mr.estimate_sum += o.estimate;
            mr.rejections += o.reject;
            mr.covered_p += o.cover_p;
            mr.covered_p0 += o.cover_p0;
            mr.discarded_draws += o.discarded;
        }
    }
    return report;
}

namespace {

std::string format_rate(double x) {
    if (std::isnan(x)) return "";
    std::ostringstream os;
    os.precision(6);
    os << std::fixed << x;
    return os.str();
}

} // namespace

std::string report_csv(const ExperimentReport& report) {
    std::ostringstream os;
    os << "method,replicates,valid,rejection_rate,coverage_p,coverage_p0,mean_estimate,"
          "negative_variance,degenerate,discarded_draws\n";
    for (const MethodReport& m : report.methods) {
        const bool point_only = method_is_point_only(m.method);
        os << method_token(m.method) << ',' << m.replicates << ',' << m.valid << ',';
        os << (point_only ? "" : format_rate(m.rejection_rate())) << ',';
        os << (point_only ? "" : format_rate(m.coverage_p())) << ',';
        os << (point_only || !report.target_p0.has_value() ? "" : format_rate(m.coverage_p0()))
           << ',';
        os << format_rate(m.mean_estimate()) << ',';
        os << m.negative_variance << ',' << m.degenerate << ',' << m.discarded_draws << "\n";
    }
    return os.str();
}

std::string report_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    std::ostringstream cfg_text;
    save_scenario(report.config, cfg_text);
    j["scenario"] = {
        {"n1", report.config.n1},
        {"n2", report.config.n2},
        {"nc", report.config.nc},
        {"alpha_level", report.config.alpha_level},
        {"seed", report.config.seed},
        {"distribution",
         report.config.distribution == Distribution::gaussian ? "gaussian" : "cauchy"},
    };
    if (report.config.ics.has_value()) {
        j["scenario"]["c1"] = report.config.ics->first;
        j["scenario"]["c2"] = report.config.ics->second;
    }
    j["replications"] = report.replications;
    j["master_seed"] = report.master_seed;
    j["target_p"] = report.target_p;
    if (report.target_p0.has_value()) {
        j["target_p0"] = *report.target_p0;
    }
    j["methods"] = nlohmann::ordered_json::array();
    for (const MethodReport& m : report.methods) {
        nlohmann::ordered_json mj;
        mj["method"] = method_token(m.method);
        mj["replicates"] = m.replicates;
        mj["valid"] = m.valid;
        // rates are undefined (and omitted) when no replicate was usable
        if (!method_is_point_only(m.method) && m.valid > 0) {
            mj["rejection_rate"] = m.rejection_rate();
            mj["coverage_p"] = m.coverage_p();
            if (report.target_p0.has_value()) {
                mj["coverage_p0"] = m.coverage_p0();
            }
        }
        if (m.valid > 0) {
            mj["mean_estimate"] = m.mean_estimate();
        }
        mj["negative_variance"] = m.negative_variance;
        mj["degenerate"] = m.degenerate;
        mj["discarded_draws"] = m.discarded_draws;
        j["methods"].push_back(std::move(mj));
    }
    return j.dump(2) + "\n";
}

} // namespace cwmw
