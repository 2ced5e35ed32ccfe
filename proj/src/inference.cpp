#include "cwmw/inference.hpp"

#include "cwmw/errors.hpp"
#include "cwmw/reference_dist.hpp"

#include <algorithm>
#include <cmath>

namespace cwmw {

namespace {

double total_alpha(const ClusteredDataset& ds) {
    double a = 0.0;
    for (const Cluster& c : ds.clusters) a += c.alpha;
    return a;
}

double sample_variance(std::span<const double> v) {
    const auto n = static_cast<double>(v.size());
    double mean = 0.0;
    for (const double x : v) mean += x;
    mean /= n;
    double acc = 0.0;
    for (const double x : v) acc += (x - mean) * (x - mean);
    return acc / (n - 1.0);
}

void check_alpha(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw InputError("alpha must lie in (0,1)");
    }
}

InferenceResult assemble_result(EffectEstimate est, VarianceEstimate var, double alpha,
                                std::optional<double> df) {
    check_alpha(alpha);
    if (var.value < 0.0) {
        throw NegativeVarianceError("variance estimate is negative; no test available");
    }
    if (var.value == 0.0) {
        throw DegenerateVarianceError("degenerate variance: variance estimate is zero");
    }
    InferenceResult r;
    r.estimate = est;
    r.variance = var;
    r.alpha = alpha;
    const double sd = std::sqrt(var.value);
    r.statistic = (est.value - 0.5) / sd;
    if (df.has_value()) {
        r.reference = Reference::student_t;
        r.df = df;
        r.p_value = two_sided_p_t(r.statistic, *df);
        const double q = t_quantile(1.0 - alpha / 2.0, *df);
        r.ci_lower = est.value - q * sd;
        r.ci_upper = est.value + q * sd;
    } else {
        r.reference = Reference::standard_normal;
        r.p_value = two_sided_p_normal(r.statistic);
        const double q = normal_quantile(1.0 - alpha / 2.0);
        r.ci_lower = est.value - q * sd;
        r.ci_upper = est.value + q * sd;
    }
    return r;
}

} // namespace

double w_hat(const ClusteredDataset& ds, int l) {
    const Cluster& cl = ds.clusters[static_cast<std::size_t>(l)];
    const double alpha_rest = total_alpha(ds) - cl.alpha;

    double g2_sum = 0.0;
    for (const double x : cl.values) {
        g2_sum += group_ecdf(ds, Group::g2, Weighting::unweighted, x);
    }
    const double term1 = alpha_rest * g2_sum;

    double term2 = 0.0;
    if (cl.m2() > 0) {
        for (const double x : cl.values_g2) {
            double whole_sum = 0.0;
            for (int j = 0; j < ds.n; ++j) {
                if (j == l) continue;
                whole_sum += whole_cluster_ecdf(ds.clusters[static_cast<std::size_t>(j)], x);
            }
            term2 += whole_sum;
        }
    }
    return (term1 - term2) / (static_cast<double>(cl.m()) * (static_cast<double>(ds.n) + 1.0));
}

double e_w_hat(const ClusteredDataset& ds, int l, double ptilde) {
    const Cluster& cl = ds.clusters[static_cast<std::size_t>(l)];
    const double a1 = total_alpha(ds);
    const double alpha_rest = a1 - cl.alpha;
    const double lead = ((1.0 - cl.alpha) * (1.0 - ptilde) + 0.5 * cl.alpha) * alpha_rest;
    double trail = 0.0;
    if (cl.m2() > 0) {
        // sum over j != l of (1 - alpha_j) ptilde + alpha_j / 2
        const double sum_all = (static_cast<double>(ds.n) - a1) * ptilde + 0.5 * a1;
        trail = cl.alpha * (sum_all - ((1.0 - cl.alpha) * ptilde + 0.5 * cl.alpha));
    }
    return (lead - trail) / (static_cast<double>(ds.n) + 1.0);
}

AnalyticVariance var_tilde(const ClusteredDataset& ds) {
    const double denom = e_m1m2(ds);
    if (denom <= 0.0) {
        throw NoComparisonsError("no cross-cluster comparisons possible (expected comparison count is zero)");
    }
    const double pt = p_tilde(ds).value;
    AnalyticVariance out;
    out.vhat.resize(static_cast<std::size_t>(ds.n));
    double acc = 0.0;
    for (int l = 0; l < ds.n; ++l) {
        const double diff = w_hat(ds, l) - e_w_hat(ds, l, pt);
        const double v = diff * diff;
        out.vhat[static_cast<std::size_t>(l)] = v;
        acc += v;
    }
    // Exactly-degenerate data (e.g. complete separation) can leave rounding
    // dust of order n * eps^2 in the sum; the smallest attainable nonzero
    // component is many orders of magnitude larger at any realistic n.
    if (acc <= static_cast<double>(ds.n) * 1e-26) {
        acc = 0.0;
        std::fill(out.vhat.begin(), out.vhat.end(), 0.0);
    }
    const double factor = (static_cast<double>(ds.n) + 1.0) / denom;
    out.variance.method = VarianceMethod::analytic;
    out.variance.value = factor * factor * acc;
    return out;
}

double df_hat(const ClusteredDataset& ds, std::span<const double> vhat) {
    double cell_sum[3] = {0.0, 0.0, 0.0};
    const int cell_count[3] = {ds.n1, ds.n2, ds.nc};
    for (int l = 0; l < ds.n; ++l) {
        const Cluster& c = ds.clusters[static_cast<std::size_t>(l)];
        const int cell = (c.m2() == 0) ? 0 : (c.m1() == 0 ? 1 : 2);
        cell_sum[cell] += vhat[static_cast<std::size_t>(l)];
    }
    const double total = cell_sum[0] + cell_sum[1] + cell_sum[2];
    if (total <= 0.0) {
        throw DegenerateVarianceError("degenerate variance: all per-cluster components are zero");
    }
    double denom = 0.0;
    for (int cell = 0; cell < 3; ++cell) {
        const double d = cell_count[cell] >= 2 ? static_cast<double>(cell_count[cell]) - 1.0 : 1.0;
        denom += cell_sum[cell] * cell_sum[cell] / d;
    }
    return total * total / denom;
}

InferenceResult z_tilde_test(const ClusteredDataset& ds, double alpha) {
    check_alpha(alpha);
    const EffectEstimate est = p_tilde(ds);
    return assemble_result(est, var_tilde(ds).variance, alpha, std::nullopt);
}

InferenceResult t_tilde_test(const ClusteredDataset& ds, double alpha) {
    check_alpha(alpha);
    const EffectEstimate est = p_tilde(ds);
    const AnalyticVariance av = var_tilde(ds);
    if (av.variance.value == 0.0) {
        throw DegenerateVarianceError("degenerate variance: variance estimate is zero");
    }
    const double df = df_hat(ds, av.vhat);
    return assemble_result(est, av.variance, alpha, df);
}

VarianceEstimate bm_variance_single_draw(const ResampleDraw& draw) {
    if (draw.m1_star < 2 || draw.m2_star < 2) {
        throw DegenerateVarianceError("placement variance needs at least two picks per group");
    }
    std::vector<double> v1, v2;
    v1.reserve(static_cast<std::size_t>(draw.m1_star));
    v2.reserve(static_cast<std::size_t>(draw.m2_star));
    for (std::size_t i = 0; i < draw.values.size(); ++i) {
        (draw.groups[i] == Group::g1 ? v1 : v2).push_back(draw.values[i]);
    }
    const double m1 = static_cast<double>(draw.m1_star);
    const double m2 = static_cast<double>(draw.m2_star);
    std::vector<double> placements;
    placements.reserve(v1.size());
    for (const double x : v1) placements.push_back(kernels::h_sum(v2, x) / m2);
    const double s1 = sample_variance(placements);
    placements.clear();
    for (const double x : v2) placements.push_back(kernels::h_sum(v1, x) / m1);
    const double s2 = sample_variance(placements);

    VarianceEstimate var;
    var.method = VarianceMethod::bm_single_draw;
    var.value = s1 / m1 + s2 / m2;
    var.resamples_used = 1;
    return var;
}

InferenceResult z_star_test(const ClusteredDataset& ds, double alpha, std::uint64_t seed,
                            int retry_budget) {
    check_alpha(alpha);
    for (int attempt = 0; attempt < retry_budget; ++attempt) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(attempt)));
        const ResampleDraw draw = draw_resample(ds, rng);
        if (draw.m1_star < 2 || draw.m2_star < 2) continue;
        EffectEstimate est = p_hat_star(draw);
        est.seed = seed;
        est.resamples_used = attempt + 1;
        est.resamples_discarded = attempt;
        return assemble_result(est, bm_variance_single_draw(draw), alpha, std::nullopt);
    }
    throw DegenerateVarianceError("no usable resample (two picks per group) within the retry budget of " +
                                  std::to_string(retry_budget));
}

namespace {

struct DrawAccumulator {
    std::vector<double> u;       // U* per usable draw
    std::vector<double> p_star;  // effect per usable draw
    double sigma_sq_sum = 0.0;   // sum of per-draw placement variances
    double scaled_sigma_sum = 0.0; // sum of (m1* m2*)^2 sigma*^2
    double p_star_all_sum = 0.0; // over all non-degenerate draws
    std::int64_t nondegenerate = 0;

    std::int64_t usable() const { return static_cast<std::int64_t>(u.size()); }
};

DrawAccumulator accumulate_draws(const ClusteredDataset& ds, std::int64_t q, std::uint64_t seed) {
    if (q < 2) {
        throw InputError("Monte Carlo variance needs at least 2 resamples");
    }
    DrawAccumulator acc;
    for (std::int64_t i = 0; i < q; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const ResampleDraw draw = draw_resample(ds, rng);
        if (draw.degenerate()) continue;
        const double m1m2 = static_cast<double>(draw.m1_star) * static_cast<double>(draw.m2_star);
        const double u = u_star(draw);
        acc.p_star_all_sum += u / m1m2;
        ++acc.nondegenerate;
        if (draw.m1_star < 2 || draw.m2_star < 2) continue;
        const double sigma_sq = bm_variance_single_draw(draw).value;
        acc.u.push_back(u);
        acc.p_star.push_back(u / m1m2);
        acc.sigma_sq_sum += sigma_sq;
        acc.scaled_sigma_sum += m1m2 * m1m2 * sigma_sq;
    }
    return acc;
}

void check_usable(const DrawAccumulator& acc, std::int64_t q) {
    if (acc.usable() < std::max<std::int64_t>(2, q / 2)) {
        throw DegenerateVarianceError("insufficient usable resamples: " +
                                      std::to_string(acc.usable()) + " of " + std::to_string(q));
    }
}

} // namespace

VarianceEstimate hoffman_variance(const ClusteredDataset& ds, std::int64_t q, std::uint64_t seed) {
    const double e = e_m1m2(ds);
    if (e <= 0.0) {
        throw NoComparisonsError("no cross-cluster comparisons possible (expected comparison count is zero)");
    }
    const DrawAccumulator acc = accumulate_draws(ds, q, seed);
    check_usable(acc, q);
    const double usable = static_cast<double>(acc.usable());
    const double piece1 = acc.scaled_sigma_sum / usable;
    const double piece2 = sample_variance(acc.u);
    VarianceEstimate var;
    var.method = VarianceMethod::hoffman;
    var.value = (piece1 - piece2) / (e * e);
    var.resamples_used = acc.usable();
    var.resamples_discarded = q - acc.usable();
    var.components = std::make_pair(piece1, piece2);
    if (var.value <= 0.0) {
        throw NegativeVarianceError(
            "Monte Carlo variance estimate is nonpositive (difference construction); test result unavailable");
    }
    return var;
}

InferenceResult z_h_test(const ClusteredDataset& ds, double alpha, std::int64_t q,
                         std::uint64_t seed) {
    check_alpha(alpha);
    const EffectEstimate est = p_tilde(ds);
    return assemble_result(est, hoffman_variance(ds, q, seed), alpha, std::nullopt);
}

InferenceResult z_hat_test(const ClusteredDataset& ds, double alpha, std::int64_t q,
                           std::uint64_t seed) {
    check_alpha(alpha);
    const DrawAccumulator acc = accumulate_draws(ds, q, seed);
    if (acc.nondegenerate == 0) {
        throw DegenerateVarianceError("all resamples degenerate: no draw contained both groups");
    }
    check_usable(acc, q);

    EffectEstimate est;
    est.method = EstimatorMethod::p_hat_mc;
    est.value = std::clamp(acc.p_star_all_sum / static_cast<double>(acc.nondegenerate), 0.0, 1.0);
    est.resamples_used = acc.nondegenerate;
    est.resamples_discarded = q - acc.nondegenerate;
    est.seed = seed;

    const double piece1 = acc.sigma_sq_sum / static_cast<double>(acc.usable());
    const double piece2 = sample_variance(acc.p_star);
    VarianceEstimate var;
    var.method = VarianceMethod::mc_p_hat;
    var.value = piece1 - piece2;
    var.resamples_used = acc.usable();
    var.resamples_discarded = q - acc.usable();
    var.components = std::make_pair(piece1, piece2);
    if (var.value <= 0.0) {
        throw NegativeVarianceError(
            "Monte Carlo variance estimate is nonpositive (difference construction); test result unavailable");
    }
    return assemble_result(est, var, alpha, std::nullopt);
}

} // namespace cwmw
