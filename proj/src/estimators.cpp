#include "cwmw/estimators.hpp"

#include "cwmw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cwmw {

ResampleDraw draw_resample(const ClusteredDataset& ds, Rng& rng) {
    ResampleDraw d;
    d.values.reserve(static_cast<std::size_t>(ds.n));
    d.groups.reserve(static_cast<std::size_t>(ds.n));
    for (const Cluster& c : ds.clusters) {
        const std::size_t k =
            c.m() == 1 ? 0 : static_cast<std::size_t>(rng.uniform_below(static_cast<std::uint64_t>(c.m())));
        d.values.push_back(c.values[k]);
        d.groups.push_back(c.groups[k]);
        (c.groups[k] == Group::g1 ? d.m1_star : d.m2_star) += 1;
    }
    return d;
}

std::vector<double> midranks(std::span<const double> values) {
    const std::size_t n = values.size();
    if (n == 0) {
        throw InputError("midranks of empty list");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        // positions i..j (0-based) share the midrank (i+1 + j+1) / 2
        const double r = 0.5 * static_cast<double>(i + j) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
        i = j + 1;
    }
    return ranks;
}

double u_star(const ResampleDraw& draw) {
    const auto ranks = midranks(draw.values);
    double rank_sum = 0.0;
    for (std::size_t i = 0; i < draw.groups.size(); ++i) {
        if (draw.groups[i] == Group::g2) rank_sum += ranks[i];
    }
    const double m2 = static_cast<double>(draw.m2_star);
    return rank_sum - 0.5 * m2 * (m2 + 1.0);
}

EffectEstimate p_hat_star(const ResampleDraw& draw) {
    if (draw.degenerate()) {
        throw DegenerateVarianceError("degenerate resample: draw contains only one group");
    }
    EffectEstimate e;
    e.method = EstimatorMethod::p_hat_star;
    e.resamples_used = 1;
    e.value = u_star(draw) / (static_cast<double>(draw.m1_star) * static_cast<double>(draw.m2_star));
    e.value = std::clamp(e.value, 0.0, 1.0);
    return e;
}

namespace {

// sum over j of (1/m_j) * sum over members x of j of
//   [ sum_{i in R2, i != j} alpha_i * F2i(x) ]
// This is the triple sum shared by e_u_star and p_tilde.
double cross_cluster_f2_sum(const ClusteredDataset& ds) {
    double total = 0.0;
    for (const Cluster& target : ds.clusters) {
        double per_cluster = 0.0;
        for (const double x : target.values) {
            double acc = 0.0;
            for (const int i : ds.r2) {
                const Cluster& ci = ds.clusters[static_cast<std::size_t>(i)];
                if (&ci == &target) continue;
                acc += ci.alpha * kernels::h_sum(ci.values_g2, x) /
                       static_cast<double>(ci.m2());
            }
            per_cluster += acc;
        }
        total += per_cluster / static_cast<double>(target.m());
    }
    return total;
}

double sum_alpha(const ClusteredDataset& ds) {
    double a = 0.0;
    for (const Cluster& c : ds.clusters) a += c.alpha;
    return a;
}

} // namespace

double e_u_star(const ClusteredDataset& ds) {
    const double n = static_cast<double>(ds.n);
    double a1 = 0.0, a_1m = 0.0; // sum alpha, sum alpha(1-alpha)
    for (const Cluster& c : ds.clusters) {
        a1 += c.alpha;
        a_1m += c.alpha * (1.0 - c.alpha);
    }
    const double s = cross_cluster_f2_sum(ds);
    return n * a1 - s - 0.5 * (a_1m + a1 * a1 + a1);
}

double e_m1m2(const ClusteredDataset& ds) {
    // sum_{i != j} alpha_i (1 - alpha_j) = (n-1) A1 + A2 - A1^2
    double a1 = 0.0, a2 = 0.0;
    for (const Cluster& c : ds.clusters) {
        a1 += c.alpha;
        a2 += c.alpha * c.alpha;
    }
    return (static_cast<double>(ds.n) - 1.0) * a1 + a2 - a1 * a1;
}

EffectEstimate p_tilde(const ClusteredDataset& ds) {
    const double denom = e_m1m2(ds);
    if (denom <= 0.0) {
        throw NoComparisonsError("no cross-cluster comparisons possible (expected comparison count is zero)");
    }
    const double numer =
        0.5 * (static_cast<double>(ds.n) - 1.0) * sum_alpha(ds) - cross_cluster_f2_sum(ds);
    EffectEstimate e;
    e.method = EstimatorMethod::p_tilde;
    e.value = std::clamp(0.5 + numer / denom, 0.0, 1.0);
    return e;
}

double p_tilde_altform(const ClusteredDataset& ds) {
    const double denom = e_m1m2(ds);
    if (denom <= 0.0) {
        throw NoComparisonsError("no cross-cluster comparisons possible (expected comparison count is zero)");
    }
    double numer = 0.0;
    for (const int i : ds.r1) {
        const Cluster& ci = ds.clusters[static_cast<std::size_t>(i)];
        for (const int j : ds.r2) {
            if (j == i) continue;
            const Cluster& cj = ds.clusters[static_cast<std::size_t>(j)];
            double cross = 0.0;
            for (const double x : cj.values_g2) {
                cross += kernels::h_sum(ci.values_g1, x);
            }
            cross /= static_cast<double>(ci.m1()) * static_cast<double>(cj.m2());
            numer += (1.0 - ci.alpha) * cj.alpha * cross;
        }
    }
    return numer / denom;
}

EffectEstimate p_hat_mc(const ClusteredDataset& ds, std::int64_t q, std::uint64_t seed) {
    if (q < 1) {
        throw InputError("resample count must be >= 1");
    }
    double acc = 0.0;
    std::int64_t used = 0;
    for (std::int64_t i = 0; i < q; ++i) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i)));
        const ResampleDraw d = draw_resample(ds, rng);
        if (d.degenerate()) continue;
        acc += u_star(d) / (static_cast<double>(d.m1_star) * static_cast<double>(d.m2_star));
        ++used;
    }
    if (used == 0) {
        throw DegenerateVarianceError("all resamples degenerate: no draw contained both groups");
    }
    EffectEstimate e;
    e.method = EstimatorMethod::p_hat_mc;
    e.value = std::clamp(acc / static_cast<double>(used), 0.0, 1.0);
    e.resamples_used = used;
    e.resamples_discarded = q - used;
    e.seed = seed;
    return e;
}

ResampleExpectations enumerate_resample_expectations(const ClusteredDataset& ds,
                                                     std::int64_t cap) {
    double tuples_d = 1.0;
    for (const Cluster& c : ds.clusters) tuples_d *= static_cast<double>(c.m());
    if (tuples_d > static_cast<double>(cap)) {
        throw InputError("enumeration cap exceeded: " + std::to_string(tuples_d) + " tuples > " +
                         std::to_string(cap));
    }
    const auto n = static_cast<std::size_t>(ds.n);
    std::vector<std::size_t> pick(n, 0);
    ResampleDraw d;
    d.values.resize(n);
    d.groups.resize(n);

    ResampleExpectations out;
    std::int64_t nondeg = 0;
    double e_u_acc = 0.0, e_m_acc = 0.0, e_p_acc = 0.0;
    while (true) {
        d.m1_star = 0;
        d.m2_star = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const Cluster& c = ds.clusters[i];
            d.values[i] = c.values[pick[i]];
            d.groups[i] = c.groups[pick[i]];
            (d.groups[i] == Group::g1 ? d.m1_star : d.m2_star) += 1;
        }
        const double m1m2 = static_cast<double>(d.m1_star) * static_cast<double>(d.m2_star);
        e_m_acc += m1m2;
        if (m1m2 > 0.0) {
            const double u = u_star(d);
            e_u_acc += u;
            e_p_acc += u / m1m2;
            ++nondeg;
        }
        ++out.tuples;
        // odometer increment
        std::size_t i = 0;
        while (i < n) {
            if (++pick[i] < static_cast<std::size_t>(ds.clusters[i].m())) break;
            pick[i] = 0;
            ++i;
        }
        if (i == n) break;
    }
    const double total = static_cast<double>(out.tuples);
    out.e_u = e_u_acc / total;
    out.e_m1m2 = e_m_acc / total;
    out.nondegenerate_mass = static_cast<double>(nondeg) / total;
    out.e_p_star = nondeg > 0 ? e_p_acc / static_cast<double>(nondeg)
                              : std::numeric_limits<double>::quiet_NaN();
    return out;
}

EffectEstimate p_ignorable(const ClusteredDataset& ds, Weighting w) {
    if (ds.total1 == 0 || ds.total2 == 0) {
        throw InputError("both groups must have observations");
    }
    // integral of G1 against dG2 with matching weighting: average G1 over
    // the group-2 observations, each weighted per the G2 construction.
    double acc = 0.0;
    if (w == Weighting::unweighted) {
        for (const int j : ds.r2) {
            const Cluster& cj = ds.clusters[static_cast<std::size_t>(j)];
            double per_cluster = 0.0;
            for (const double x : cj.values_g2) {
                per_cluster += group_ecdf(ds, Group::g1, Weighting::unweighted, x);
            }
            acc += per_cluster / static_cast<double>(cj.m2());
        }
        acc /= static_cast<double>(ds.r2.size());
    } else {
        for (const int j : ds.r2) {
            const Cluster& cj = ds.clusters[static_cast<std::size_t>(j)];
            for (const double x : cj.values_g2) {
                acc += group_ecdf(ds, Group::g1, Weighting::weighted, x);
            }
        }
        acc /= static_cast<double>(ds.total2);
    }
    EffectEstimate e;
    e.method = (w == Weighting::unweighted) ? EstimatorMethod::ignorable_unweighted
                                            : EstimatorMethod::ignorable_weighted;
    e.value = std::clamp(acc, 0.0, 1.0);
    return e;
}

} // namespace cwmw
