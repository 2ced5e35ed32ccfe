#pragma once

#include "cwmw/dataset.hpp"
#include "cwmw/empirical.hpp"
#include "cwmw/rng.hpp"

#include <optional>

namespace cwmw {

enum class EstimatorMethod : std::uint8_t {
    p_tilde,
    p_hat_mc,
    p_hat_star,
    ignorable_unweighted,
    ignorable_weighted,
};

// Point estimate of the relative effect with provenance.
struct EffectEstimate {
    double value = 0.0; // in [0, 1]
    EstimatorMethod method = EstimatorMethod::p_tilde;
    std::int64_t resamples_used = 0;
    std::int64_t resamples_discarded = 0;
    std::optional<std::uint64_t> seed;
};

// One observation selected per cluster: the unit of within-cluster
// resampling. picks/groups are indexed by cluster position.
struct ResampleDraw {
    std::vector<double> values;
    std::vector<Group> groups;
    int m1_star = 0;
    int m2_star = 0;

    bool degenerate() const { return m1_star == 0 || m2_star == 0; }
};

// Select one member uniformly at random from each cluster. Consumes one
// uniform_below(m) per cluster with m > 1, in cluster order.
ResampleDraw draw_resample(const ClusteredDataset& ds, Rng& rng);

// Standard midranks: tied values share the average of the ranks they
// occupy. Output sums to n(n+1)/2.
std::vector<double> midranks(std::span<const double> values);

// Rank-sum statistic of the draw: sum of the group-2 midranks minus
// m2*(m2*+1)/2. Requires a non-degenerate draw.
double u_star(const ResampleDraw& draw);

// Two-sample effect estimate on one draw: U* / (m1* m2*).
// Throws DegenerateVarianceError (the "degenerate resample" signal) if the
// draw contains only one group.
EffectEstimate p_hat_star(const ResampleDraw& draw);

// Exact conditional expectation of U* over the resampling distribution.
double e_u_star(const ClusteredDataset& ds);

// Expected number of cross-group comparisons per resample:
// sum over i != j of alpha_i (1 - alpha_j).
double e_m1m2(const ClusteredDataset& ds);

// Closed-form resampling estimator: E(U*) / E(m1* m2*), evaluated without
// any Monte Carlo. Throws NoComparisonsError when e_m1m2 is zero.
EffectEstimate p_tilde(const ClusteredDataset& ds);

// Algebraically equivalent cross-pair form of p_tilde, written in terms of
// per-cluster-pair two-sample integrals. Kept as an independent
// implementation for equivalence testing.
double p_tilde_altform(const ClusteredDataset& ds);

// Monte Carlo average of p_hat_star over q resamples. Draw i uses the
// stream seeded with derive_seed(seed, i), so results are independent of
// any loop partitioning. Degenerate draws are discarded and counted.
EffectEstimate p_hat_mc(const ClusteredDataset& ds, std::int64_t q, std::uint64_t seed);

// Exact enumeration over every possible resample tuple (equal weights).
struct ResampleExpectations {
    double e_u = 0.0;
    double e_m1m2 = 0.0;
    double e_p_star = 0.0;           // conditional on non-degenerate tuples
    double nondegenerate_mass = 0.0; // probability of a non-degenerate tuple
    std::int64_t tuples = 0;
};

// Test oracle; feasible only while the product of cluster sizes stays
// within cap. Throws InputError when the cap is exceeded.
ResampleExpectations enumerate_resample_expectations(const ClusteredDataset& ds,
                                                     std::int64_t cap = 1000000);

// Baseline estimator that ignores cluster-size information:
// integral of the group-1 ECDF against the group-2 ECDF, with matching
// weighting on both sides.
EffectEstimate p_ignorable(const ClusteredDataset& ds, Weighting w);

} // namespace cwmw
