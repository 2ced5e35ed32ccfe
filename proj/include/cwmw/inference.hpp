#pragma once

#include "cwmw/estimators.hpp"

#include <utility>

namespace cwmw {

enum class VarianceMethod : std::uint8_t {
    analytic,
    hoffman,
    mc_p_hat,
    bm_single_draw,
};

struct VarianceEstimate {
    double value = 0.0;
    VarianceMethod method = VarianceMethod::analytic;
    std::int64_t resamples_used = 0;
    std::int64_t resamples_discarded = 0;
    // (mean per-draw two-sample variance, across-draw variance) for the
    // Monte Carlo difference constructions.
    std::optional<std::pair<double, double>> components;
};

enum class Reference : std::uint8_t { standard_normal, student_t };

struct InferenceResult {
    EffectEstimate estimate;
    VarianceEstimate variance;
    double statistic = 0.0;
    Reference reference = Reference::standard_normal;
    std::optional<double> df; // present iff reference == student_t
    double p_value = 1.0;
    double ci_lower = 0.0;
    double ci_upper = 1.0;
    double alpha = 0.05;

    // Test/CI duality: reject at level alpha iff 1/2 lies outside the
    // open confidence interval.
    bool reject() const { return !(ci_lower < 0.5 && 0.5 < ci_upper); }
};

// Per-cluster linear term of the variance expansion.
double w_hat(const ClusteredDataset& ds, int l);

// Plug-in expectation of the per-cluster term, given the point estimate.
double e_w_hat(const ClusteredDataset& ds, int l, double ptilde);

struct AnalyticVariance {
    VarianceEstimate variance;
    std::vector<double> vhat; // per-cluster squared centered terms
};

// Closed-form (ratio-consistent) variance estimate of p_tilde. Always
// nonnegative. Also returns the per-cluster components needed by df_hat.
AnalyticVariance var_tilde(const ClusteredDataset& ds);

// Satterthwaite-type degrees of freedom from the per-cluster components,
// partitioned by cluster composition (group-1-only / group-2-only /
// complete). Cells with fewer than two clusters contribute with
// denominator 1. Throws DegenerateVarianceError if every component is 0.
double df_hat(const ClusteredDataset& ds, std::span<const double> vhat);

// Normal-reference test of H0: p = 1/2 based on p_tilde and var_tilde.
InferenceResult z_tilde_test(const ClusteredDataset& ds, double alpha);

// Small-sample variant: same statistic, Student-t reference at df_hat.
InferenceResult t_tilde_test(const ClusteredDataset& ds, double alpha);

// Two-sample placement variance of the effect estimate on a single draw:
// S1^2/m1* + S2^2/m2*, where S1^2 is the sample variance of the group-2
// ECDF evaluated at the group-1 picks and vice versa. Requires at least
// two picks in each group.
VarianceEstimate bm_variance_single_draw(const ResampleDraw& draw);

// Naive single-resample test: effect and placement variance from one
// usable draw (retry budget applies when a draw has fewer than two picks
// in either group).
InferenceResult z_star_test(const ClusteredDataset& ds, double alpha, std::uint64_t seed,
                            int retry_budget = 100);

// Conditional-variance (difference) estimator of Var(p_tilde):
// piece1 = mean over usable draws of (m1* m2*)^2 * sigma*^2,
// piece2 = across-draw sample variance of U*,
// value  = (piece1 - piece2) / e_m1m2^2.
// Throws NegativeVarianceError when the difference is nonpositive and
// DegenerateVarianceError when fewer than max(2, q/2) draws are usable.
VarianceEstimate hoffman_variance(const ClusteredDataset& ds, std::int64_t q, std::uint64_t seed);

// Test of H0 using p_tilde with the Hoffman-type variance.
InferenceResult z_h_test(const ClusteredDataset& ds, double alpha, std::int64_t q,
                         std::uint64_t seed);

// Test of H0 using the Monte Carlo average estimate with its matching
// difference-type variance (mean sigma*^2 minus across-draw variance of
// p_hat_star).
InferenceResult z_hat_test(const ClusteredDataset& ds, double alpha, std::int64_t q,
                           std::uint64_t seed);

} // namespace cwmw
