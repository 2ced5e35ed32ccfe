#pragma once

#include "cwmw/dataset.hpp"
#include "cwmw/rng.hpp"

#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

namespace cwmw {

// Parameters of the block covariance used for cluster generation:
// per-group diagonal blocks sigma_g^2 (I + rho_g J) and off-diagonal
// blocks rho12 sigma1 sigma2 J. For the Cauchy case this is the scale
// matrix.
struct CovarianceSpec {
    double sigma1_sq = 1.0;
    double sigma2_sq = 1.0;
    double rho1 = 0.0;
    double rho2 = 0.0;
    double rho12 = 0.0;
};

enum class IcgLaw : std::uint8_t {
    binom2, // size = 1 + Binomial(2, 0.3), max 3
    binom9, // size = 1 + Binomial(9, 0.3), max 10
    fixed_from_ics, // sizes drawn uniformly from {c1, c2}
};

enum class Distribution : std::uint8_t { gaussian, cauchy };

struct ScenarioConfig {
    int n1 = 0;
    int n2 = 0;
    int nc = 0;
    IcgLaw icg_law = IcgLaw::binom2;
    Distribution distribution = Distribution::gaussian;
    CovarianceSpec covariance;
    std::optional<std::pair<int, int>> ics; // (c1, c2); informative sizes
    double alpha_level = 0.05;
    std::uint64_t seed = 20240101;
};

// Flat key=value scenario file. Keys: n1, n2, nc, icg_law, distribution,
// sigma1_sq, sigma2_sq, rho1, rho2, rho12, c1, c2, alpha_level, seed.
// icg_law tokens: binom2 | binom9 | fixed. c1/c2 are required exactly when
// icg_law is fixed. Lines starting with '#' are ignored.
ScenarioConfig load_scenario(std::istream& in);
ScenarioConfig load_scenario_file(const std::string& path);
void save_scenario(const ScenarioConfig& cfg, std::ostream& out);

// Dense symmetric matrix in row-major order (sizes here are tiny).
struct Matrix {
    int n = 0;
    std::vector<double> a;

    explicit Matrix(int size = 0) : n(size), a(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0) {}
    double& at(int i, int j) { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; }
    double at(int i, int j) const { return a[static_cast<std::size_t>(i) * static_cast<std::size_t>(n) + static_cast<std::size_t>(j)]; }
};

// Assemble the (m1+m2) x (m1+m2) covariance block matrix.
Matrix build_sigma(const CovarianceSpec& spec, int m1, int m2);

// Lower-triangular Cholesky factor; throws NotPositiveDefiniteError when a
// pivot is not (numerically) positive.
Matrix cholesky_lower(const Matrix& m);

// Factor used by the generators: the Cholesky factor when the assembled
// covariance is positive definite, otherwise the eigen factor with
// negative eigenvalues clipped to zero (the behavior of eigen-method
// multivariate normal generators; some published parameter combinations
// are indefinite for multi-member blocks).
Matrix sampling_factor(const CovarianceSpec& spec, int m1, int m2);

// Draw one cluster: Gaussian draws are mean + L z; Cauchy draws divide the
// centered Gaussian part by the square root of an independent chi-square(1)
// (multivariate t with one degree of freedom). Consumes m1+m2 normals, plus
// one more for the Cauchy scale.
Cluster sample_cluster(const Matrix& chol, int m1, int m2, double mean_g1, double mean_g2,
                       Distribution dist, Rng& rng, std::string id);

// Generators for the two scenario families. Both are deterministic given
// the rng state and produce cluster counts exactly matching the config.
ClusteredDataset gen_ignorable_dataset(const ScenarioConfig& cfg, Rng& rng);
ClusteredDataset gen_ics_dataset(const ScenarioConfig& cfg, Rng& rng);
ClusteredDataset gen_dataset(const ScenarioConfig& cfg, Rng& rng);

// Closed-form effects of the two-point informative-size design:
// cluster sizes uniform on {c1, c2}; group-1 means are -c2 (size c1) and
// +c1 (size c2); group-2 means are +c2 (size c1) and -c1 (size c2); unit
// normal noise.
double theoretical_p(int c1, int c2);

// Observation-weighted counterpart (component weights proportional to
// cluster size).
double theoretical_p0(int c1, int c2);

// Variant of theoretical_p0 with the normal arguments scaled by 1/sqrt(2)
// instead of sqrt(2). Retained for comparison only; the Monte Carlo oracle
// agrees with theoretical_p0, not with this form.
double theoretical_p0_variant(int c1, int c2);

struct TheoreticalEffects {
    double p = 0.5;
    double p0 = 0.5;
    double mu_d = 0.0; // reported label c1 - c2 (metadata only)
};

TheoreticalEffects theoretical_effects(int c1, int c2);

// Brute-force check of the closed forms by direct sampling from the
// mixture models.
struct McEffectOracle {
    double p_mc = 0.0;
    double p0_mc = 0.0;
    double se_p = 0.0;
    double se_p0 = 0.0;
    std::int64_t draws = 0;
};

McEffectOracle mc_effect_oracle(int c1, int c2, std::int64_t draws, Rng& rng);

} // namespace cwmw
