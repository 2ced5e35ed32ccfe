#include "cwmw/simulation.hpp"

#include "cwmw/empirical.hpp"
#include "cwmw/errors.hpp"

#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace cwmw {

namespace {

double phi(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

int icg_nu(IcgLaw law) {
    switch (law) {
        case IcgLaw::binom2: return 2;
        case IcgLaw::binom9: return 9;
        case IcgLaw::fixed_from_ics: break;
    }
    throw InputError("intra-cluster group sizes are fixed by (c1,c2) in this scenario");
}

// size = 1 + Binomial(nu, 0.3)
int draw_icg_size(IcgLaw law, Rng& rng) {
    const int nu = icg_nu(law);
    int s = 1;
    for (int t = 0; t < nu; ++t) {
        s += rng.uniform() < 0.3;
    }
    return s;
}

} // namespace

Matrix build_sigma(const CovarianceSpec& spec, int m1, int m2) {
    if (m1 < 0 || m2 < 0 || m1 + m2 < 1) {
        throw InputError("covariance block needs at least one member");
    }
    if (spec.sigma1_sq <= 0.0 || spec.sigma2_sq <= 0.0) {
        throw InputError("group variances must be positive");
    }
    const int n = m1 + m2;
    Matrix s(n);
    const double cross = spec.rho12 * std::sqrt(spec.sigma1_sq) * std::sqrt(spec.sigma2_sq);
    for (int i = 0; i < n; ++i) {
        const bool i1 = i < m1;
        for (int j = 0; j < n; ++j) {
            const bool j1 = j < m1;
            double v = 0.0;
            if (i1 && j1) {
                v = (i == j) ? spec.sigma1_sq * (1.0 + spec.rho1) : spec.rho1 * spec.sigma1_sq;
            } else if (!i1 && !j1) {
                v = (i == j) ? spec.sigma2_sq * (1.0 + spec.rho2) : spec.rho2 * spec.sigma2_sq;
            } else {
                v = cross;
            }
            s.at(i, j) = v;
        }
    }
    return s;
}

Matrix cholesky_lower(const Matrix& m) {
    const int n = m.n;
    double scale = 0.0;
    for (int i = 0; i < n; ++i) scale = std::max(scale, m.at(i, i));
    Matrix l(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= i; ++j) {
            double acc = m.at(i, j);
            for (int k = 0; k < j; ++k) acc -= l.at(i, k) * l.at(j, k);
            if (i == j) {
                if (acc <= 1e-12 * scale) {
                    throw NotPositiveDefiniteError("covariance matrix is not positive definite");
                }
                l.at(i, j) = std::sqrt(acc);
            } else {
                l.at(i, j) = acc / l.at(j, j);
            }
        }
    }
    return l;
}

Cluster sample_cluster(const Matrix& chol, int m1, int m2, double mean_g1, double mean_g2,
                       Distribution dist, Rng& rng, std::string id) {
    const int n = m1 + m2;
    std::vector<double> z(static_cast<std::size_t>(n));
    for (double& v : z) v = rng.normal();
    double inv_scale = 1.0;
    if (dist == Distribution::cauchy) {
        inv_scale = 1.0 / std::sqrt(rng.chi_square_1());
    }
    std::vector<double> values(static_cast<std::size_t>(n));
    std::vector<Group> groups(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        for (int k = 0; k < n; ++k) acc += chol.at(i, k) * z[static_cast<std::size_t>(k)];
        const double mean = i < m1 ? mean_g1 : mean_g2;
        values[static_cast<std::size_t>(i)] = mean + acc * inv_scale;
        groups[static_cast<std::size_t>(i)] = i < m1 ? Group::g1 : Group::g2;
    }
    return make_cluster(std::move(id), std::move(values), std::move(groups));
}

namespace {

// Cyclic Jacobi eigendecomposition for small symmetric matrices.
// Returns eigenvalues in `values` and eigenvectors in the columns of `vectors`.
void jacobi_eigen(const Matrix& m, std::vector<double>& values, Matrix& vectors) {
    const int n = m.n;
    Matrix a = m;
    vectors = Matrix(n);
    for (int i = 0; i < n; ++i) vectors.at(i, i) = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
        }
        if (off < 1e-28) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a.at(p, q);
                if (apq == 0.0) continue;
                const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a.at(k, p);
                    const double akq = a.at(k, q);
                    a.at(k, p) = c * akp - s * akq;
                    a.at(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a.at(p, k);
                    const double aqk = a.at(q, k);
                    a.at(p, k) = c * apk - s * aqk;
                    a.at(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = vectors.at(k, p);
                    const double vkq = vectors.at(k, q);
                    vectors.at(k, p) = c * vkp - s * vkq;
                    vectors.at(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    values.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) values[static_cast<std::size_t>(i)] = a.at(i, i);
}

} // namespace

Matrix sampling_factor(const CovarianceSpec& spec, int m1, int m2) {
    const Matrix sigma = build_sigma(spec, m1, m2);
    try {
        return cholesky_lower(sigma);
    } catch (const NotPositiveDefiniteError&) {
        // Some published parameter combinations are indefinite once a block
        // has two or more members (a large rho12 with small rho1/rho2).
        // Fall back to the nearest factorizable form: eigendecompose and
        // clip negative eigenvalues to zero, matching the eigen-method
        // multivariate normal generators in common statistical software.
        std::vector<double> lambda;
        Matrix v;
        jacobi_eigen(sigma, lambda, v);
        const int n = sigma.n;
        Matrix b(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double lj = lambda[static_cast<std::size_t>(j)];
                b.at(i, j) = lj > 0.0 ? v.at(i, j) * std::sqrt(lj) : 0.0;
            }
        }
        return b;
    }
}

namespace {

// Sampling factors keyed by (m1, m2); block sizes in scope are tiny.
class CholCache {
public:
    explicit CholCache(const CovarianceSpec& spec) : spec_(spec) {}
    const Matrix& get(int m1, int m2) {
        const auto key = std::make_pair(m1, m2);
        auto it = cache_.find(key);
        if (it == cache_.end()) {
            it = cache_.emplace(key, sampling_factor(spec_, m1, m2)).first;
        }
        return it->second;
    }

private:
    const CovarianceSpec& spec_;
    std::map<std::pair<int, int>, Matrix> cache_;
};

} // namespace

ClusteredDataset gen_ignorable_dataset(const ScenarioConfig& cfg, Rng& rng) {
    if (cfg.ics.has_value()) {
        throw InputError("ignorable-size generator called with fixed (c1,c2) sizes");
    }
    CholCache chol(cfg.covariance);
    std::vector<Cluster> clusters;
    clusters.reserve(static_cast<std::size_t>(cfg.n1 + cfg.n2 + cfg.nc));
    int id = 0;
    for (int i = 0; i < cfg.n1; ++i) {
        const int m1 = draw_icg_size(cfg.icg_law, rng);
        clusters.push_back(sample_cluster(chol.get(m1, 0), m1, 0, 0.0, 0.0, cfg.distribution, rng,
                                          "c" + std::to_string(++id)));
    }
    for (int i = 0; i < cfg.n2; ++i) {
        const int m2 = draw_icg_size(cfg.icg_law, rng);
        clusters.push_back(sample_cluster(chol.get(0, m2), 0, m2, 0.0, 0.0, cfg.distribution, rng,
                                          "c" + std::to_string(++id)));
    }
    for (int i = 0; i < cfg.nc; ++i) {
        const int m1 = draw_icg_size(cfg.icg_law, rng);
        const int m2 = draw_icg_size(cfg.icg_law, rng);
        clusters.push_back(sample_cluster(chol.get(m1, m2), m1, m2, 0.0, 0.0, cfg.distribution,
                                          rng, "c" + std::to_string(++id)));
    }
    return assemble(std::move(clusters));
}

ClusteredDataset gen_ics_dataset(const ScenarioConfig& cfg, Rng& rng) {
    if (!cfg.ics.has_value()) {
        throw InputError("informative-size generator needs (c1,c2)");
    }
    const auto [c1, c2] = *cfg.ics;
    CholCache chol(cfg.covariance);
    std::vector<Cluster> clusters;
    clusters.reserve(static_cast<std::size_t>(cfg.n1 + cfg.n2 + cfg.nc));
    int id = 0;
    // Size label s is uniform on {c1, c2}. Conditional means: group 1 is
    // -c2 when s == c1 and +c1 when s == c2; group 2 is +c2 when s == c1
    // and -c1 when s == c2.
    const auto mean1 = [&](bool s_is_c1) { return s_is_c1 ? -static_cast<double>(c2) : static_cast<double>(c1); };
    const auto mean2 = [&](bool s_is_c1) { return s_is_c1 ? static_cast<double>(c2) : -static_cast<double>(c1); };
    for (int i = 0; i < cfg.n1; ++i) {
        const bool s_is_c1 = rng.uniform_below(2) == 0;
        const int s = s_is_c1 ? c1 : c2;
        clusters.push_back(sample_cluster(chol.get(s, 0), s, 0, mean1(s_is_c1), 0.0,
                                          cfg.distribution, rng, "c" + std::to_string(++id)));
    }
    for (int i = 0; i < cfg.n2; ++i) {
        const bool s_is_c1 = rng.uniform_below(2) == 0;
        const int s = s_is_c1 ? c1 : c2;
        clusters.push_back(sample_cluster(chol.get(0, s), 0, s, 0.0, mean2(s_is_c1),
                                          cfg.distribution, rng, "c" + std::to_string(++id)));
    }
    for (int i = 0; i < cfg.nc; ++i) {
        const bool s_is_c1 = rng.uniform_below(2) == 0;
        const int s = s_is_c1 ? c1 : c2;
        clusters.push_back(sample_cluster(chol.get(s, s), s, s, mean1(s_is_c1), mean2(s_is_c1),
                                          cfg.distribution, rng, "c" + std::to_string(++id)));
    }
    return assemble(std::move(clusters));
}

ClusteredDataset gen_dataset(const ScenarioConfig& cfg, Rng& rng) {
    return cfg.ics.has_value() ? gen_ics_dataset(cfg, rng) : gen_ignorable_dataset(cfg, rng);
}

namespace {

void check_ics_args(int c1, int c2) {
    if (c1 < 1 || c2 < 1) {
        throw InputError("c1 and c2 must be positive integers");
    }
}

} // namespace

double theoretical_p(int c1, int c2) {
    check_ics_args(c1, c2);
    const double a = static_cast<double>(c1);
    const double b = static_cast<double>(c2);
    return 0.5 * phi((b - a) / std::numbers::sqrt2) + 0.25 * phi(std::numbers::sqrt2 * b) +
           0.25 * phi(-std::numbers::sqrt2 * a);
}

double theoretical_p0(int c1, int c2) {
    check_ics_args(c1, c2);
    const double a = static_cast<double>(c1);
    const double b = static_cast<double>(c2);
    const double w = a + b;
    return 2.0 * a * b / (w * w) * phi((b - a) / std::numbers::sqrt2) +
           (a / w) * (a / w) * phi(std::numbers::sqrt2 * b) +
           (b / w) * (b / w) * phi(-std::numbers::sqrt2 * a);
}

double theoretical_p0_variant(int c1, int c2) {
    check_ics_args(c1, c2);
    const double a = static_cast<double>(c1);
    const double b = static_cast<double>(c2);
    const double w = a + b;
    return 2.0 * a * b / (w * w) * phi((b - a) / std::numbers::sqrt2) +
           (a / w) * (a / w) * phi(b / std::numbers::sqrt2) +
           (b / w) * (b / w) * phi(-a / std::numbers::sqrt2);
}

TheoreticalEffects theoretical_effects(int c1, int c2) {
    TheoreticalEffects t;
    t.p = theoretical_p(c1, c2);
    t.p0 = theoretical_p0(c1, c2);
    t.mu_d = static_cast<double>(c1) - static_cast<double>(c2);
    return t;
}

McEffectOracle mc_effect_oracle(int c1, int c2, std::int64_t draws, Rng& rng) {
    check_ics_args(c1, c2);
    if (draws < 1) {
        throw InputError("oracle needs at least one draw");
    }
    const double a = static_cast<double>(c1);
    const double b = static_cast<double>(c2);
    const double w1_obs = b / (a + b); // weight of the mean +c1 component of group 1
    const double w2_obs = a / (a + b); // weight of the mean +c2 component of group 2
    double acc_p = 0.0;
    double acc_p0 = 0.0;
    for (std::int64_t i = 0; i < draws; ++i) {
        // cluster-weighted mixture: each size label has probability 1/2
        const double m1 = rng.uniform() < 0.5 ? -b : a;
        const double m2 = rng.uniform() < 0.5 ? b : -a;
        acc_p += kernel_h(m1 + rng.normal(), m2 + rng.normal());
        // observation-weighted mixture: weights proportional to size
        const double m1o = rng.uniform() < w1_obs ? a : -b;
        const double m2o = rng.uniform() < w2_obs ? b : -a;
        acc_p0 += kernel_h(m1o + rng.normal(), m2o + rng.normal());
    }
    McEffectOracle out;
    out.draws = draws;
    const double n = static_cast<double>(draws);
    out.p_mc = acc_p / n;
    out.p0_mc = acc_p0 / n;
    out.se_p = std::sqrt(out.p_mc * (1.0 - out.p_mc) / n);
    out.se_p0 = std::sqrt(out.p0_mc * (1.0 - out.p0_mc) / n);
    return out;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value);

template <>
double parse_number<double>(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw InputError("scenario key '" + key + "': bad number '" + value + "'");
    }
    if (pos != value.size()) {
        throw InputError("scenario key '" + key + "': bad number '" + value + "'");
    }
    return out;
}

template <>
int parse_number<int>(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    long out = 0;
    try {
        out = std::stol(value, &pos);
    } catch (const std::exception&) {
        throw InputError("scenario key '" + key + "': bad integer '" + value + "'");
    }
    if (pos != value.size()) {
        throw InputError("scenario key '" + key + "': bad integer '" + value + "'");
    }
    return static_cast<int>(out);
}

template <>
std::uint64_t parse_number<std::uint64_t>(const std::string& key, const std::string& value) {
    std::size_t pos = 0;
    unsigned long long out = 0;
    try {
        out = std::stoull(value, &pos);
    } catch (const std::exception&) {
        throw InputError("scenario key '" + key + "': bad integer '" + value + "'");
    }
    if (pos != value.size()) {
        throw InputError("scenario key '" + key + "': bad integer '" + value + "'");
    }
    return out;
}

} // namespace

ScenarioConfig load_scenario(std::istream& in) {
    std::map<std::string, std::string> kv;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw InputError("scenario line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw InputError("scenario line " + std::to_string(line_no) + ": empty key or value");
        }
        if (!kv.emplace(key, value).second) {
            throw InputError("scenario key '" + key + "' given twice");
        }
    }
    const auto take = [&](const std::string& key) {
        const auto it = kv.find(key);
        if (it == kv.end()) {
            throw InputError("scenario is missing key '" + key + "'");
        }
        const std::string v = it->second;
        kv.erase(it);
        return v;
    };
    const auto take_optional = [&](const std::string& key) -> std::optional<std::string> {
        const auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        const std::string v = it->second;
        kv.erase(it);
        return v;
    };

    ScenarioConfig cfg;
    cfg.n1 = parse_number<int>("n1", take("n1"));
    cfg.n2 = parse_number<int>("n2", take("n2"));
    cfg.nc = parse_number<int>("nc", take("nc"));
    const std::string law = take("icg_law");
    if (law == "binom2") {
        cfg.icg_law = IcgLaw::binom2;
    } else if (law == "binom9") {
        cfg.icg_law = IcgLaw::binom9;
    } else if (law == "fixed") {
        cfg.icg_law = IcgLaw::fixed_from_ics;
    } else {
        throw InputError("icg_law must be binom2, binom9 or fixed; got '" + law + "'");
    }
    const std::string dist = take("distribution");
    if (dist == "gaussian") {
        cfg.distribution = Distribution::gaussian;
    } else if (dist == "cauchy") {
        cfg.distribution = Distribution::cauchy;
    } else {
        throw InputError("distribution must be gaussian or cauchy; got '" + dist + "'");
    }
    cfg.covariance.sigma1_sq = parse_number<double>("sigma1_sq", take("sigma1_sq"));
    cfg.covariance.sigma2_sq = parse_number<double>("sigma2_sq", take("sigma2_sq"));
    cfg.covariance.rho1 = parse_number<double>("rho1", take("rho1"));
    cfg.covariance.rho2 = parse_number<double>("rho2", take("rho2"));
    cfg.covariance.rho12 = parse_number<double>("rho12", take("rho12"));
    const auto c1 = take_optional("c1");
    const auto c2 = take_optional("c2");
    if (c1.has_value() != c2.has_value()) {
        throw InputError("c1 and c2 must be given together");
    }
    if (c1.has_value()) {
        cfg.ics = std::make_pair(parse_number<int>("c1", *c1), parse_number<int>("c2", *c2));
        check_ics_args(cfg.ics->first, cfg.ics->second);
    }
    cfg.alpha_level = parse_number<double>("alpha_level", take("alpha_level"));
    cfg.seed = parse_number<std::uint64_t>("seed", take("seed"));
    if (!kv.empty()) {
        throw InputError("unknown scenario key '" + kv.begin()->first + "'");
    }

    if (cfg.n1 < 0 || cfg.n2 < 0 || cfg.nc < 0 || cfg.n1 + cfg.n2 + cfg.nc < 2) {
        throw InputError("cluster counts must be nonnegative and total at least 2");
    }
    if (!(cfg.alpha_level > 0.0 && cfg.alpha_level < 1.0)) {
        throw InputError("alpha_level must lie in (0,1)");
    }
    if (cfg.ics.has_value() != (cfg.icg_law == IcgLaw::fixed_from_ics)) {
        throw InputError("c1/c2 must be present exactly when icg_law = fixed");
    }
    return cfg;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return load_scenario(in);
}

void save_scenario(const ScenarioConfig& cfg, std::ostream& out) {
    std::ostringstream os;
    os.precision(17);
    os << "n1 = " << cfg.n1 << "\n";
    os << "n2 = " << cfg.n2 << "\n";
    os << "nc = " << cfg.nc << "\n";
    os << "icg_law = "
       << (cfg.icg_law == IcgLaw::binom2 ? "binom2"
                                         : cfg.icg_law == IcgLaw::binom9 ? "binom9" : "fixed")
       << "\n";
    os << "distribution = " << (cfg.distribution == Distribution::gaussian ? "gaussian" : "cauchy")
       << "\n";
    os << "sigma1_sq = " << cfg.covariance.sigma1_sq << "\n";
    os << "sigma2_sq = " << cfg.covariance.sigma2_sq << "\n";
    os << "rho1 = " << cfg.covariance.rho1 << "\n";
    os << "rho2 = " << cfg.covariance.rho2 << "\n";
    os << "rho12 = " << cfg.covariance.rho12 << "\n";
    if (cfg.ics.has_value()) {
        os << "c1 = " << cfg.ics->first << "\n";
        os << "c2 = " << cfg.ics->second << "\n";
    }
    os << "alpha_level = " << cfg.alpha_level << "\n";
    os << "seed = " << cfg.seed << "\n";
    out << os.str();
}

} // namespace cwmw
