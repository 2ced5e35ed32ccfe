#include "cwmw/reference_dist.hpp"

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <cmath>

namespace cwmw {

namespace {
const boost::math::normal_distribution<double> kStdNormal{};
}

double normal_cdf(double x) { return boost::math::cdf(kStdNormal, x); }

double normal_quantile(double p) { return boost::math::quantile(kStdNormal, p); }

double two_sided_p_normal(double z) {
    return 2.0 * boost::math::cdf(boost::math::complement(kStdNormal, std::fabs(z)));
}

double t_quantile(double p, double df) {
    const boost::math::students_t_distribution<double> t(df);
    return boost::math::quantile(t, p);
}

double two_sided_p_t(double stat, double df) {
    const boost::math::students_t_distribution<double> t(df);
    return 2.0 * boost::math::cdf(boost::math::complement(t, std::fabs(stat)));
}

} // namespace cwmw
