#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cwmw/empirical.hpp"
#include "cwmw/errors.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <cmath>

using namespace cwmw;
using cwmw::testing::make_dataset;
using cwmw::testing::random_dataset;

TEST_CASE("comparison kernel") {
    CHECK(kernel_h(1.0, 2.0) == 1.0);
    CHECK(kernel_h(2.0, 1.0) == 0.0);
    CHECK(kernel_h(1.0, 1.0) == 0.5);
}

TEST_CASE("kernel antisymmetry: h(x,y) + h(y,x) = 1") {
    Rng rng(5);
    for (int i = 0; i < 1000; ++i) {
        const double x = rng.uniform() < 0.3 ? static_cast<double>(rng.uniform_below(3)) : rng.normal();
        const double y = rng.uniform() < 0.3 ? static_cast<double>(rng.uniform_below(3)) : rng.normal();
        CHECK(kernel_h(x, y) + kernel_h(y, x) == 1.0);
    }
}

TEST_CASE("within-cluster ecdf") {
    const auto ds = make_dataset({{"a", 2, 2.0}, {"b", 2, 1.0}, {"b", 2, 3.0}, {"z", 1, 0.0}});
    CHECK(within_cluster_ecdf(ds.clusters[0], Group::g2, 1.0) == 0.0);
    CHECK(within_cluster_ecdf(ds.clusters[1], Group::g2, 3.0) == 0.75);
    const auto tied = make_dataset({{"a", 2, 1.0}, {"z", 1, 0.0}});
    CHECK(within_cluster_ecdf(tied.clusters[0], Group::g2, 1.0) == 0.5);
    CHECK_THROWS_AS(within_cluster_ecdf(ds.clusters[0], Group::g1, 1.0), InputError);
}

TEST_CASE("whole-cluster ecdf") {
    const auto ds = make_dataset({{"a", 1, 1.0}, {"a", 2, 3.0}, {"b", 1, 5.0}, {"q", 2, 0.0}});
    CHECK(whole_cluster_ecdf(ds.clusters[0], 2.0) == 0.5);
    CHECK(whole_cluster_ecdf(ds.clusters[1], 5.0) == 0.5);
    CHECK(whole_cluster_ecdf(ds.clusters[0], -100.0) == 0.0);
    CHECK(whole_cluster_ecdf(ds.clusters[0], 100.0) == 1.0);
}

TEST_CASE("group-level ecdf, both weightings") {
    const auto singletons = make_dataset({{"a", 1, 1.0}, {"b", 2, 2.0}});
    CHECK(group_ecdf(singletons, Group::g2, Weighting::unweighted, 1.5) == 0.0);

    const auto ds = make_dataset({{"a", 2, 1.0}, {"b", 2, 3.0}, {"b", 2, 3.0}, {"z", 1, 0.0}});
    CHECK(group_ecdf(ds, Group::g2, Weighting::unweighted, 3.0) == 0.75);
    CHECK(group_ecdf(ds, Group::g2, Weighting::weighted, 3.0) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("ecdf handles agree with the free functions") {
    Rng rng(17);
    const auto ds = random_dataset(rng);
    const auto g2u = EcdfHandle::group(ds, Group::g2, Weighting::unweighted);
    const auto g1w = EcdfHandle::group(ds, Group::g1, Weighting::weighted);
    for (int i = 0; i < 20; ++i) {
        const double x = rng.normal();
        CHECK(g2u(x) == group_ecdf(ds, Group::g2, Weighting::unweighted, x));
        CHECK(g1w(x) == group_ecdf(ds, Group::g1, Weighting::weighted, x));
    }
    const Cluster& c = ds.clusters[0];
    const auto whole = EcdfHandle::whole_cluster(c);
    CHECK(whole(0.3) == whole_cluster_ecdf(c, 0.3));
}

TEST_CASE("ecdf bounds and monotonicity") {
    Rng rng(31337);
    for (int trial = 0; trial < 100; ++trial) {
        const auto ds = random_dataset(rng);
        const Cluster& c = ds.clusters[static_cast<std::size_t>(rng.uniform_below(
            static_cast<std::uint64_t>(ds.n)))];
        const double lo = *std::min_element(c.values.begin(), c.values.end());
        const double hi = *std::max_element(c.values.begin(), c.values.end());
        CHECK(whole_cluster_ecdf(c, lo - 1.0) == 0.0);
        CHECK(whole_cluster_ecdf(c, hi + 1.0) == 1.0);
        double prev = -1.0;
        for (double x = lo - 0.5; x <= hi + 0.5; x += 0.25) {
            const double f = whole_cluster_ecdf(c, x);
            CHECK(f >= prev);
            CHECK(f >= 0.0);
            CHECK(f <= 1.0);
            prev = f;
        }
    }
}

TEST_CASE("whole-cluster ecdf is the alpha mixture of the per-group ecdfs") {
    Rng rng(2023);
    int mixed_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto ds = random_dataset(rng);
        for (const Cluster& c : ds.clusters) {
            if (c.m1() == 0 || c.m2() == 0) continue;
            ++mixed_seen;
            const double x = rng.normal();
            const double mix = (1.0 - c.alpha) * within_cluster_ecdf(c, Group::g1, x) +
                               c.alpha * within_cluster_ecdf(c, Group::g2, x);
            CHECK(whole_cluster_ecdf(c, x) == doctest::Approx(mix).epsilon(1e-12));
        }
    }
    CHECK(mixed_seen > 100);
}

TEST_CASE("strictly increasing transforms commute with evaluation") {
    Rng rng(808);
    const auto grow = [](double v) { return std::exp(v) + 3.0 * v; };
    for (int trial = 0; trial < 50; ++trial) {
        const auto ds = random_dataset(rng);
        const auto tds = cwmw::testing::transform_values(ds, grow);
        for (int i = 0; i < ds.n; ++i) {
            const Cluster& c = ds.clusters[static_cast<std::size_t>(i)];
            const Cluster& tc = tds.clusters[static_cast<std::size_t>(i)];
            const double x = c.values[0];
            CHECK(whole_cluster_ecdf(c, x) == whole_cluster_ecdf(tc, grow(x)));
        }
        const double probe = ds.clusters.back().values.back();
        CHECK(group_ecdf(ds, Group::g2, Weighting::weighted, probe) ==
              group_ecdf(tds, Group::g2, Weighting::weighted, grow(probe)));
    }
}
