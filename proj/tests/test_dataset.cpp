#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "cwmw/dataset.hpp"
#include "cwmw/errors.hpp"

#include "test_support.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

using namespace cwmw;
using cwmw::testing::make_dataset;
using cwmw::testing::random_dataset;

TEST_CASE("one group absent is rejected") {
    CHECK_THROWS_AS(make_dataset({{"c1", 1, 5.0}}), InputError);
    CHECK_THROWS_AS(make_dataset({{"a", 2, 1.0}, {"b", 2, 2.0}}), InputError);
}

TEST_CASE("singleton clusters") {
    const auto ds = make_dataset({{"a", 1, 1.0}, {"b", 2, 2.0}});
    CHECK(ds.n == 2);
    CHECK(ds.n1 == 1);
    CHECK(ds.n2 == 1);
    CHECK(ds.nc == 0);
    CHECK(ds.clusters[0].alpha == 0.0);
    CHECK(ds.clusters[1].alpha == 1.0);
    CHECK(ds.total1 == 1);
    CHECK(ds.total2 == 1);
}

TEST_CASE("mixed complete and incomplete clusters") {
    const auto ds = make_dataset({{"a", 1, 1.0}, {"a", 2, 2.0}, {"b", 1, 3.0}});
    CHECK(ds.n == 2);
    CHECK(ds.n1 == 1);
    CHECK(ds.n2 == 0);
    CHECK(ds.nc == 1);
    const auto& a = ds.clusters[0];
    CHECK(a.id == "a");
    CHECK(a.alpha == 0.5);
    CHECK(ds.clusters[1].alpha == 0.0);
    CHECK(ds.r1.size() == 2);
    CHECK(ds.r2.size() == 1);
    CHECK(ds.in_r2(0));
    CHECK_FALSE(ds.in_r2(1));

    const auto s = summary(ds);
    CHECK(s.n == 2);
    CHECK(s.total1 == 2);
    CHECK(s.total2 == 1);
    CHECK(s.cluster_size_counts.at(2) == 1);
    CHECK(s.cluster_size_counts.at(1) == 1);
}

TEST_CASE("non-finite values are rejected") {
    CHECK_THROWS_AS(
        make_dataset({{"a", 1, std::numeric_limits<double>::quiet_NaN()}, {"b", 2, 1.0}}),
        InputError);
    CHECK_THROWS_AS(
        make_dataset({{"a", 1, std::numeric_limits<double>::infinity()}, {"b", 2, 1.0}}),
        InputError);
}

TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(ingest({}), InputError);
}

TEST_CASE("duplicate (cluster,value) rows are legitimate ties") {
    const auto ds = make_dataset({{"a", 1, 2.0}, {"a", 1, 2.0}, {"b", 2, 2.0}});
    CHECK(ds.clusters[0].m1() == 2);
    CHECK(ds.clusters[0].values_g1[0] == ds.clusters[0].values_g1[1]);
}

TEST_CASE("assembling prebuilt clusters rejects duplicate ids") {
    std::vector<Cluster> clusters;
    clusters.push_back(make_cluster("a", {1.0}, {Group::g1}));
    clusters.push_back(make_cluster("a", {2.0}, {Group::g2}));
    CHECK_THROWS_AS(assemble(std::move(clusters)), InputError);
}

TEST_CASE("ingest is insensitive to row permutation up to cluster order") {
    Rng rng(424242);
    for (int trial = 0; trial < 50; ++trial) {
        const auto ds = random_dataset(rng);
        std::vector<Observation> rows;
        for (const Cluster& c : ds.clusters) {
            for (std::size_t k = 0; k < c.values.size(); ++k) {
                rows.push_back({c.id, c.groups[k], c.values[k]});
            }
        }
        // deterministic shuffle
        for (std::size_t i = rows.size(); i > 1; --i) {
            std::swap(rows[i - 1], rows[rng.uniform_below(i)]);
        }
        const auto ds2 = ingest(rows);
        CHECK(ds2.n == ds.n);
        CHECK(ds2.n1 == ds.n1);
        CHECK(ds2.n2 == ds.n2);
        CHECK(ds2.nc == ds.nc);
        CHECK(ds2.total1 == ds.total1);
        CHECK(ds2.total2 == ds.total2);
        for (const Cluster& c : ds.clusters) {
            const auto it = std::find_if(ds2.clusters.begin(), ds2.clusters.end(),
                                         [&](const Cluster& o) { return o.id == c.id; });
            REQUIRE(it != ds2.clusters.end());
            CHECK(it->m1() == c.m1());
            CHECK(it->m2() == c.m2());
            CHECK(it->alpha == c.alpha);
            auto g1 = std::vector<double>(c.values_g1);
            auto g1b = std::vector<double>(it->values_g1);
            std::sort(g1.begin(), g1.end());
            std::sort(g1b.begin(), g1b.end());
            CHECK(g1 == g1b);
        }
    }
}

TEST_CASE("csv round trip") {
    Rng rng(99);
    const auto ds = random_dataset(rng);
    std::stringstream buf;
    write_csv(ds, buf);
    const auto back = read_csv(buf);
    REQUIRE(back.n == ds.n);
    for (int i = 0; i < ds.n; ++i) {
        const auto& a = ds.clusters[static_cast<std::size_t>(i)];
        const auto& b = back.clusters[static_cast<std::size_t>(i)];
        CHECK(a.id == b.id);
        CHECK(a.values == b.values);
        CHECK(a.groups == b.groups);
    }
}

TEST_CASE("csv parsing errors") {
    const auto parse = [](const std::string& text) {
        std::istringstream in(text);
        return read_csv(in);
    };
    CHECK_THROWS_AS(parse(""), InputError);
    CHECK_THROWS_AS(parse("cluster,group\n"), InputError);
    CHECK_THROWS_AS(parse("cluster,group,value\na,3,1.0\nb,2,2.0\n"), InputError);
    CHECK_THROWS_AS(parse("cluster,group,value\na,1,abc\nb,2,2.0\n"), InputError);
    CHECK_THROWS_AS(parse("cluster,group,value\na,1\n"), InputError);
    CHECK_THROWS_AS(parse("cluster,group,value\na,1,1.0,extra\n"), InputError);

    // comments and blank lines are fine
    const auto ds = parse("# comment\ncluster,group,value\n\na,1,1.5\n# mid comment\nb,2,2.5\n");
    CHECK(ds.n == 2);
    CHECK(ds.clusters[0].values_g1[0] == 1.5);
}
