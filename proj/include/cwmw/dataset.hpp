#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

namespace cwmw {

enum class Group : std::uint8_t { g1 = 1, g2 = 2 };

// One measured value from one cluster member.
struct Observation {
    std::string cluster_id;
    Group group = Group::g1;
    double value = 0.0;
};

// All observations sharing a cluster id. Members are kept in ingestion
// order in values/groups; per-group views are cached for ECDF evaluation.
struct Cluster {
    std::string id;
    std::vector<double> values;  // ingestion order
    std::vector<Group> groups;   // parallel to values
    std::vector<double> values_g1;
    std::vector<double> values_g2;
    double alpha = 0.0; // m2 / m

    int m() const { return static_cast<int>(values.size()); }
    int m1() const { return static_cast<int>(values_g1.size()); }
    int m2() const { return static_cast<int>(values_g2.size()); }
    std::span<const double> group_values(Group g) const {
        return g == Group::g1 ? std::span<const double>(values_g1)
                              : std::span<const double>(values_g2);
    }
};

// Validated two-group clustered data with derived counts and index sets.
// Immutable after construction; safe for unrestricted concurrent reads.
struct ClusteredDataset {
    std::vector<Cluster> clusters;
    int n = 0;   // total clusters
    int n1 = 0;  // clusters with only group-1 members
    int n2 = 0;  // clusters with only group-2 members
    int nc = 0;  // clusters with members from both groups
    std::int64_t total1 = 0; // total group-1 observations (N1)
    std::int64_t total2 = 0; // total group-2 observations (N2)
    std::vector<int> r1; // indices of clusters with group-1 members
    std::vector<int> r2; // indices of clusters with group-2 members

    bool in_r1(int i) const { return clusters[static_cast<std::size_t>(i)].m1() > 0; }
    bool in_r2(int i) const { return clusters[static_cast<std::size_t>(i)].m2() > 0; }
};

// Group observations by cluster id (order of first appearance) and compute
// all derived quantities. Throws InputError on empty input, non-finite
// values, or a dataset where either group has no observation at all.
ClusteredDataset ingest(std::span<const Observation> rows);

// Build a cluster from parallel value/group vectors (used by the
// simulation generators, which bypass row-level ingestion).
Cluster make_cluster(std::string id, std::vector<double> values, std::vector<Group> groups);

// Assemble a dataset from ready-made clusters; validates the same
// invariants as ingest.
ClusteredDataset assemble(std::vector<Cluster> clusters);

struct DatasetSummary {
    int n = 0, n1 = 0, n2 = 0, nc = 0;
    std::int64_t total1 = 0, total2 = 0;
    std::map<int, int> cluster_size_counts; // size -> number of clusters
};

DatasetSummary summary(const ClusteredDataset& ds);

// CSV format: header "cluster,group,value"; group is 1 or 2; lines
// starting with '#' are skipped.
ClusteredDataset read_csv(std::istream& in);
ClusteredDataset read_csv_file(const std::string& path);
void write_csv(const ClusteredDataset& ds, std::ostream& out);

} // namespace cwmw
