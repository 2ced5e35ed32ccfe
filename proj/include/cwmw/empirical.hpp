#pragma once

#include "cwmw/dataset.hpp"
#include "cwmw/kernels.hpp"

namespace cwmw {

enum class Weighting : std::uint8_t { unweighted, weighted };

// Tie-aware comparison kernel: 1 if x < y, 1/2 if x == y (exact
// floating-point equality), 0 if x > y.
inline double kernel_h(double x, double y) {
    return 0.5 * (static_cast<double>(x < y) + static_cast<double>(x <= y));
}

// Normalized ECDF of cluster c's group-g members, evaluated at x.
// Throws InputError if the cluster has no member of that group.
double within_cluster_ecdf(const Cluster& c, Group g, double x);

// Normalized ECDF over all members of the cluster. Equals the alpha-mix
// (1-alpha) * F1 + alpha * F2 of the per-group ECDFs.
double whole_cluster_ecdf(const Cluster& c, double x);

// Group-level ECDF. Unweighted: each cluster holding the group contributes
// equally (mean of per-cluster ECDFs). Weighted: each observation
// contributes equally (pooled normalized ECDF).
double group_ecdf(const ClusteredDataset& ds, Group g, Weighting w, double x);

// Evaluation handle over one of the supported distribution constructions.
// Holds references only; the underlying data must outlive the handle.
class EcdfHandle {
public:
    enum class Kind : std::uint8_t {
        within_cluster_g1,
        within_cluster_g2,
        whole_cluster,
        group_unweighted,
        group_weighted,
    };

    static EcdfHandle within_cluster(const Cluster& c, Group g);
    static EcdfHandle whole_cluster(const Cluster& c);
    static EcdfHandle group(const ClusteredDataset& ds, Group g, Weighting w);

    double operator()(double x) const;
    Kind kind() const { return kind_; }

private:
    Kind kind_;
    const Cluster* cluster_ = nullptr;
    const ClusteredDataset* dataset_ = nullptr;
    Group group_ = Group::g1;
};

} // namespace cwmw
