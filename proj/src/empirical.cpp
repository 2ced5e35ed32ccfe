#include "cwmw/empirical.hpp"

#include "cwmw/errors.hpp"

namespace cwmw {

double within_cluster_ecdf(const Cluster& c, Group g, double x) {
    const auto v = c.group_values(g);
    if (v.empty()) {
        throw InputError("cluster '" + c.id + "' has no group-" +
                         std::to_string(static_cast<int>(g)) + " members");
    }
    return kernels::h_sum(v, x) / static_cast<double>(v.size());
}

double whole_cluster_ecdf(const Cluster& c, double x) {
    return kernels::h_sum(c.values, x) / static_cast<double>(c.m());
}

double group_ecdf(const ClusteredDataset& ds, Group g, Weighting w, double x) {
    const auto& members = (g == Group::g1) ? ds.r1 : ds.r2;
    const std::int64_t total = (g == Group::g1) ? ds.total1 : ds.total2;
    if (members.empty() || total == 0) {
        throw InputError("group has no observations");
    }
    double acc = 0.0;
    if (w == Weighting::unweighted) {
        for (const int i : members) {
            const auto v = ds.clusters[static_cast<std::size_t>(i)].group_values(g);
            acc += kernels::h_sum(v, x) / static_cast<double>(v.size());
        }
        return acc / static_cast<double>(members.size());
    }
    for (const int i : members) {
        acc += kernels::h_sum(ds.clusters[static_cast<std::size_t>(i)].group_values(g), x);
    }
    return acc / static_cast<double>(total);
}

EcdfHandle EcdfHandle::within_cluster(const Cluster& c, Group g) {
    EcdfHandle h;
    h.kind_ = (g == Group::g1) ? Kind::within_cluster_g1 : Kind::within_cluster_g2;
    h.cluster_ = &c;
    h.group_ = g;
    return h;
}

EcdfHandle EcdfHandle::whole_cluster(const Cluster& c) {
    EcdfHandle h;
    h.kind_ = Kind::whole_cluster;
    h.cluster_ = &c;
    return h;
}

EcdfHandle EcdfHandle::group(const ClusteredDataset& ds, Group g, Weighting w) {
    EcdfHandle h;
    h.kind_ = (w == Weighting::unweighted) ? Kind::group_unweighted : Kind::group_weighted;
    h.dataset_ = &ds;
    h.group_ = g;
    return h;
}

double EcdfHandle::operator()(double x) const {
    switch (kind_) {
        case Kind::within_cluster_g1:
        case Kind::within_cluster_g2:
            return within_cluster_ecdf(*cluster_, group_, x);
        case Kind::whole_cluster:
            return whole_cluster_ecdf(*cluster_, x);
        case Kind::group_unweighted:
            return group_ecdf(*dataset_, group_, Weighting::unweighted, x);
        case Kind::group_weighted:
            return group_ecdf(*dataset_, group_, Weighting::weighted, x);
    }
    return 0.0;
}

} // namespace cwmw
