#include "cwmw/dataset.hpp"

#include "cwmw/errors.hpp"

#include <cmath>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_map>

namespace cwmw {

Cluster make_cluster(std::string id, std::vector<double> values, std::vector<Group> groups) {
    if (values.size() != groups.size() || values.empty()) {
        throw InputError("cluster '" + id + "': values/groups size mismatch or empty");
    }
    Cluster c;
    c.id = std::move(id);
    c.values = std::move(values);
    c.groups = std::move(groups);
    for (std::size_t k = 0; k < c.values.size(); ++k) {
        if (!std::isfinite(c.values[k])) {
            throw InputError("cluster '" + c.id + "': non-finite value");
        }
        (c.groups[k] == Group::g1 ? c.values_g1 : c.values_g2).push_back(c.values[k]);
    }
    c.alpha = static_cast<double>(c.m2()) / static_cast<double>(c.m());
    return c;
}

ClusteredDataset assemble(std::vector<Cluster> clusters) {
    if (clusters.empty()) {
        throw InputError("dataset is empty");
    }
    ClusteredDataset ds;
    ds.clusters = std::move(clusters);
    ds.n = static_cast<int>(ds.clusters.size());
    std::unordered_map<std::string, int> seen;
    for (int i = 0; i < ds.n; ++i) {
        const Cluster& c = ds.clusters[static_cast<std::size_t>(i)];
        if (!seen.emplace(c.id, i).second) {
            throw InputError("duplicate cluster id '" + c.id + "'");
        }
        ds.total1 += c.m1();
        ds.total2 += c.m2();
        if (c.m1() > 0) ds.r1.push_back(i);
        if (c.m2() > 0) ds.r2.push_back(i);
        if (c.m2() == 0) {
            ++ds.n1;
        } else if (c.m1() == 0) {
            ++ds.n2;
        } else {
            ++ds.nc;
        }
    }
    if (ds.total1 == 0 || ds.total2 == 0) {
        throw InputError("dataset must contain observations from both groups");
    }
    return ds;
}

ClusteredDataset ingest(std::span<const Observation> rows) {
    if (rows.empty()) {
        throw InputError("no observations");
    }
    std::vector<Cluster> clusters;
    std::unordered_map<std::string, std::size_t> index;
    for (const Observation& row : rows) {
        if (!std::isfinite(row.value)) {
            throw InputError("non-finite value in cluster '" + row.cluster_id + "'");
        }
        auto [it, inserted] = index.emplace(row.cluster_id, clusters.size());
        if (inserted) {
            Cluster c;
            c.id = row.cluster_id;
            clusters.push_back(std::move(c));
        }
        Cluster& c = clusters[it->second];
        c.values.push_back(row.value);
        c.groups.push_back(row.group);
    }
    for (Cluster& c : clusters) {
        c = make_cluster(std::move(c.id), std::move(c.values), std::move(c.groups));
    }
    return assemble(std::move(clusters));
}

DatasetSummary summary(const ClusteredDataset& ds) {
    DatasetSummary s;
    s.n = ds.n;
    s.n1 = ds.n1;
    s.n2 = ds.n2;
    s.nc = ds.nc;
    s.total1 = ds.total1;
    s.total2 = ds.total2;
    for (const Cluster& c : ds.clusters) {
        ++s.cluster_size_counts[c.m()];
    }
    return s;
}

namespace {

double parse_value(const std::string& field, std::size_t line_no) {
    double out = 0.0;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    if (ec != std::errc() || ptr != end) {
        throw InputError("line " + std::to_string(line_no) + ": bad value '" + field + "'");
    }
    return out;
}

} // namespace

ClusteredDataset read_csv(std::istream& in) {
    std::string line;
    std::vector<Observation> rows;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "cluster,group,value") {
                throw InputError("line " + std::to_string(line_no) +
                                 ": expected header 'cluster,group,value'");
            }
            header_seen = true;
            continue;
        }
        const auto p1 = line.find(',');
        const auto p2 = line.find(',', p1 == std::string::npos ? p1 : p1 + 1);
        if (p1 == std::string::npos || p2 == std::string::npos ||
            line.find(',', p2 + 1) != std::string::npos) {
            throw InputError("line " + std::to_string(line_no) + ": expected 3 fields");
        }
        Observation obs;
        obs.cluster_id = line.substr(0, p1);
        const std::string group_tok = line.substr(p1 + 1, p2 - p1 - 1);
        if (group_tok == "1") {
            obs.group = Group::g1;
        } else if (group_tok == "2") {
            obs.group = Group::g2;
        } else {
            throw InputError("line " + std::to_string(line_no) + ": group must be 1 or 2, got '" +
                             group_tok + "'");
        }
        if (obs.cluster_id.empty()) {
            throw InputError("line " + std::to_string(line_no) + ": empty cluster id");
        }
        obs.value = parse_value(line.substr(p2 + 1), line_no);
        rows.push_back(std::move(obs));
    }
    if (!header_seen) {
        throw InputError("empty CSV input");
    }
    return ingest(rows);
}

ClusteredDataset read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open '" + path + "'");
    }
    return read_csv(in);
}

void write_csv(const ClusteredDataset& ds, std::ostream& out) {
    out << "cluster,group,value\n";
    std::ostringstream num;
    num.precision(17);
    for (const Cluster& c : ds.clusters) {
        for (std::size_t k = 0; k < c.values.size(); ++k) {
            num.str("");
            num << c.values[k];
            out << c.id << ',' << (c.groups[k] == Group::g1 ? '1' : '2') << ',' << num.str()
                << '\n';
        }
    }
}

} // namespace cwmw
