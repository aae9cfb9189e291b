#include "divsel/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

namespace divsel {

TradeoffCurve lower_envelope(const std::vector<CurvePoint>& points, CurveMetadata meta) {
    if (points.empty()) throw std::invalid_argument("lower_envelope: empty input");
    std::vector<CurvePoint> sorted = points;
    std::sort(sorted.begin(), sorted.end(), [](const CurvePoint& a, const CurvePoint& b) {
        return a.min_distance > b.min_distance ||
               (a.min_distance == b.min_distance && a.loss < b.loss);
    });
    // Sweep from the largest distance down; within a group of equal
    // distances only the smallest loss can survive.
    std::vector<CurvePoint> kept;
    double best_beyond = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < sorted.size();) {
        const double d = sorted[i].min_distance;
        const double group_min = sorted[i].loss;
        std::size_t j = i;
        while (j < sorted.size() && sorted[j].min_distance == d) ++j;
        if (group_min <= best_beyond) kept.push_back({d, group_min});
        best_beyond = std::min(best_beyond, group_min);
        i = j;
    }
    std::reverse(kept.begin(), kept.end());
    return {std::move(kept), std::move(meta)};
}

TradeoffCurve lower_envelope(const std::vector<TradeoffRecord>& records, CurveMetadata meta) {
    std::vector<CurvePoint> pts;
    pts.reserve(records.size());
    for (const auto& r : records) pts.push_back({r.min_distance, r.loss});
    return lower_envelope(pts, std::move(meta));
}

std::optional<double> interpolate_at(const TradeoffCurve& curve, double d) {
    auto it = std::lower_bound(curve.points.begin(), curve.points.end(), d,
                               [](const CurvePoint& p, double v) { return p.min_distance < v; });
    if (it == curve.points.end()) return std::nullopt;
    return it->loss;
}

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile of empty sample");
    const double h = (static_cast<double>(sorted.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

SummaryStats summarize(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("summarize: empty sample");
    std::sort(values.begin(), values.end());
    SummaryStats s;
    s.min = values.front();
    s.max = values.back();
    s.q1 = quantile(values, 0.25);
    s.median = quantile(values, 0.5);
    s.q3 = quantile(values, 0.75);
    s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
    return s;
}

DistanceDistribution pairwise_distance_stats(const Portfolio& p, const Batch& b,
                                             double enforced_d_min, Metric metric) {
    DistanceDistribution out;
    out.enforced_d_min = enforced_d_min;
    const auto& idx = b.indices;
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            out.distances.push_back(metric(p.point(idx[i]), p.point(idx[j])));
    std::sort(out.distances.begin(), out.distances.end());
    if (!out.distances.empty()) out.stats = summarize(out.distances);
    return out;
}

std::vector<AggregateRow> aggregate(const std::vector<TradeoffCurve>& curves,
                                    const std::vector<double>& d_grid) {
    if (curves.empty()) throw std::invalid_argument("aggregate: no curves");
    using Key = std::tuple<std::string, std::string, std::size_t, std::size_t, std::size_t>;
    std::map<Key, std::vector<const TradeoffCurve*>> groups;
    for (const auto& c : curves) {
        const auto& m = c.metadata;
        groups[{m.function_id, m.sampler_id, m.dimension, m.budget, m.k}].push_back(&c);
    }
    std::vector<AggregateRow> rows;
    for (const auto& [key, members] : groups) {
        for (double d : d_grid) {
            AggregateRow row;
            std::tie(row.function_id, row.sampler_id, row.dimension, row.budget, row.k) = key;
            row.d = d;
            row.run_count = members.size();
            std::vector<double> reached;
            for (const auto* c : members) {
                if (auto v = interpolate_at(*c, d)) reached.push_back(*v);
                else ++row.unreached;
            }
            if (!reached.empty()) row.stats = summarize(std::move(reached));
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    return out;
}

}  // namespace

void write_curves_csv(const std::vector<TradeoffCurve>& curves, const std::string& path) {
    auto out = open_out(path);
    out << "function,dimension,sampler,budget,k,seed,d,loss\n";
    for (const auto& c : curves) {
        const auto& m = c.metadata;
        for (const auto& pt : c.points)
            out << m.function_id << ',' << m.dimension << ',' << m.sampler_id << ',' << m.budget << ','
                << m.k << ',' << m.seed << ',' << format_double(pt.min_distance) << ','
                << format_double(pt.loss) << '\n';
    }
}

void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path) {
    auto out = open_out(path);
    out << "function,dimension,sampler,budget,k,d,run_count,unreached,min,q1,median,q3,max\n";
    for (const auto& r : rows) {
        out << r.function_id << ',' << r.dimension << ',' << r.sampler_id << ',' << r.budget << ','
            << r.k << ',' << format_double(r.d) << ',' << r.run_count << ',' << r.unreached;
        if (r.stats) {
            const auto& s = *r.stats;
            out << ',' << format_double(s.min) << ',' << format_double(s.q1) << ','
                << format_double(s.median) << ',' << format_double(s.q3) << ','
                << format_double(s.max);
        } else {
            out << ",,,,,";
        }
        out << '\n';
    }
}

void write_distance_csv(const std::vector<DistanceRow>& rows, const std::string& path) {
    auto out = open_out(path);
    out << "function,dimension,sampler,budget,k,seed,d_min,pairs,min,q1,median,q3,max,mean\n";
    for (const auto& r : rows) {
        const auto& m = r.metadata;
        const auto& s = r.distribution.stats;
        out << m.function_id << ',' << m.dimension << ',' << m.sampler_id << ',' << m.budget << ','
            << m.k << ',' << m.seed << ',' << format_double(r.distribution.enforced_d_min) << ','
            << r.distribution.distances.size() << ',' << format_double(s.min) << ','
            << format_double(s.q1) << ',' << format_double(s.median) << ',' << format_double(s.q3)
            << ',' << format_double(s.max) << ',' << format_double(s.mean) << '\n';
    }
}

}  // namespace divsel
