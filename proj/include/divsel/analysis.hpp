#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divsel/portfolio.hpp"
#include "divsel/selection.hpp"

namespace divsel {

struct CurveMetadata {
    std::string function_id;
    std::string sampler_id;
    std::size_t dimension = 0;
    std::size_t budget = 0;
    std::size_t k = 0;
    std::uint64_t seed = 0;

    bool operator==(const CurveMetadata&) const = default;
};

struct CurvePoint {
    double min_distance;
    double loss;

    bool operator==(const CurvePoint&) const = default;
};

/// (realized minimum distance, loss) staircase.
struct TradeoffCurve {
    std::vector<CurvePoint> points;
    CurveMetadata metadata;

    bool operator==(const TradeoffCurve&) const = default;
};

/// Keeps (d, l) iff no other point has d' >= d and l' < l. Output is sorted by
/// d, with d strictly increasing and loss non-decreasing.
TradeoffCurve lower_envelope(const std::vector<CurvePoint>& points, CurveMetadata meta = {});
TradeoffCurve lower_envelope(const std::vector<TradeoffRecord>& records, CurveMetadata meta = {});

/// Loss of the first curve point whose realized distance reaches d, i.e. a
/// batch that actually exists at >= d. nullopt if the curve never gets there.
std::optional<double> interpolate_at(const TradeoffCurve& curve, double d);

struct SummaryStats {
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

/// Quantile with linear interpolation between order statistics (the
/// "type 7" convention). `sorted` must be non-empty and ascending.
double quantile(const std::vector<double>& sorted, double q);
SummaryStats summarize(std::vector<double> values);

struct DistanceDistribution {
    double enforced_d_min = 0.0;
    std::vector<double> distances;  // all k(k-1)/2 pairwise distances, ascending
    SummaryStats stats;
};

DistanceDistribution pairwise_distance_stats(const Portfolio& p, const Batch& b,
                                             double enforced_d_min = 0.0,
                                             Metric metric = euclidean);

struct AggregateRow {
    std::string function_id;
    std::string sampler_id;
    std::size_t dimension = 0;
    std::size_t budget = 0;
    std::size_t k = 0;
    double d = 0.0;
    std::size_t run_count = 0;
    std::size_t unreached = 0;
    std::optional<SummaryStats> stats;  // over reached runs only
};

/// Box-plot statistics of interpolate_at over curves, grouped by
/// (function, sampler, dimension, budget, k), at every grid distance.
/// Groups come out in sorted key order, so the result does not depend on
/// the order of `curves`. Throws on empty input.
std::vector<AggregateRow> aggregate(const std::vector<TradeoffCurve>& curves,
                                    const std::vector<double>& d_grid);

// Plain CSV exports.
void write_curves_csv(const std::vector<TradeoffCurve>& curves, const std::string& path);
void write_aggregate_csv(const std::vector<AggregateRow>& rows, const std::string& path);

struct DistanceRow {
    CurveMetadata metadata;
    DistanceDistribution distribution;
};
void write_distance_csv(const std::vector<DistanceRow>& rows, const std::string& path);

}  // namespace divsel
