#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "divsel/portfolio.hpp"

namespace divsel {

/// Distance between two points of equal dimension.
using Metric = double (*)(std::span<const double>, std::span<const double>);

double euclidean(std::span<const double> a, std::span<const double> b);

/// k distinct portfolio indices (ascending) with the cached realized minimum
/// pairwise distance and loss (mean fitness minus f_opt).
struct Batch {
    std::vector<std::size_t> indices;
    double min_distance = 0.0;
    double loss = 0.0;

    bool operator==(const Batch&) const = default;
};

/// Builds a batch and fills its cached fields. Indices are sorted; duplicates
/// and out-of-range indices are rejected.
Batch make_batch(const Portfolio& p, std::vector<std::size_t> indices, double f_opt,
                 Metric metric = euclidean);

struct SelectionConfig {
    std::size_t k = 5;
    std::size_t iterations = 1000;  // greedy budget M
    double epsilon = 0.0;           // required per-step distance gain
    double d_min = 0.0;             // exact solver only
    double time_limit = std::numeric_limits<double>::infinity();  // seconds, exact solver only
    double f_opt = 0.0;             // subtracted from mean fitness to form the loss
    Metric metric = euclidean;
};

struct TradeoffRecord {
    std::size_t iteration = 0;
    double min_distance = 0.0;
    double loss = 0.0;
    Batch batch;
    // Set on the last record when the sweep stopped because neither swap was
    // feasible (as opposed to exhausting the iteration budget).
    bool stalled = false;
};

/// Portfolio indices ordered by ascending fitness, ties by ascending index.
std::vector<std::size_t> fitness_order(const Portfolio& p);

/// The k lowest-fitness points.
Batch initial_batch(const Portfolio& p, std::size_t k, double f_opt = 0.0,
                    Metric metric = euclidean);

/// Greedy diversity sweep. Record 0 is the initial batch; every applied swap
/// appends one record. Each step removes one endpoint of the closest pair
/// and brings in the best-ranked outside point that keeps the batch's
/// minimum distance at least epsilon above its previous value.
std::vector<TradeoffRecord> greedy_sweep(const Portfolio& p, const SelectionConfig& cfg);

enum class ExactStatus { Optimal, Infeasible, TimeLimit };

struct ExactResult {
    ExactStatus status = ExactStatus::Infeasible;
    std::optional<Batch> batch;  // present for Optimal, and for TimeLimit if an incumbent exists
    double lower_bound = 0.0;    // proven lower bound on the optimal loss
    double gap = 0.0;            // incumbent loss - lower_bound (0 when optimal)
    std::uint64_t nodes = 0;
    double seconds = 0.0;
};

struct ExactOptions {
    // Feasible batches used to seed the incumbent; infeasible ones are ignored.
    std::vector<std::vector<std::size_t>> warm_starts;
};

/// Branch-and-bound over fitness-sorted candidates for
///   min mean fitness  s.t. |B| = k, pairwise distance >= d_min.
ExactResult exact_select(const Portfolio& p, const SelectionConfig& cfg,
                         const ExactOptions& options = {});

/// Checks that b holds k distinct valid indices, all pairwise distances are
/// >= d_min and the cached distance and loss match a recomputation to 1e-12.
bool verify_batch(const Portfolio& p, const Batch& b, double d_min, double f_opt = 0.0,
                  Metric metric = euclidean);

/// Optimal losses at several enforced distances. Uses the fact that the
/// optimum at d stays optimal up to its realized minimum distance, so one
/// solve covers a whole interval of queried distances.
struct FrontierPoint {
    double d_min;
    ExactResult result;
};
std::vector<FrontierPoint> exact_frontier(const Portfolio& p, const SelectionConfig& cfg,
                                          std::vector<double> distances,
                                          const ExactOptions& options = {});

std::string to_string(ExactStatus s);

}  // namespace divsel
