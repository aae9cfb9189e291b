#include "divsel/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace divsel {

double euclidean(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double t = a[i] - b[i];
        s += t * t;
    }
    return std::sqrt(s);
}

namespace {

double min_pairwise(const Portfolio& p, std::span<const std::size_t> idx, Metric metric) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            m = std::min(m, metric(p.point(idx[i]), p.point(idx[j])));
    return m;
}

double mean_fitness(const Portfolio& p, std::span<const std::size_t> idx) {
    double s = 0.0;
    for (auto i : idx) s += p.fitness(i);
    return s / static_cast<double>(idx.size());
}

}  // namespace

Batch make_batch(const Portfolio& p, std::vector<std::size_t> indices, double f_opt, Metric metric) {
    if (indices.size() < 2) throw std::invalid_argument("batch needs at least two points");
    std::sort(indices.begin(), indices.end());
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw std::invalid_argument("batch indices must be distinct");
    if (indices.back() >= p.size()) throw std::invalid_argument("batch index out of range");
    Batch b;
    b.min_distance = min_pairwise(p, indices, metric);
    b.loss = mean_fitness(p, indices) - f_opt;
    b.indices = std::move(indices);
    return b;
}

std::vector<std::size_t> fitness_order(const Portfolio& p) {
    std::vector<std::size_t> order(p.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return p.fitness(a) < p.fitness(b); });
    return order;
}

namespace {

void check_k(const Portfolio& p, std::size_t k) {
    if (k < 2) throw std::invalid_argument("batch size k must be >= 2");
    if (k > p.size())
        throw std::invalid_argument("batch size k = " + std::to_string(k) +
                                    " exceeds portfolio size " + std::to_string(p.size()));
}

}  // namespace

Batch initial_batch(const Portfolio& p, std::size_t k, double f_opt, Metric metric) {
    check_k(p, k);
    auto order = fitness_order(p);
    order.resize(k);
    return make_batch(p, std::move(order), f_opt, metric);
}

std::vector<TradeoffRecord> greedy_sweep(const Portfolio& p, const SelectionConfig& cfg) {
    check_k(p, cfg.k);
    if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be >= 0");
    const Metric dist = cfg.metric;
    const std::size_t k = cfg.k;
    const auto order = fitness_order(p);

    std::vector<std::size_t> batch(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    std::vector<char> in_batch(p.size(), 0);
    for (auto i : batch) in_batch[i] = 1;

    std::vector<TradeoffRecord> records;
    {
        Batch b = make_batch(p, batch, cfg.f_opt, dist);
        records.push_back({0, b.min_distance, b.loss, std::move(b), false});
    }

    std::vector<std::size_t> rest;
    rest.reserve(k);
    for (std::size_t it = 1; it <= cfg.iterations; ++it) {
        // Closest pair; ties go to the lexicographically smallest index pair.
        std::sort(batch.begin(), batch.end());
        std::size_t a = 0, b = 0;
        double current = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j) {
                const double d = dist(p.point(batch[i]), p.point(batch[j]));
                if (d < current) {
                    current = d;
                    a = batch[i];
                    b = batch[j];
                }
            }
        const double required = current + cfg.epsilon;

        struct Swap {
            std::size_t out;
            std::size_t in;
            double sum;
        };
        std::optional<Swap> swaps[2];
        const double batch_sum = [&] {
            double s = 0.0;
            for (auto i : batch) s += p.fitness(i);
            return s;
        }();

        for (int which = 0; which < 2; ++which) {
            const std::size_t x = which == 0 ? a : b;
            rest.clear();
            for (auto i : batch)
                if (i != x) rest.push_back(i);
            if (min_pairwise(p, rest, dist) < required) continue;
            for (auto y : order) {
                if (in_batch[y]) continue;
                // A replacement sitting exactly on the removed point is not a move.
                if (dist(p.point(y), p.point(x)) == 0.0) continue;
                bool ok = true;
                for (auto z : rest) {
                    if (dist(p.point(y), p.point(z)) < required) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    swaps[which] = Swap{x, y, batch_sum - p.fitness(x) + p.fitness(y)};
                    break;
                }
            }
        }

        const Swap* chosen = nullptr;
        if (swaps[0] && swaps[1]) {
            if (swaps[0]->sum < swaps[1]->sum) chosen = &*swaps[0];
            else if (swaps[1]->sum < swaps[0]->sum) chosen = &*swaps[1];
            else chosen = p.fitness(b) > p.fitness(a) ? &*swaps[1] : &*swaps[0];
        } else if (swaps[0]) {
            chosen = &*swaps[0];
        } else if (swaps[1]) {
            chosen = &*swaps[1];
        }
        if (!chosen) {
            records.back().stalled = true;
            break;
        }

        in_batch[chosen->out] = 0;
        in_batch[chosen->in] = 1;
        std::replace(batch.begin(), batch.end(), chosen->out, chosen->in);
        Batch nb = make_batch(p, batch, cfg.f_opt, dist);
        records.push_back({it, nb.min_distance, nb.loss, std::move(nb), false});
    }
    return records;
}

bool verify_batch(const Portfolio& p, const Batch& b, double d_min, double f_opt, Metric metric) {
    const auto& idx = b.indices;
    if (idx.size() < 2) return false;
    for (std::size_t i = 0; i < idx.size(); ++i) {
        if (idx[i] >= p.size()) return false;
        for (std::size_t j = i + 1; j < idx.size(); ++j)
            if (idx[i] == idx[j]) return false;
    }
    const double realized = min_pairwise(p, idx, metric);
    if (realized < d_min) return false;
    const auto close = [](double x, double y) {
        return std::abs(x - y) <= 1e-12 * std::max(1.0, std::abs(y));
    };
    if (!close(realized, b.min_distance)) return false;
    if (!close(mean_fitness(p, idx) - f_opt, b.loss)) return false;
    return true;
}

std::string to_string(ExactStatus s) {
    switch (s) {
        case ExactStatus::Optimal: return "optimal";
        case ExactStatus::Infeasible: return "infeasible";
        case ExactStatus::TimeLimit: return "time_limit";
    }
    return "unknown";
}

}  // namespace divsel
