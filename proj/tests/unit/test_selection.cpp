#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "divsel/rng.hpp"
#include "divsel/selection.hpp"
#include "oracles.hpp"

using namespace divsel;

namespace {

Portfolio line_portfolio(const std::vector<double>& xs) {
    std::vector<double> f;
    for (double x : xs) f.push_back(x * x);
    return Portfolio(1, xs, f, {});
}

Portfolio random_portfolio(Rng& rng, std::size_t n, std::size_t dim, double spread = 5.0) {
    std::vector<double> coords(n * dim), fit(n);
    for (auto& c : coords) c = rng.uniform(-spread, spread);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t c = 0; c < dim; ++c) s += coords[i * dim + c] * coords[i * dim + c];
        fit[i] = s;
    }
    return Portfolio(dim, coords, fit, {});
}

double min_pair(const Portfolio& p, const std::vector<std::size_t>& idx) {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < idx.size(); ++i)
        for (std::size_t j = i + 1; j < idx.size(); ++j) m = std::min(m, oracle::dist(p, idx[i], idx[j]));
    return m;
}

}  // namespace

TEST_CASE("initial batch") {
    const auto p = line_portfolio({0.0, 0.1, 1.0, 2.0});
    const auto b = initial_batch(p, 2);
    CHECK(b.indices == std::vector<std::size_t>{0, 1});
    CHECK(b.min_distance == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(b.loss == doctest::Approx(0.005).epsilon(1e-15));

    CHECK(initial_batch(p, 4).indices == std::vector<std::size_t>{0, 1, 2, 3});

    const Portfolio ties(1, {3.0, 1.0, 2.0}, {1.0, 1.0, 0.5}, {});
    CHECK(fitness_order(ties) == std::vector<std::size_t>{2, 0, 1});
    CHECK(initial_batch(ties, 2).indices == std::vector<std::size_t>{0, 2});

    CHECK_THROWS(initial_batch(p, 5));
    CHECK_THROWS(initial_batch(p, 1));
}

TEST_CASE("greedy worked example") {
    const auto p = line_portfolio({0.0, 0.1, 1.0, 2.0});
    SelectionConfig cfg;
    cfg.k = 2;
    cfg.iterations = 1;
    const auto r = greedy_sweep(p, cfg);
    REQUIRE(r.size() == 2);
    CHECK(r[1].batch.indices == std::vector<std::size_t>{0, 2});
    CHECK(r[1].min_distance == 1.0);
    CHECK(r[1].loss == 0.5);
    CHECK(r[1].iteration == 1);

    cfg.iterations = 0;
    const auto r0 = greedy_sweep(p, cfg);
    REQUIRE(r0.size() == 1);
    CHECK(r0[0].batch == initial_batch(p, 2));
    CHECK_FALSE(r0[0].stalled);
}

TEST_CASE("greedy stalls on coincident points") {
    const Portfolio p(2, std::vector<double>(10, 1.0), {3, 1, 2, 4, 5}, {});
    SelectionConfig cfg;
    cfg.k = 3;
    const auto r = greedy_sweep(p, cfg);
    REQUIRE(r.size() == 1);
    CHECK(r[0].stalled);
    CHECK(r[0].min_distance == 0.0);
}

TEST_CASE("greedy steps are the best admissible single swaps") {
    Rng rng(5);
    for (int inst = 0; inst < 40; ++inst) {
        const std::size_t n = 20 + rng() % 60;
        const std::size_t dim = 1 + rng() % 3;
        const std::size_t k = 2 + rng() % 4;
        const auto p = random_portfolio(rng, n, dim);
        SelectionConfig cfg;
        cfg.k = k;
        cfg.iterations = 200;
        cfg.epsilon = (inst % 3 == 0) ? 0.05 : 0.0;
        const auto rec = greedy_sweep(p, cfg);
        REQUIRE_FALSE(rec.empty());
        CHECK(rec[0].batch == initial_batch(p, k));

        for (std::size_t t = 0; t < rec.size(); ++t) {
            const auto& b = rec[t].batch;
            CHECK(b.indices.size() == k);
            CHECK(verify_batch(p, b, rec[t].min_distance));
            CHECK(rec[t].min_distance == b.min_distance);
            CHECK(rec[t].loss == b.loss);
            CHECK(rec[t].stalled == (t + 1 == rec.size() && rec.size() <= cfg.iterations));
            if (t == 0) continue;
            CHECK(rec[t].iteration == t);
            CHECK(rec[t].min_distance >= rec[t - 1].min_distance + cfg.epsilon);

            // Reference step: closest pair, then every admissible single swap.
            const auto& prev = rec[t - 1].batch.indices;
            std::size_t a = 0, c = 0;
            double cur = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < k; ++i)
                for (std::size_t j = i + 1; j < k; ++j)
                    if (oracle::dist(p, prev[i], prev[j]) < cur) {
                        cur = oracle::dist(p, prev[i], prev[j]);
                        a = prev[i];
                        c = prev[j];
                    }
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t x : {a, c}) {
                for (std::size_t y = 0; y < n; ++y) {
                    if (std::find(prev.begin(), prev.end(), y) != prev.end()) continue;
                    if (oracle::dist(p, x, y) == 0.0) continue;
                    auto cand = prev;
                    std::replace(cand.begin(), cand.end(), x, y);
                    if (min_pair(p, cand) < cur + cfg.epsilon) continue;
                    double s = 0.0;
                    for (auto i : cand) s += p.fitness(i);
                    best = std::min(best, s);
                }
            }
            double got = 0.0;
            for (auto i : rec[t].batch.indices) got += p.fitness(i);
            CHECK(got == doctest::Approx(best).epsilon(1e-12));

            std::vector<std::size_t> common;
            std::set_intersection(prev.begin(), prev.end(), b.indices.begin(), b.indices.end(),
                                  std::back_inserter(common));
            CHECK(common.size() == k - 1);
        }
    }
}

TEST_CASE("exact worked examples") {
    const auto p = line_portfolio({0.0, 0.1, 1.0, 2.0});
    SelectionConfig cfg;
    cfg.k = 2;
    cfg.d_min = 0.5;
    auto r = exact_select(p, cfg);
    REQUIRE(r.status == ExactStatus::Optimal);
    REQUIRE(r.batch);
    CHECK(r.batch->indices == std::vector<std::size_t>{0, 2});
    CHECK(r.batch->loss == 0.5);
    CHECK(r.gap == 0.0);
    CHECK(verify_batch(p, *r.batch, cfg.d_min));

    cfg.d_min = 10.0;
    r = exact_select(p, cfg);
    CHECK(r.status == ExactStatus::Infeasible);
    CHECK_FALSE(r.batch);

    cfg.d_min = 1e-6;
    r = exact_select(p, cfg);
    REQUIRE(r.batch);
    CHECK(*r.batch == initial_batch(p, 2));
}

TEST_CASE("verify_batch") {
    const auto p = line_portfolio({0.0, 0.1, 1.0, 2.0});
    const auto b = make_batch(p, {0, 2}, 0.0);
    CHECK(verify_batch(p, b, 1.0));
    CHECK_FALSE(verify_batch(p, b, 1.5));

    Batch dup = b;
    dup.indices = {2, 2};
    CHECK_FALSE(verify_batch(p, dup, 0.0));

    Batch stale = b;
    stale.loss += 1e-6;
    CHECK_FALSE(verify_batch(p, stale, 0.0));

    Batch wide = b;
    wide.indices = {0, 7};
    CHECK_FALSE(verify_batch(p, wide, 0.0));

    CHECK_THROWS(make_batch(p, {1, 1}, 0.0));
    CHECK_THROWS(make_batch(p, {0, 4}, 0.0));
}

TEST_CASE("exact agrees with enumeration") {
    Rng rng(17);
    int infeasible = 0;
    for (int inst = 0; inst < 300; ++inst) {
        const std::size_t n = 4 + rng() % 22;
        const std::size_t dim = 1 + rng() % 3;
        const std::size_t k = 2 + rng() % std::min<std::size_t>(3, n - 1);
        const auto p = random_portfolio(rng, n, dim);
        SelectionConfig cfg;
        cfg.k = k;
        cfg.d_min = rng.uniform(0.0, 8.0);
        cfg.f_opt = inst % 2 ? 0.0 : -1.5;
        const auto want = oracle::enumerate(p, k, cfg.d_min, cfg.f_opt);
        const auto got = exact_select(p, cfg);
        CAPTURE(inst);
        if (!want) {
            ++infeasible;
            CHECK(got.status == ExactStatus::Infeasible);
            continue;
        }
        REQUIRE(got.status == ExactStatus::Optimal);
        REQUIRE(got.batch);
        CHECK(std::abs(got.batch->loss - want->loss) <= 1e-12);
        CHECK(verify_batch(p, *got.batch, cfg.d_min, cfg.f_opt));
        CHECK(got.lower_bound == got.batch->loss);
    }
    CHECK(infeasible > 10);
    CHECK(infeasible < 290);
}

TEST_CASE("exact optimum is monotone in the enforced distance") {
    Rng rng(23);
    for (int inst = 0; inst < 20; ++inst) {
        const auto p = random_portfolio(rng, 300, 2);
        SelectionConfig cfg;
        cfg.k = 2 + rng() % 3;
        double prev = -std::numeric_limits<double>::infinity();
        for (double d = 0.5; d <= 6.0; d += 0.5) {
            cfg.d_min = d;
            const auto r = exact_select(p, cfg);
            if (r.status == ExactStatus::Infeasible) {
                prev = std::numeric_limits<double>::infinity();
                continue;
            }
            REQUIRE(r.status == ExactStatus::Optimal);
            CHECK(r.batch->loss >= prev);
            prev = r.batch->loss;
        }
    }
}

TEST_CASE("exact dominates every greedy record") {
    Rng rng(29);
    for (int inst = 0; inst < 15; ++inst) {
        const auto p = random_portfolio(rng, 60 + rng() % 240, 2);
        SelectionConfig cfg;
        cfg.k = 2 + rng() % 3;
        const auto rec = greedy_sweep(p, cfg);
        std::vector<double> ds;
        for (const auto& r : rec)
            if (r.min_distance > 0.0) ds.push_back(r.min_distance);
        if (ds.empty()) continue;
        std::sort(ds.begin(), ds.end());
        ds.erase(std::unique(ds.begin(), ds.end()), ds.end());
        const auto front = exact_frontier(p, cfg, ds);
        REQUIRE(front.size() == ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto& r = front[i].result;
            REQUIRE(r.status == ExactStatus::Optimal);
            CHECK(front[i].d_min == ds[i]);
            CHECK(verify_batch(p, *r.batch, ds[i]));
            cfg.d_min = ds[i];
            CHECK(r.batch->loss == exact_select(p, cfg).batch->loss);
        }
        for (const auto& r : rec) {
            if (r.min_distance <= 0.0) continue;
            const auto it = std::find(ds.begin(), ds.end(), r.min_distance);
            CHECK(front[std::size_t(it - ds.begin())].result.batch->loss <= r.loss + 1e-9);
        }
    }
}

TEST_CASE("small enumerated frontier") {
    Rng rng(31);
    for (int inst = 0; inst < 25; ++inst) {
        const auto p = random_portfolio(rng, 18, 2);
        SelectionConfig cfg;
        cfg.k = 3;
        const std::vector<double> ds = {0.5, 1.0, 2.0, 3.0, 4.0, 5.0};
        const auto front = exact_frontier(p, cfg, ds);
        for (std::size_t i = 0; i < ds.size(); ++i) {
            const auto want = oracle::enumerate(p, 3, ds[i]);
            CHECK(bool(want) == (front[i].result.status == ExactStatus::Optimal));
            if (want) CHECK(std::abs(front[i].result.batch->loss - want->loss) <= 1e-12);
        }
    }
}

TEST_CASE("warm starts and time limit") {
    Rng rng(37);
    const auto p = random_portfolio(rng, 2000, 2);
    SelectionConfig cfg;
    cfg.k = 5;
    cfg.d_min = 3.0;
    const auto rec = greedy_sweep(p, cfg);
    ExactOptions opts;
    for (const auto& r : rec)
        if (r.min_distance >= cfg.d_min) opts.warm_starts.push_back(r.batch.indices);
    opts.warm_starts.push_back({0, 0, 0, 0, 0});
    opts.warm_starts.push_back({0, 1, 2, 3, 4});
    const auto full = exact_select(p, cfg, opts);
    REQUIRE(full.status == ExactStatus::Optimal);
    CHECK(verify_batch(p, *full.batch, cfg.d_min));

    cfg.time_limit = 1e-9;
    const auto cut = exact_select(p, cfg, opts);
    CHECK(cut.status == ExactStatus::TimeLimit);
    REQUIRE(cut.batch);
    CHECK(verify_batch(p, *cut.batch, cfg.d_min));
    CHECK(cut.lower_bound <= full.batch->loss + 1e-12);
    CHECK(cut.gap == doctest::Approx(cut.batch->loss - cut.lower_bound));
    CHECK(full.batch->loss <= cut.batch->loss);
}

TEST_CASE("non-euclidean metric") {
    const auto chebyshev = +[](std::span<const double> a, std::span<const double> b) {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
        return m;
    };
    const Portfolio p(2, {0, 0, 1, 1, 0.9, 0, 3, 3}, {0, 1, 2, 3}, {});
    SelectionConfig cfg;
    cfg.k = 2;
    cfg.d_min = 1.0;
    cfg.metric = chebyshev;
    const auto r = exact_select(p, cfg);
    REQUIRE(r.batch);
    CHECK(r.batch->indices == std::vector<std::size_t>{0, 1});
    CHECK(r.batch->min_distance == 1.0);
    CHECK(verify_batch(p, *r.batch, 1.0, 0.0, chebyshev));
}
