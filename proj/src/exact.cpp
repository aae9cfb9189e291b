#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "divsel/selection.hpp"

namespace divsel {

namespace {

using Clock = std::chrono::steady_clock;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Points re-indexed by fitness rank ("position"): position 0 is the best
// point. Everything in the solver works on positions.
struct RankedPoints {
    std::size_t dim;
    std::vector<std::size_t> index_of;  // position -> portfolio index
    std::vector<double> fit;            // by position
    std::vector<double> coords;         // by position, row-major

    std::span<const double> at(std::size_t pos) const { return {coords.data() + pos * dim, dim}; }
};

// Smallest s with sqrt(s) >= d, so that comparing squared sums against it
// agrees exactly with comparing `euclidean` against d.
double sqrt_threshold(double d) {
    double s = d * d;
    while (std::sqrt(s) < d) s = std::nextafter(s, kInf);
    while (s > 0.0 && std::sqrt(std::nextafter(s, 0.0)) >= d) s = std::nextafter(s, 0.0);
    return s;
}

RankedPoints rank(const Portfolio& p) {
    RankedPoints r;
    r.dim = p.dimension();
    r.index_of = fitness_order(p);
    r.fit.resize(p.size());
    r.coords.resize(p.size() * r.dim);
    for (std::size_t pos = 0; pos < p.size(); ++pos) {
        const auto idx = r.index_of[pos];
        r.fit[pos] = p.fitness(idx);
        const auto pt = p.point(idx);
        std::copy(pt.begin(), pt.end(), r.coords.begin() + static_cast<std::ptrdiff_t>(pos * r.dim));
    }
    return r;
}

// k-d tree over positions. Each node knows its bounding box and the smallest
// position below it, which lets a query for "best point at distance >= d
// from every member of S" skip boxes that are either too close to some
// member or cannot beat the best hit so far.
class KdTree {
public:
    explicit KdTree(const RankedPoints& pts) : pts_(pts) {
        perm_.resize(pts.fit.size());
        std::iota(perm_.begin(), perm_.end(), 0);
        nodes_.reserve(2 * perm_.size() / kLeaf + 2);
        build(0, perm_.size());
    }

    // Smallest position p < limit with metric distance >= d to every member
    // of `members`, or limit if none exists.
    std::size_t query(std::span<const std::size_t> members, double d, std::size_t limit) const {
        best_ = limit;
        members_ = members;
        d_ = d;
        // Box pruning uses a slightly shrunk radius so rounding can only make
        // it visit more, never fewer, boxes. Leaves use the exact test.
        prune_sq_ = d * d * (1.0 - 1e-9);
        visit(0);
        return best_;
    }

private:
    static constexpr std::size_t kLeaf = 16;

    struct Node {
        std::size_t begin, end;  // range in perm_ (leaf only)
        std::size_t left = 0, right = 0;
        std::size_t min_pos;
        std::vector<double> lo, hi;
        bool leaf() const { return left == 0; }
    };

    std::size_t build(std::size_t begin, std::size_t end) {
        const std::size_t id = nodes_.size();
        nodes_.push_back({});
        const std::size_t dim = pts_.dim;
        std::vector<double> lo(dim, kInf), hi(dim, -kInf);
        std::size_t mn = std::numeric_limits<std::size_t>::max();
        for (std::size_t i = begin; i < end; ++i) {
            const auto pt = pts_.at(perm_[i]);
            for (std::size_t j = 0; j < dim; ++j) {
                lo[j] = std::min(lo[j], pt[j]);
                hi[j] = std::max(hi[j], pt[j]);
            }
            mn = std::min(mn, perm_[i]);
        }
        if (end - begin <= kLeaf) {
            std::sort(perm_.begin() + static_cast<std::ptrdiff_t>(begin),
                      perm_.begin() + static_cast<std::ptrdiff_t>(end));
            nodes_[id] = Node{begin, end, 0, 0, mn, std::move(lo), std::move(hi)};
            return id;
        }
        std::size_t axis = 0;
        for (std::size_t j = 1; j < dim; ++j)
            if (hi[j] - lo[j] > hi[axis] - lo[axis]) axis = j;
        const std::size_t mid = begin + (end - begin) / 2;
        std::nth_element(perm_.begin() + static_cast<std::ptrdiff_t>(begin),
                         perm_.begin() + static_cast<std::ptrdiff_t>(mid),
                         perm_.begin() + static_cast<std::ptrdiff_t>(end),
                         [&](std::size_t a, std::size_t b) {
                             const double va = pts_.at(a)[axis], vb = pts_.at(b)[axis];
                             return va < vb || (va == vb && a < b);
                         });
        const std::size_t l = build(begin, mid);
        const std::size_t r = build(mid, end);
        nodes_[id] = Node{begin, end, l, r, mn, std::move(lo), std::move(hi)};
        return id;
    }

    bool box_too_close(const Node& n) const {
        for (auto m : members_) {
            const auto c = pts_.at(m);
            double far = 0.0;
            for (std::size_t j = 0; j < pts_.dim; ++j) {
                const double t = std::max(std::abs(c[j] - n.lo[j]), std::abs(c[j] - n.hi[j]));
                far += t * t;
            }
            if (far < prune_sq_) return true;
        }
        return false;
    }

    void visit(std::size_t id) const {
        const Node& n = nodes_[id];
        if (n.min_pos >= best_ || box_too_close(n)) return;
        if (n.leaf()) {
            for (std::size_t i = n.begin; i < n.end; ++i) {
                const std::size_t pos = perm_[i];
                if (pos >= best_) break;
                bool ok = true;
                for (auto m : members_) {
                    if (euclidean(pts_.at(pos), pts_.at(m)) < d_) {
                        ok = false;
                        break;
                    }
                }
                if (ok) {
                    best_ = pos;
                    break;
                }
            }
            return;
        }
        const Node& l = nodes_[n.left];
        const Node& r = nodes_[n.right];
        if (l.min_pos <= r.min_pos) {
            visit(n.left);
            visit(n.right);
        } else {
            visit(n.right);
            visit(n.left);
        }
    }

    const RankedPoints& pts_;
    std::vector<std::size_t> perm_;
    std::vector<Node> nodes_;
    mutable std::size_t best_ = 0;
    mutable std::span<const std::size_t> members_;
    mutable double d_ = 0.0;
    mutable double prune_sq_ = 0.0;
};

// Incumbent, clock and compatibility test shared by both search engines.
class SearchBase {
public:
    SearchBase(const RankedPoints& pts, std::size_t k, double d_min, Metric metric, double time_limit)
        : pts_(pts), k_(k), d_(d_min), metric_(metric), time_limit_(time_limit),
          start_(Clock::now()) {
        euclid_ = metric_ == euclidean;
        // Shrunk a little so the triangle inequality survives rounding.
        half_d_ = 0.5 * d_ * (1.0 - 1e-12);
        d2_ = sqrt_threshold(d_);
        half_d2_ = half_d_ * half_d_;
        chosen_.reserve(k_);
    }

    void offer(const std::vector<std::size_t>& positions) {
        if (positions.size() != k_) return;
        double s = 0.0;
        for (std::size_t i = 0; i < k_; ++i) {
            s += pts_.fit[positions[i]];
            for (std::size_t j = i + 1; j < k_; ++j)
                if (positions[i] == positions[j] || !compatible(positions[i], positions[j])) return;
        }
        if (s < best_sum_) {
            best_sum_ = s;
            best_ = positions;
        }
    }

    // First-fit pass in rank order.
    void seed_first_fit() {
        std::vector<std::size_t> pick;
        for (std::size_t pos = 0; pos < pts_.fit.size() && pick.size() < k_; ++pos) {
            bool ok = true;
            for (auto q : pick)
                if (!compatible(pos, q)) {
                    ok = false;
                    break;
                }
            if (ok) pick.push_back(pos);
        }
        offer(pick);
    }

    // Positions that can still appear in a batch beating the incumbent.
    std::size_t relevant() const {
        const auto& f = pts_.fit;
        if (!std::isfinite(best_sum_)) return f.size();
        const double rest = static_cast<double>(k_ - 1) * f[0];
        return static_cast<std::size_t>(std::lower_bound(f.begin(), f.end(), best_sum_ - rest) - f.begin());
    }

    bool timed_out() const { return timed_out_; }
    double best_sum() const { return best_sum_; }
    const std::vector<std::size_t>& best() const { return best_; }
    double lower_bound_sum() const { return std::min(lower_bound_, best_sum_); }
    std::uint64_t nodes() const { return nodes_; }

protected:
    bool compatible(std::size_t a, std::size_t b) const { return at_least(a, b, d_, d2_); }

    // metric(a, b) >= t; squared comparison for the Euclidean metric.
    bool at_least(std::size_t a, std::size_t b, double t, double t2) const {
        if (!euclid_) return metric_(pts_.at(a), pts_.at(b)) >= t;
        const double* x = pts_.coords.data() + a * pts_.dim;
        const double* y = pts_.coords.data() + b * pts_.dim;
        double s = 0.0;
        for (std::size_t i = 0; i < pts_.dim; ++i) {
            const double diff = x[i] - y[i];
            s += diff * diff;
        }
        return s >= t2;
    }

    bool check_clock() {
        if ((++nodes_ & 0xfff) == 0) out_of_time();
        return timed_out_;
    }

    bool out_of_time() {
        if (std::isfinite(time_limit_) &&
            std::chrono::duration<double>(Clock::now() - start_).count() > time_limit_)
            timed_out_ = true;
        return timed_out_;
    }

    // Sum of the k best fitness values.
    double trivial_bound() const {
        double s = 0.0;
        for (std::size_t i = 0; i < k_ && i < pts_.fit.size(); ++i) s += pts_.fit[i];
        return s;
    }

    void record_with(std::size_t c, double with_pick) {
        const double s = with_pick + pts_.fit[c];
        if (s < best_sum_) {
            best_sum_ = s;
            best_ = chosen_;
            best_.push_back(c);
        }
    }

    const RankedPoints& pts_;
    std::size_t k_;
    double d_;
    Metric metric_;
    double time_limit_;
    Clock::time_point start_;
    bool euclid_ = false;
    double half_d_ = 0.0;
    double d2_ = 0.0;
    double half_d2_ = 0.0;
    std::vector<std::size_t> chosen_;
    std::vector<std::size_t> best_;
    double best_sum_ = kInf;
    double lower_bound_ = kInf;
    bool timed_out_ = false;
    std::uint64_t nodes_ = 0;
};

// List-based search for portfolios too large for the bitset engine.
class BranchAndBound : public SearchBase {
public:
    BranchAndBound(const RankedPoints& pts, std::size_t k, double d_min, Metric metric,
                   double time_limit)
        : SearchBase(pts, k, d_min, metric, time_limit) {
        if (metric_ == euclidean && pts_.fit.size() > kKdThreshold) kd_.emplace(pts_);
        lists_.resize(k_ + 1);
    }

    void run() {
        auto& root = lists_[0];
        root.resize(relevant());
        std::iota(root.begin(), root.end(), 0);
        timed_out_ = false;
        lower_bound_ = kInf;
        search(0, 0.0);
        if (!timed_out_) lower_bound_ = best_sum_;
    }

private:
    static constexpr std::size_t kKdThreshold = 4096;

    // Lower bound on the cost of r more picks from cand[j..]. Points closer
    // than d/2 to a common seed conflict pairwise, so a batch takes at most
    // one point per seed ball and each ball costs at least its seed. Seeds are
    // taken first-fit in rank order. Returns +inf once the bound reaches `budget`.
    double completion_bound(const std::vector<std::size_t>& cand, std::size_t j, std::size_t r,
                            double budget) {
        double acc = 0.0;
        std::size_t found = 0;
        seeds_.clear();
        for (std::size_t i = j; i < cand.size() && found < r; ++i) {
            const std::size_t c = cand[i];
            const double f = pts_.fit[c];
            if (acc + f * static_cast<double>(r - found) >= budget) return kInf;
            bool covered = false;
            for (auto s : seeds_)
                if (!at_least(c, s, half_d_, half_d2_)) {
                    covered = true;
                    break;
                }
            if (covered) continue;
            seeds_.push_back(c);
            acc += f;
            ++found;
        }
        return found == r ? acc : kInf;
    }

    // `lists_[depth]` holds the ranked candidates compatible with chosen_.
    void search(std::size_t depth, double sum) {
        const auto& cand = lists_[depth];
        const std::size_t r = k_ - depth;
        if (cand.size() < r) return;

        if (r == 1) {
            // The list is compatible with everything chosen, so its head is the best completion.
            const double s = sum + pts_.fit[cand[0]];
            if (s < best_sum_) {
                chosen_.push_back(cand[0]);
                best_sum_ = s;
                best_ = chosen_;
                chosen_.pop_back();
            }
            return;
        }

        for (std::size_t j = 0; j + r <= cand.size(); ++j) {
            // Sorted candidates: once the r cheapest from j on cannot beat the
            // incumbent, no later j can either.
            const double bound = sum + completion_bound(cand, j, r, best_sum_ - sum);
            if (bound >= best_sum_) return;
            if (check_clock()) {
                lower_bound_ = std::min(lower_bound_, bound);
                return;
            }
            const std::size_t pick = cand[j];
            const double with_pick = sum + pts_.fit[pick];
            chosen_.push_back(pick);
            if (r == 2) {
                complete_pair(cand, j, with_pick);
            } else {
                auto& child = lists_[depth + 1];
                child.clear();
                // Keep filtering only while the candidate could still appear in an
                // improving completion: the r - 2 cheapest kept entries plus it must
                // leave room under the incumbent.
                double head = 0.0;
                for (std::size_t i = j + 1; i < cand.size(); ++i) {
                    const std::size_t c = cand[i];
                    if (child.size() >= r - 2 && with_pick + head + pts_.fit[c] >= best_sum_) break;
                    if (!compatible(pick, c)) continue;
                    if (child.size() < r - 2) head += pts_.fit[c];
                    child.push_back(c);
                }
                if (with_pick + completion_bound(child, 0, r - 1, best_sum_ - with_pick) < best_sum_)
                    search(depth + 1, with_pick);
            }
            chosen_.pop_back();
            if (timed_out_) {
                lower_bound_ = std::min(lower_bound_, bound);
                return;
            }
        }
    }

    // Last slot: cheapest point after position j compatible with chosen_.
    void complete_pair(const std::vector<std::size_t>& cand, std::size_t j, double with_pick) {
        const double room = best_sum_ - with_pick;
        if (kd_ && cand.size() > kKdThreshold) {
            // Limit to positions whose fitness leaves room under the incumbent.
            const auto limit = static_cast<std::size_t>(
                std::lower_bound(pts_.fit.begin(), pts_.fit.end(), room) - pts_.fit.begin());
            const std::size_t hit = kd_->query(chosen_, d_, limit);
            // The tree searches all positions; a hit below cand[j] is a set
            // already enumerated, still a valid feasible solution.
            if (hit < limit) record_with(hit, with_pick);
            return;
        }
        const std::size_t pick = cand[j];
        for (std::size_t i = j + 1; i < cand.size(); ++i) {
            const std::size_t c = cand[i];
            if (pts_.fit[c] >= room) return;
            if (compatible(pick, c)) {
                record_with(c, with_pick);
                return;
            }
        }
    }

    std::optional<KdTree> kd_;
    std::vector<std::size_t> seeds_;
    std::vector<std::vector<std::size_t>> lists_;
};

// Same search as BranchAndBound, on precomputed adjacency bitsets: child
// lists become word-wise ANDs and seed balls word-wise masks. Memory grows
// with the square of the number of relevant positions.
class BitsetSearch : public SearchBase {
public:
    static constexpr std::size_t kMaxPoints = 12000;

    using SearchBase::SearchBase;

    void run() {
        n_ = relevant();
        words_ = (n_ + 63) / 64;
        compat_.assign(n_ * words_, 0);
        near_.assign(n_ * words_, 0);
        for (std::size_t i = 0; i < n_; ++i) {
            if ((i & 0xff) == 0 && out_of_time()) {
                lower_bound_ = trivial_bound();
                return;
            }
            set(near_, i, i);
            for (std::size_t j = 0; j < i; ++j) {
                if (compatible(i, j)) {
                    set(compat_, i, j);
                    set(compat_, j, i);
                }
                if (!at_least(i, j, half_d_, half_d2_)) {
                    set(near_, i, j);
                    set(near_, j, i);
                }
            }
        }
        levels_.assign(k_ + 1, Level{std::vector<std::uint64_t>(words_, ~std::uint64_t{0}), 0, words_});
        if (n_ % 64) levels_[0].bits[words_ - 1] = (std::uint64_t{1} << (n_ % 64)) - 1;
        timed_out_ = false;
        lower_bound_ = kInf;
        if (n_ > 0) search(0, 0.0);
        if (!timed_out_) lower_bound_ = best_sum_;
    }

private:
    struct Level {
        std::vector<std::uint64_t> bits;
        std::size_t lo, hi;  // word range that may hold set bits
    };

    void set(std::vector<std::uint64_t>& m, std::size_t row, std::size_t col) {
        m[row * words_ + col / 64] |= std::uint64_t{1} << (col % 64);
    }

    const std::uint64_t* row(const std::vector<std::uint64_t>& m, std::size_t i) const {
        return m.data() + i * words_;
    }

    // First position >= from (and < n_) whose fitness reaches v.
    std::size_t fitness_limit(std::size_t from, double v) const {
        const auto b = pts_.fit.begin();
        return static_cast<std::size_t>(std::lower_bound(b + static_cast<std::ptrdiff_t>(from),
                                                         b + static_cast<std::ptrdiff_t>(n_), v) - b);
    }

    // Seed-ball bound of BranchAndBound over the set bits of `lv` at
    // positions >= from.
    double completion_bound(const Level& lv, std::size_t from, std::size_t r, double budget) {
        double acc = 0.0;
        std::size_t found = 0;
        seeds_.clear();
        for (std::size_t w = std::max(lv.lo, from / 64); w < lv.hi; ++w) {
            std::uint64_t bits = lv.bits[w];
            if (w == from / 64) bits &= ~std::uint64_t{0} << (from % 64);
            for (auto sd : seeds_) bits &= ~row(near_, sd)[w];
            while (bits) {
                const std::size_t c = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                const double f = pts_.fit[c];
                if (acc + f * static_cast<double>(r - found) >= budget) return kInf;
                seeds_.push_back(c);
                acc += f;
                if (++found == r) return acc;
                bits &= ~row(near_, c)[w];
            }
        }
        return kInf;
    }

    void search(std::size_t depth, double sum) {
        const Level& lv = levels_[depth];
        const std::size_t r = k_ - depth;
        for (std::size_t w = lv.lo; w < lv.hi; ++w) {
            std::uint64_t bits = lv.bits[w];
            while (bits) {
                const std::size_t j = w * 64 + static_cast<std::size_t>(std::countr_zero(bits));
                bits &= bits - 1;
                const double bound = sum + completion_bound(lv, j, r, best_sum_ - sum);
                if (bound >= best_sum_) return;
                if (check_clock()) {
                    lower_bound_ = std::min(lower_bound_, bound);
                    return;
                }
                const double with_pick = sum + pts_.fit[j];
                chosen_.push_back(j);
                if (r == 2) {
                    complete_pair(lv, j, with_pick);
                } else {
                    // Room left for r - 2 picks at fitness >= f(j) besides the new one.
                    const double room = best_sum_ - with_pick - static_cast<double>(r - 2) * pts_.fit[j];
                    Level& child = levels_[depth + 1];
                    if (fill_child(lv, j, room, child) &&
                        with_pick + completion_bound(child, 0, r - 1, best_sum_ - with_pick) < best_sum_)
                        search(depth + 1, with_pick);
                }
                chosen_.pop_back();
                if (timed_out_) {
                    lower_bound_ = std::min(lower_bound_, bound);
                    return;
                }
            }
        }
    }

    // child = lv & compat(j), restricted to positions in (j, limit).
    bool fill_child(const Level& lv, std::size_t j, double room, Level& child) {
        const std::size_t limit = fitness_limit(j + 1, room);
        if (limit <= j + 1) return false;
        child.lo = (j + 1) / 64;
        child.hi = std::min(lv.hi, (limit + 63) / 64);
        const std::uint64_t* cj = row(compat_, j);
        bool any = false;
        for (std::size_t w = child.lo; w < child.hi; ++w) {
            std::uint64_t b = lv.bits[w] & cj[w];
            if (w == child.lo) b &= ~std::uint64_t{0} << ((j + 1) % 64);
            if (w == limit / 64) b &= (std::uint64_t{1} << (limit % 64)) - 1;
            child.bits[w] = b;
            any = any || b;
        }
        return any;
    }

    void complete_pair(const Level& lv, std::size_t j, double with_pick) {
        const std::size_t limit = fitness_limit(j + 1, best_sum_ - with_pick);
        const std::uint64_t* cj = row(compat_, j);
        for (std::size_t w = (j + 1) / 64; w < lv.hi && w * 64 < limit; ++w) {
            std::uint64_t b = lv.bits[w] & cj[w];
            if (w == (j + 1) / 64) b &= ~std::uint64_t{0} << ((j + 1) % 64);
            if (!b) continue;
            const std::size_t c = w * 64 + static_cast<std::size_t>(std::countr_zero(b));
            if (c < limit) record_with(c, with_pick);
            return;
        }
    }

    std::size_t n_ = 0;
    std::size_t words_ = 0;
    std::vector<std::uint64_t> compat_;
    std::vector<std::uint64_t> near_;
    std::vector<Level> levels_;
    std::vector<std::size_t> seeds_;
};

void fill_result(ExactResult& res, const SearchBase& engine, const Portfolio& p, const RankedPoints& pts,
                 const SelectionConfig& cfg) {
    res.nodes = engine.nodes();
    const double k = static_cast<double>(cfg.k);
    if (!engine.best().empty()) {
        std::vector<std::size_t> idx;
        for (auto pos : engine.best()) idx.push_back(pts.index_of[pos]);
        res.batch = make_batch(p, std::move(idx), cfg.f_opt, cfg.metric);
    }
    if (engine.timed_out()) {
        res.status = ExactStatus::TimeLimit;
        res.lower_bound = engine.lower_bound_sum() / k - cfg.f_opt;
        res.gap = res.batch ? res.batch->loss - res.lower_bound : kInf;
    } else if (res.batch) {
        res.status = ExactStatus::Optimal;
        res.lower_bound = res.batch->loss;
        res.gap = 0.0;
    } else {
        res.status = ExactStatus::Infeasible;
        res.lower_bound = kInf;
        res.gap = 0.0;
    }
}

}  // namespace

ExactResult exact_select(const Portfolio& p, const SelectionConfig& cfg, const ExactOptions& options) {
    if (cfg.k < 2) throw std::invalid_argument("batch size k must be >= 2");
    if (cfg.k > p.size())
        throw std::invalid_argument("batch size k = " + std::to_string(cfg.k) +
                                    " exceeds portfolio size " + std::to_string(p.size()));
    if (!(cfg.d_min > 0.0)) throw std::invalid_argument("exact selection requires d_min > 0");

    const auto start = Clock::now();
    const RankedPoints pts = rank(p);
    std::vector<std::size_t> pos_of(p.size());
    for (std::size_t pos = 0; pos < p.size(); ++pos) pos_of[pts.index_of[pos]] = pos;

    auto seed = [&](SearchBase& engine) {
        engine.seed_first_fit();
        for (const auto& ws : options.warm_starts) {
            if (ws.size() != cfg.k) continue;
            std::vector<std::size_t> positions;
            bool valid = true;
            for (auto idx : ws) {
                if (idx >= p.size()) {
                    valid = false;
                    break;
                }
                positions.push_back(pos_of[idx]);
            }
            if (!valid) continue;
            std::sort(positions.begin(), positions.end());
            engine.offer(positions);
        }
    };

    ExactResult res;
    BitsetSearch bits(pts, cfg.k, cfg.d_min, cfg.metric, cfg.time_limit);
    seed(bits);
    if (bits.relevant() <= BitsetSearch::kMaxPoints) {
        bits.run();
        fill_result(res, bits, p, pts, cfg);
    } else {
        BranchAndBound bb(pts, cfg.k, cfg.d_min, cfg.metric, cfg.time_limit);
        seed(bb);
        bb.run();
        fill_result(res, bb, p, pts, cfg);
    }
    res.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    return res;
}

std::vector<FrontierPoint> exact_frontier(const Portfolio& p, const SelectionConfig& cfg,
                                          std::vector<double> distances, const ExactOptions& options) {
    std::sort(distances.begin(), distances.end());
    distances.erase(std::unique(distances.begin(), distances.end()), distances.end());
    std::vector<FrontierPoint> out;
    std::optional<std::size_t> cover;  // index into `out` of the latest real solve
    bool infeasible_from_here = false;
    for (double d : distances) {
        if (infeasible_from_here) {
            ExactResult r;
            r.status = ExactStatus::Infeasible;
            r.lower_bound = kInf;
            out.push_back({d, r});
            continue;
        }
        if (cover) {
            const ExactResult& prev = out[*cover].result;
            if (prev.status == ExactStatus::Optimal && d <= prev.batch->min_distance) {
                ExactResult r = prev;
                r.nodes = 0;
                r.seconds = 0.0;
                out.push_back({d, r});
                continue;
            }
        }
        SelectionConfig c = cfg;
        c.d_min = d;
        out.push_back({d, exact_select(p, c, options)});
        cover = out.size() - 1;
        if (out.back().result.status == ExactStatus::Infeasible) infeasible_from_here = true;
    }
    return out;
}

}  // namespace divsel
