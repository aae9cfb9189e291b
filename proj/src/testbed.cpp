#include "divsel/testbed.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "divsel/rng.hpp"

namespace divsel {

ObjectiveFunction::ObjectiveFunction(std::string id, FunctionGroup group, std::size_t dimension,
                                     std::vector<Interval> bounds, double f_opt,
                                     std::optional<std::vector<double>> argmin,
                                     Evaluator evaluator)
    : id_(std::move(id)),
      group_(group),
      dimension_(dimension),
      bounds_(std::move(bounds)),
      f_opt_(f_opt),
      argmin_(std::move(argmin)),
      evaluator_(std::make_shared<const Evaluator>(std::move(evaluator))) {
    if (dimension_ == 0) throw std::invalid_argument("dimension must be positive");
    if (bounds_.size() != dimension_)
        throw std::invalid_argument("bounds size does not match dimension");
    for (const auto& b : bounds_) {
        if (!std::isfinite(b.lo) || !std::isfinite(b.hi) || !(b.lo < b.hi))
            throw std::invalid_argument("bounds must be finite with lo < hi");
    }
    if (argmin_ && argmin_->size() != dimension_)
        throw std::invalid_argument("argmin size does not match dimension");
}

bool ObjectiveFunction::in_bounds(std::span<const double> x) const {
    if (x.size() != dimension_) return false;
    for (std::size_t i = 0; i < dimension_; ++i) {
        if (!(x[i] >= bounds_[i].lo && x[i] <= bounds_[i].hi)) return false;
    }
    return true;
}

double ObjectiveFunction::evaluate(std::span<const double> x) const {
    if (x.size() != dimension_)
        throw EvaluationError(id_ + ": expected dimension " + std::to_string(dimension_) +
                              ", got " + std::to_string(x.size()));
    if (!in_bounds(x)) throw EvaluationError(id_ + ": point outside bounds");
    return (*evaluator_)(x);
}

double ObjectiveFunction::box_diameter() const {
    double s = 0.0;
    for (const auto& b : bounds_) s += (b.hi - b.lo) * (b.hi - b.lo);
    return std::sqrt(s);
}

std::string to_string(FunctionGroup g) {
    switch (g) {
        case FunctionGroup::Separable: return "separable";
        case FunctionGroup::LowModerateConditioning: return "low-moderate-conditioning";
        case FunctionGroup::HighConditioningUnimodal: return "high-conditioning-unimodal";
        case FunctionGroup::MultimodalGlobalStructure: return "multimodal-global-structure";
        case FunctionGroup::MultimodalWeakStructure: return "multimodal-weak-structure";
    }
    return "unknown";
}

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<Interval> default_box(std::size_t d) { return std::vector<Interval>(d, Interval{}); }

// Fixed orthogonal matrix per dimension (QR of a seeded Gaussian matrix).
Eigen::MatrixXd fixed_rotation(std::size_t d) {
    Rng rng(0x5eed0f0f00000000ULL + d);
    Eigen::MatrixXd g(d, d);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    return q;
}

std::vector<double> rotate(const Eigen::MatrixXd& r, std::span<const double> x) {
    const auto n = static_cast<Eigen::Index>(x.size());
    Eigen::Map<const Eigen::VectorXd> v(x.data(), n);
    Eigen::VectorXd z = r * v;
    return {z.data(), z.data() + n};
}

double ellipsoid_coefficient(std::size_t i, std::size_t d) {
    if (d == 1) return 1.0;
    return std::pow(1e6, static_cast<double>(i) / static_cast<double>(d - 1));
}

double rastrigin_sum(std::span<const double> z) {
    // Each term is non-negative, so the sum never dips below the optimum.
    double s = 0.0;
    for (double v : z) s += v * v + 10.0 * (1.0 - std::cos(kTwoPi * v));
    return s;
}

// Oscillation transformation used by the attractive-sector landscape.
double t_osz(double x) {
    if (x == 0.0) return 0.0;
    const double xh = std::log(std::abs(x));
    const double c1 = x > 0 ? 10.0 : 5.5;
    const double c2 = x > 0 ? 7.9 : 3.1;
    const double sgn = x > 0 ? 1.0 : -1.0;
    return sgn * std::exp(xh + 0.049 * (std::sin(c1 * xh) + std::sin(c2 * xh)));
}

struct CatalogEntry {
    FunctionDescriptor descriptor;
    ObjectiveFunction (*factory)(std::size_t d);
};

ObjectiveFunction sphere(std::size_t d) {
    return {"f1-sphere", FunctionGroup::Separable, d, default_box(d), 0.0,
            std::vector<double>(d, 0.0), [](std::span<const double> x) {
                double s = 0.0;
                for (double v : x) s += v * v;
                return s;
            }};
}

ObjectiveFunction ellipsoid_separable(std::size_t d) {
    return {"f2-ellipsoid-separable", FunctionGroup::Separable, d, default_box(d), 0.0,
            std::vector<double>(d, 0.0), [d](std::span<const double> x) {
                double s = 0.0;
                for (std::size_t i = 0; i < d; ++i) s += ellipsoid_coefficient(i, d) * x[i] * x[i];
                return s;
            }};
}

ObjectiveFunction rastrigin_separable(std::size_t d) {
    return {"f3-rastrigin-separable", FunctionGroup::Separable, d, default_box(d), 0.0,
            std::vector<double>(d, 0.0), [](std::span<const double> x) { return rastrigin_sum(x); }};
}

ObjectiveFunction attractive_sector(std::size_t d) {
    // Optimum at (1, ..., 1); directions pointing away from the origin are
    // penalised by a factor of 100.
    return {"f6-attractive-sector", FunctionGroup::LowModerateConditioning, d, default_box(d), 0.0,
            std::vector<double>(d, 1.0), [](std::span<const double> x) {
                double s = 0.0;
                for (double v : x) {
                    const double z = v - 1.0;
                    const double scaled = z > 0.0 ? 100.0 * z : z;
                    s += scaled * scaled;
                }
                return std::pow(t_osz(s), 0.9);
            }};
}

ObjectiveFunction rosenbrock(std::size_t d) {
    return {"f8-rosenbrock", FunctionGroup::LowModerateConditioning, d, default_box(d), 0.0,
            std::vector<double>(d, 1.0), [](std::span<const double> x) {
                double s = 0.0;
                for (std::size_t i = 0; i + 1 < x.size(); ++i) {
                    const double a = x[i] * x[i] - x[i + 1];
                    const double b = x[i] - 1.0;
                    s += 100.0 * a * a + b * b;
                }
                return s;
            }};
}

ObjectiveFunction ellipsoid_rotated(std::size_t d) {
    auto r = fixed_rotation(d);
    return {"f10-ellipsoid-rotated", FunctionGroup::HighConditioningUnimodal, d, default_box(d), 0.0,
            std::vector<double>(d, 0.0), [r, d](std::span<const double> x) {
                const auto z = rotate(r, x);
                double s = 0.0;
                for (std::size_t i = 0; i < d; ++i) s += ellipsoid_coefficient(i, d) * z[i] * z[i];
                return s;
            }};
}

ObjectiveFunction sharp_ridge(std::size_t d) {
    return {"f13-sharp-ridge", FunctionGroup::HighConditioningUnimodal, d, default_box(d), 0.0,
            std::vector<double>(d, 0.0), [](std::span<const double> x) {
                double tail = 0.0;
                for (std::size_t i = 1; i < x.size(); ++i) tail += x[i] * x[i];
                return x[0] * x[0] + 100.0 * std::sqrt(tail);
            }};
}

ObjectiveFunction rastrigin_rotated(std::size_t d) {
    auto r = fixed_rotation(d);
    return {"f15-rastrigin-rotated", FunctionGroup::MultimodalGlobalStructure, d, default_box(d), 0.0,
            std::vector<double>(d, 0.0),
            [r](std::span<const double> x) { return rastrigin_sum(rotate(r, x)); }};
}

ObjectiveFunction schaffer(std::size_t d) {
    return {"f17-schaffer", FunctionGroup::MultimodalGlobalStructure, d, default_box(d), 0.0,
            std::vector<double>(d, 0.0), [](std::span<const double> x) {
                const std::size_t n = x.size();
                double acc = 0.0;
                for (std::size_t i = 0; i + 1 < n; ++i) {
                    const double s = std::sqrt(x[i] * x[i] + x[i + 1] * x[i + 1]);
                    const double r = std::sqrt(s);
                    const double w = std::sin(50.0 * std::pow(s, 0.2));
                    acc += r + r * w * w;
                }
                const double m = acc / static_cast<double>(n - 1);
                return m * m;
            }};
}

ObjectiveFunction gallagher(std::size_t d) {
    return make_gallagher("f21-gallagher", default_gallagher_peaks(d), default_box(d));
}

ObjectiveFunction double_funnel(std::size_t d) {
    // Lunacek bi-Rastrigin with funnels centred at +2.5 and mu1 < 0.
    const double mu0 = 2.5;
    const double dd = static_cast<double>(d);
    const double s = 1.0 - 1.0 / (2.0 * std::sqrt(dd + 20.0) - 8.2);
    const double mu1 = -std::sqrt((mu0 * mu0 - 1.0) / s);
    return {"f24-double-funnel", FunctionGroup::MultimodalWeakStructure, d, default_box(d), 0.0,
            std::vector<double>(d, mu0), [=](std::span<const double> x) {
                double a = 0.0, b = 0.0, osc = 0.0;
                for (double v : x) {
                    a += (v - mu0) * (v - mu0);
                    b += (v - mu1) * (v - mu1);
                    osc += 1.0 - std::cos(kTwoPi * (v - mu0));
                }
                return std::min(a, dd + s * b) + 10.0 * osc;
            }};
}

const std::vector<CatalogEntry>& catalog() {
    using G = FunctionGroup;
    static const std::vector<CatalogEntry> entries = {
        {{"f1-sphere", G::Separable, 1, 0, "0 at origin"}, sphere},
        {{"f2-ellipsoid-separable", G::Separable, 1, 0, "0 at origin"}, ellipsoid_separable},
        {{"f3-rastrigin-separable", G::Separable, 1, 0, "0 at origin"}, rastrigin_separable},
        {{"f6-attractive-sector", G::LowModerateConditioning, 1, 0, "0 at (1,...,1)"},
         attractive_sector},
        {{"f8-rosenbrock", G::LowModerateConditioning, 2, 0, "0 at (1,...,1)"}, rosenbrock},
        {{"f10-ellipsoid-rotated", G::HighConditioningUnimodal, 2, 0, "0 at origin"},
         ellipsoid_rotated},
        {{"f13-sharp-ridge", G::HighConditioningUnimodal, 2, 0, "0 at origin"}, sharp_ridge},
        {{"f15-rastrigin-rotated", G::MultimodalGlobalStructure, 2, 0, "0 at origin"},
         rastrigin_rotated},
        {{"f17-schaffer", G::MultimodalGlobalStructure, 2, 0, "0 at origin"}, schaffer},
        {{"f21-gallagher", G::MultimodalWeakStructure, 1, 0,
          "10 - tallest peak height, at that peak's centre"},
         gallagher},
        {{"f24-double-funnel", G::MultimodalWeakStructure, 1, 0, "0 at (2.5,...,2.5)"},
         double_funnel},
    };
    return entries;
}

}  // namespace

std::vector<FunctionDescriptor> list_functions() {
    std::vector<FunctionDescriptor> out;
    for (const auto& e : catalog()) out.push_back(e.descriptor);
    return out;
}

bool supports_dimension(const FunctionDescriptor& d, std::size_t dimension) {
    return dimension >= d.min_dimension && (d.max_dimension == 0 || dimension <= d.max_dimension);
}

ObjectiveFunction make_function(const std::string& id, std::size_t dimension) {
    for (const auto& e : catalog()) {
        if (e.descriptor.id != id) continue;
        if (!supports_dimension(e.descriptor, dimension))
            throw std::invalid_argument(id + " does not support dimension " +
                                        std::to_string(dimension));
        return e.factory(dimension);
    }
    throw std::invalid_argument("unknown function id: " + id);
}

std::vector<GaussianPeak> default_gallagher_peaks(std::size_t dimension) {
    Rng rng(0x6a11a6e7ULL + dimension);
    std::vector<GaussianPeak> peaks;
    for (int i = 0; i < 21; ++i) {
        GaussianPeak p;
        p.center.resize(dimension);
        for (auto& c : p.center) c = rng.uniform(-4.0, 4.0);
        if (i == 0) {
            p.height = 10.0;
            p.width = 1.0;
        } else {
            p.height = 1.1 + 8.0 * (i - 1) / 19.0;
            p.width = std::pow(10.0, (i - 1) / 19.0);
        }
        peaks.push_back(std::move(p));
    }
    return peaks;
}

ObjectiveFunction make_gallagher(std::string id, std::vector<GaussianPeak> peaks,
                                 std::vector<Interval> bounds) {
    if (peaks.empty()) throw std::invalid_argument("gallagher: empty peak list");
    const std::size_t d = bounds.size();
    std::size_t best = 0;
    for (std::size_t i = 0; i < peaks.size(); ++i) {
        if (peaks[i].center.size() != d)
            throw std::invalid_argument("gallagher: peak centre dimension mismatch");
        if (!(peaks[i].height > 0.0) || !(peaks[i].width > 0.0))
            throw std::invalid_argument("gallagher: heights and widths must be positive");
        if (peaks[i].height > peaks[best].height) best = i;
    }
    for (std::size_t j = 0; j < d; ++j) {
        const double c = peaks[best].center[j];
        if (!(c >= bounds[j].lo && c <= bounds[j].hi))
            throw std::invalid_argument("gallagher: tallest peak lies outside the bounds");
    }
    // 10 - max_i h_i exp(...) >= 10 - max_i h_i, with equality at the tallest centre.
    const double f_opt = 10.0 - peaks[best].height;
    auto argmin = peaks[best].center;
    const double two_d = 2.0 * static_cast<double>(d);
    return {std::move(id), FunctionGroup::MultimodalWeakStructure, d, std::move(bounds), f_opt,
            std::move(argmin), [peaks = std::move(peaks), two_d](std::span<const double> x) {
                double top = 0.0;
                for (const auto& p : peaks) {
                    double r2 = 0.0;
                    for (std::size_t j = 0; j < x.size(); ++j) {
                        const double t = x[j] - p.center[j];
                        r2 += t * t;
                    }
                    top = std::max(top, p.height * std::exp(-p.width * r2 / two_d));
                }
                return 10.0 - top;
            }};
}

}  // namespace divsel
