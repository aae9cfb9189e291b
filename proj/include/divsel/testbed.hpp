#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace divsel {

/// Landscape groups of the BBOB taxonomy.
enum class FunctionGroup : int {
    Separable = 1,
    LowModerateConditioning = 2,
    HighConditioningUnimodal = 3,
    MultimodalGlobalStructure = 4,
    MultimodalWeakStructure = 5,
};

struct Interval {
    double lo = -5.0;
    double hi = 5.0;
};

class EvaluationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A named black-box objective on a box with a known global minimum.
///
/// Instances are immutable and cheap to copy (the evaluator is shared).
/// evaluate() rejects inputs of the wrong dimension or outside the box;
/// it never clamps.
class ObjectiveFunction {
public:
    using Evaluator = std::function<double(std::span<const double>)>;

    ObjectiveFunction(std::string id, FunctionGroup group, std::size_t dimension,
                      std::vector<Interval> bounds, double f_opt,
                      std::optional<std::vector<double>> argmin, Evaluator evaluator);

    const std::string& id() const { return id_; }
    FunctionGroup group() const { return group_; }
    std::size_t dimension() const { return dimension_; }
    const std::vector<Interval>& bounds() const { return bounds_; }
    double f_opt() const { return f_opt_; }
    const std::optional<std::vector<double>>& argmin() const { return argmin_; }

    bool in_bounds(std::span<const double> x) const;
    double evaluate(std::span<const double> x) const;

    /// Euclidean diameter of the bounding box.
    double box_diameter() const;

private:
    std::string id_;
    FunctionGroup group_;
    std::size_t dimension_;
    std::vector<Interval> bounds_;
    double f_opt_;
    std::optional<std::vector<double>> argmin_;
    std::shared_ptr<const Evaluator> evaluator_;
};

struct FunctionDescriptor {
    std::string id;
    FunctionGroup group;
    std::size_t min_dimension;
    std::size_t max_dimension;  // 0 = unbounded
    std::string f_opt_rule;
};

/// Built-in catalog of canonical (untransformed) test functions.
std::vector<FunctionDescriptor> list_functions();

/// Instantiates a catalog function on [-5, 5]^dimension.
/// Throws std::invalid_argument for unknown ids or unsupported dimensions.
ObjectiveFunction make_function(const std::string& id, std::size_t dimension);

bool supports_dimension(const FunctionDescriptor& d, std::size_t dimension);

struct GaussianPeak {
    std::vector<double> center;
    double height;
    double width;  // isotropic precision multiplier
};

/// Gallagher-style multi-peak function
///   f(x) = 10 - max_i h_i exp(-w_i |x - c_i|^2 / (2D)).
/// The optimum is taken at the tallest in-bounds peak; the constructor
/// rejects peak lists whose tallest peak lies outside the box.
ObjectiveFunction make_gallagher(std::string id, std::vector<GaussianPeak> peaks,
                                 std::vector<Interval> bounds);

/// Default deterministic 21-peak layout used by the catalog entry.
std::vector<GaussianPeak> default_gallagher_peaks(std::size_t dimension);

std::string to_string(FunctionGroup g);

}  // namespace divsel
