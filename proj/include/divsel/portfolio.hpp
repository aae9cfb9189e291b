#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "divsel/testbed.hpp"

namespace divsel {

struct Provenance {
    std::string sampler_id = "external";
    std::string function_id;
    std::uint64_t seed = 0;

    bool operator==(const Provenance&) const = default;
};

/// Ordered set of T evaluated points in D dimensions. Points are stored
/// row-major in one contiguous buffer.
class Portfolio {
public:
    /// Raw construction from already-evaluated data (e.g. a loaded file).
    /// Requires T >= 1, rows of length D, finite values.
    Portfolio(std::size_t dimension, std::vector<double> coords, std::vector<double> fitness,
              Provenance provenance);

    /// Evaluates every point with `fn`; rejects out-of-bounds points.
    static Portfolio evaluate(const ObjectiveFunction& fn, std::vector<double> coords,
                              Provenance provenance);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return fitness_.size(); }

    std::span<const double> point(std::size_t i) const {
        return {coords_.data() + i * dimension_, dimension_};
    }
    double fitness(std::size_t i) const { return fitness_[i]; }

    const std::vector<double>& coords() const { return coords_; }
    const std::vector<double>& fitness() const { return fitness_; }
    const Provenance& provenance() const { return provenance_; }

    /// True iff every point is inside fn's box and fitness matches fn exactly.
    bool consistent_with(const ObjectiveFunction& fn) const;

    bool operator==(const Portfolio&) const = default;

private:
    std::size_t dimension_;
    std::vector<double> coords_;
    std::vector<double> fitness_;
    Provenance provenance_;
};

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what);
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

// File layout:
//   dim=D
//   # sampler=<id> function=<id> seed=<n>      (optional)
//   x1,...,xD,f
//   ...
// Values are written with 17 significant digits in the C locale.
void save_portfolio(const Portfolio& p, const std::filesystem::path& path);
Portfolio load_portfolio(const std::filesystem::path& path);

std::string format_double(double v);

}  // namespace divsel
