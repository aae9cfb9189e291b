#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "divsel/portfolio.hpp"
#include "divsel/testbed.hpp"

namespace divsel {

enum class SamplerKind { Uniform, Sobol, Cmaes };

SamplerKind parse_sampler(const std::string& name);
std::string to_string(SamplerKind k);

struct CmaesOptions {
    std::optional<std::size_t> population;     // default 4 + floor(3 ln D)
    std::optional<double> sigma0;              // default (hi - lo) / 5 of the first coordinate
    std::optional<std::vector<double>> mean0;  // default uniform in bounds
    int max_resamples = 100;
};

struct SamplerConfig {
    SamplerKind sampler = SamplerKind::Uniform;
    std::size_t budget = 1000;
    std::uint64_t seed = 0;
    // Leading points of the Sobol' sequence dropped before sampling; the
    // default drops the all-zeros point.
    std::size_t sobol_skip = 1;
    CmaesOptions cmaes;
};

/// Gray-code ordered Sobol' sequence on [0,1)^D with Joe-Kuo direction
/// numbers. Supports D <= max_dimension().
class SobolSequence {
public:
    explicit SobolSequence(std::size_t dimension);

    static constexpr std::size_t max_dimension() { return 21; }

    std::size_t dimension() const { return dimension_; }

    /// Writes the next point into `out` (size D). The first call yields the
    /// all-zeros point.
    void next(std::span<double> out);
    void skip(std::size_t n);

private:
    static constexpr int kBits = 52;

    std::size_t dimension_;
    std::vector<std::uint64_t> directions_;  // D * kBits
    std::vector<std::uint64_t> state_;
    std::uint64_t index_ = 0;
};

Portfolio uniform_sample(const ObjectiveFunction& fn, const SamplerConfig& cfg);
Portfolio sobol_sample(const ObjectiveFunction& fn, const SamplerConfig& cfg);

/// Per-generation diagnostics recorded by the CMA-ES run.
struct CmaesGeneration {
    std::size_t generation;
    double sigma;
    double min_eigenvalue;
    double max_asymmetry;
    bool cholesky_ok;
    double best_so_far;
    double weight_sum;
};

struct CmaesRun {
    Portfolio portfolio;
    std::vector<CmaesGeneration> history;
    std::size_t population;
    double sigma0;
    bool aborted = false;
    std::string diagnostic;
};

/// (mu/mu_w, lambda)-CMA-ES without restarts; records every evaluated
/// point. Throws if the run aborts before one full generation is recorded.
CmaesRun run_cmaes(const ObjectiveFunction& fn, const SamplerConfig& cfg);

Portfolio cmaes_trajectory(const ObjectiveFunction& fn, const SamplerConfig& cfg);

/// Dispatches on cfg.sampler.
Portfolio sample(const ObjectiveFunction& fn, const SamplerConfig& cfg);

}  // namespace divsel
