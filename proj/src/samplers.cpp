#include "divsel/samplers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "divsel/rng.hpp"

namespace divsel {

SamplerKind parse_sampler(const std::string& name) {
    if (name == "uniform") return SamplerKind::Uniform;
    if (name == "sobol") return SamplerKind::Sobol;
    if (name == "cmaes") return SamplerKind::Cmaes;
    throw std::invalid_argument("unknown sampler '" + name + "' (expected uniform|sobol|cmaes)");
}

std::string to_string(SamplerKind k) {
    switch (k) {
        case SamplerKind::Uniform: return "uniform";
        case SamplerKind::Sobol: return "sobol";
        case SamplerKind::Cmaes: return "cmaes";
    }
    return "unknown";
}

namespace {

void check_budget(const SamplerConfig& cfg) {
    if (cfg.budget == 0) throw std::invalid_argument("sampler budget must be >= 1");
}

Provenance provenance_for(const ObjectiveFunction& fn, const SamplerConfig& cfg) {
    return {to_string(cfg.sampler), fn.id(), cfg.seed};
}

}  // namespace

Portfolio uniform_sample(const ObjectiveFunction& fn, const SamplerConfig& cfg) {
    check_budget(cfg);
    const auto& b = fn.bounds();
    const std::size_t d = fn.dimension();
    Rng rng(cfg.seed);
    std::vector<double> coords(cfg.budget * d);
    for (std::size_t i = 0; i < cfg.budget; ++i)
        for (std::size_t j = 0; j < d; ++j) coords[i * d + j] = rng.uniform(b[j].lo, b[j].hi);
    SamplerConfig c = cfg;
    c.sampler = SamplerKind::Uniform;
    return Portfolio::evaluate(fn, std::move(coords), provenance_for(fn, c));
}

Portfolio sobol_sample(const ObjectiveFunction& fn, const SamplerConfig& cfg) {
    check_budget(cfg);
    const auto& b = fn.bounds();
    const std::size_t d = fn.dimension();
    SobolSequence seq(d);
    seq.skip(cfg.sobol_skip);
    std::vector<double> coords(cfg.budget * d);
    std::vector<double> u(d);
    for (std::size_t i = 0; i < cfg.budget; ++i) {
        seq.next(u);
        for (std::size_t j = 0; j < d; ++j) coords[i * d + j] = b[j].lo + (b[j].hi - b[j].lo) * u[j];
    }
    SamplerConfig c = cfg;
    c.sampler = SamplerKind::Sobol;
    c.seed = 0;
    return Portfolio::evaluate(fn, std::move(coords), provenance_for(fn, c));
}

CmaesRun run_cmaes(const ObjectiveFunction& fn, const SamplerConfig& cfg) {
    using Eigen::MatrixXd;
    using Eigen::VectorXd;

    check_budget(cfg);
    const auto n = static_cast<Eigen::Index>(fn.dimension());
    const double nd = static_cast<double>(n);
    const auto& bounds = fn.bounds();

    const std::size_t lambda =
        cfg.cmaes.population.value_or(4 + static_cast<std::size_t>(std::floor(3.0 * std::log(nd))));
    if (lambda < 2) throw std::invalid_argument("cmaes: population size must be >= 2");
    if (cfg.budget < lambda) throw std::invalid_argument("cmaes: budget must be >= population size");
    const double sigma0 = cfg.cmaes.sigma0.value_or((bounds[0].hi - bounds[0].lo) / 5.0);
    if (!(sigma0 > 0.0)) throw std::invalid_argument("cmaes: sigma0 must be positive");

    Rng rng(cfg.seed);

    VectorXd mean(n);
    if (cfg.cmaes.mean0) {
        if (cfg.cmaes.mean0->size() != fn.dimension())
            throw std::invalid_argument("cmaes: initial mean has wrong dimension");
        for (Eigen::Index i = 0; i < n; ++i) mean(i) = (*cfg.cmaes.mean0)[i];
        if (!fn.in_bounds(*cfg.cmaes.mean0)) throw std::invalid_argument("cmaes: initial mean out of bounds");
    } else {
        for (Eigen::Index i = 0; i < n; ++i) mean(i) = rng.uniform(bounds[i].lo, bounds[i].hi);
    }

    // Strategy parameters (canonical defaults).
    const std::size_t mu = lambda / 2;
    VectorXd weights(mu);
    for (std::size_t i = 0; i < mu; ++i)
        weights(i) = std::log(static_cast<double>(mu) + 0.5) - std::log(static_cast<double>(i + 1));
    weights /= weights.sum();
    const double mueff = 1.0 / weights.squaredNorm();
    const double cs = (mueff + 2.0) / (nd + mueff + 5.0);
    const double ds = 1.0 + 2.0 * std::max(0.0, std::sqrt((mueff - 1.0) / (nd + 1.0)) - 1.0) + cs;
    const double cc = (4.0 + mueff / nd) / (nd + 4.0 + 2.0 * mueff / nd);
    const double c1 = 2.0 / ((nd + 1.3) * (nd + 1.3) + mueff);
    const double cmu =
        std::min(1.0 - c1, 2.0 * (mueff - 2.0 + 1.0 / mueff) / ((nd + 2.0) * (nd + 2.0) + mueff));
    const double chi_n = std::sqrt(nd) * (1.0 - 1.0 / (4.0 * nd) + 1.0 / (21.0 * nd * nd));

    double sigma = sigma0;
    MatrixXd cov = MatrixXd::Identity(n, n);
    VectorXd ps = VectorXd::Zero(n), pc = VectorXd::Zero(n);

    const std::size_t generations = (cfg.budget + lambda - 1) / lambda;
    std::vector<double> coords;
    std::vector<double> fitness;
    coords.reserve(cfg.budget * static_cast<std::size_t>(n));
    fitness.reserve(cfg.budget);

    std::vector<CmaesGeneration> history;
    double best = std::numeric_limits<double>::infinity();
    bool aborted = false;
    std::string diagnostic;

    MatrixXd basis = MatrixXd::Identity(n, n);
    VectorXd scales = VectorXd::Ones(n);
    MatrixXd ys(n, static_cast<Eigen::Index>(lambda));
    std::vector<double> gen_fit(lambda);
    std::vector<std::size_t> order(lambda);
    VectorXd z(n), y(n), x(n);

    for (std::size_t g = 0; g < generations && !aborted; ++g) {
        for (std::size_t k = 0; k < lambda; ++k) {
            bool feasible = false;
            for (int attempt = 0; attempt <= cfg.cmaes.max_resamples; ++attempt) {
                for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
                y = basis * scales.cwiseProduct(z);
                x = mean + sigma * y;
                feasible = true;
                for (Eigen::Index i = 0; i < n; ++i)
                    if (!(x(i) >= bounds[i].lo && x(i) <= bounds[i].hi)) feasible = false;
                if (feasible) break;
            }
            if (!feasible) {
                for (Eigen::Index i = 0; i < n; ++i) x(i) = std::clamp(x(i), bounds[i].lo, bounds[i].hi);
                y = (x - mean) / sigma;
            }
            ys.col(static_cast<Eigen::Index>(k)) = y;
            const double f = fn.evaluate(std::span<const double>(x.data(), static_cast<std::size_t>(n)));
            gen_fit[k] = f;
            if (fitness.size() < cfg.budget) {
                coords.insert(coords.end(), x.data(), x.data() + n);
                fitness.push_back(f);
                best = std::min(best, f);
            }
        }

        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return gen_fit[a] < gen_fit[b]; });

        VectorXd yw = VectorXd::Zero(n);
        for (std::size_t i = 0; i < mu; ++i) yw += weights(i) * ys.col(static_cast<Eigen::Index>(order[i]));
        mean += sigma * yw;

        const VectorXd inv_sqrt_yw = basis * scales.cwiseInverse().asDiagonal() * basis.transpose() * yw;
        ps = (1.0 - cs) * ps + std::sqrt(cs * (2.0 - cs) * mueff) * inv_sqrt_yw;
        const double ps_norm = ps.norm();
        const double denom = std::sqrt(1.0 - std::pow(1.0 - cs, 2.0 * static_cast<double>(g + 1)));
        const bool hsig = ps_norm / denom < (1.4 + 2.0 / (nd + 1.0)) * chi_n;
        pc = (1.0 - cc) * pc + (hsig ? std::sqrt(cc * (2.0 - cc) * mueff) : 0.0) * yw;

        MatrixXd rank_mu = MatrixXd::Zero(n, n);
        for (std::size_t i = 0; i < mu; ++i) {
            const auto col = ys.col(static_cast<Eigen::Index>(order[i]));
            rank_mu.noalias() += weights(i) * col * col.transpose();
        }
        const double decay = 1.0 - c1 - cmu + (hsig ? 0.0 : c1 * cc * (2.0 - cc));
        cov = decay * cov + c1 * pc * pc.transpose() + cmu * rank_mu;
        const double asym = (cov - cov.transpose()).cwiseAbs().maxCoeff();
        cov = 0.5 * (cov + cov.transpose()).eval();

        sigma *= std::exp((cs / ds) * (ps_norm / chi_n - 1.0));

        CmaesGeneration rec{};
        rec.generation = g;
        rec.sigma = sigma;
        rec.max_asymmetry = asym;
        rec.best_so_far = best;
        rec.weight_sum = weights.sum();

        if (!cov.allFinite() || !std::isfinite(sigma) || !(sigma > 0.0)) {
            aborted = true;
            diagnostic = "non-finite covariance or step size at generation " + std::to_string(g);
            rec.min_eigenvalue = std::numeric_limits<double>::quiet_NaN();
            rec.cholesky_ok = false;
            history.push_back(rec);
            break;
        }
        Eigen::SelfAdjointEigenSolver<MatrixXd> eig(cov);
        rec.min_eigenvalue = eig.eigenvalues().minCoeff();
        rec.cholesky_ok = cov.llt().info() == Eigen::Success;
        history.push_back(rec);
        if (eig.info() != Eigen::Success || !(rec.min_eigenvalue > 0.0) || !rec.cholesky_ok) {
            aborted = true;
            diagnostic = "covariance lost positive definiteness at generation " + std::to_string(g);
            break;
        }
        basis = eig.eigenvectors();
        scales = eig.eigenvalues().cwiseSqrt();
    }

    if (aborted && fitness.size() < lambda)
        throw std::runtime_error("cmaes: " + diagnostic + " before one generation was recorded");

    SamplerConfig c = cfg;
    c.sampler = SamplerKind::Cmaes;
    Portfolio p(fn.dimension(), std::move(coords), std::move(fitness), provenance_for(fn, c));
    return CmaesRun{std::move(p), std::move(history), lambda, sigma0, aborted, std::move(diagnostic)};
}

Portfolio cmaes_trajectory(const ObjectiveFunction& fn, const SamplerConfig& cfg) {
    return run_cmaes(fn, cfg).portfolio;
}

Portfolio sample(const ObjectiveFunction& fn, const SamplerConfig& cfg) {
    switch (cfg.sampler) {
        case SamplerKind::Uniform: return uniform_sample(fn, cfg);
        case SamplerKind::Sobol: return sobol_sample(fn, cfg);
        case SamplerKind::Cmaes: return cmaes_trajectory(fn, cfg);
    }
    throw std::invalid_argument("unknown sampler");
}

}  // namespace divsel
