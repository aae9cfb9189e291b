// divsel command-line interface.
//
// Exit codes: 0 success, 1 usage error, 2 partial failure (or nothing to
// report), 3 internal error.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "divsel/analysis.hpp"
#include "divsel/experiment.hpp"
#include "divsel/portfolio.hpp"
#include "divsel/records_io.hpp"
#include "divsel/samplers.hpp"
#include "divsel/selection.hpp"
#include "divsel/testbed.hpp"

namespace {

constexpr int kUsage = 1;
constexpr int kPartial = 2;
constexpr int kInternal = 3;

struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

double resolve_f_opt(const divsel::Portfolio& p, std::optional<double> given) {
    if (given) return *given;
    const auto& id = p.provenance().function_id;
    for (const auto& d : divsel::list_functions()) {
        if (d.id == id && divsel::supports_dimension(d, p.dimension()))
            return divsel::make_function(id, p.dimension()).f_opt();
    }
    std::cerr << "warning: unknown function '" << id << "', using f_opt = 0 (pass --f-opt)\n";
    return 0.0;
}

// Fills options of `sub` not given on the command line from a TOML file.
void apply_config(CLI::App& sub, const std::string& path) {
    for (const auto& item : CLI::ConfigTOML().from_file(path)) {
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents[0] == sub.get_name()))
            throw UsageError("unknown section in " + path + ": " + item.parents[0]);
        if (item.name == "--" || item.name == "++") continue;
        auto* opt = sub.get_option_no_throw("--" + item.name);
        if (!opt) throw UsageError("unknown key in " + path + ": " + item.name);
        if (opt->count() > 0) continue;
        opt->clear();
        for (const auto& v : item.inputs) opt->add_result(v);
        opt->run_callback();
    }
}

int cmd_list_functions() {
    for (const auto& d : divsel::list_functions()) {
        nlohmann::json j;
        j["id"] = d.id;
        j["group"] = static_cast<int>(d.group);
        j["group_name"] = divsel::to_string(d.group);
        j["dimension_range"] = {d.min_dimension,
                                d.max_dimension == 0 ? nlohmann::json() : nlohmann::json(d.max_dimension)};
        j["f_opt_rule"] = d.f_opt_rule;
        std::cout << j.dump() << '\n';
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Diversity-constrained batch selection from optimization portfolios"};
    app.require_subcommand(1);

    app.add_subcommand("list-functions", "Print the function catalog as JSON lines");

    // sample
    auto* sample = app.add_subcommand("sample", "Generate a portfolio");
    std::string sampler = "uniform", function_id = "f1-sphere", sample_out;
    std::size_t budget = 1000, dim = 2, sobol_skip = 1;
    std::uint64_t seed = 0;
    std::optional<std::size_t> popsize;
    std::optional<double> sigma0;
    sample->add_option("--sampler", sampler, "uniform|sobol|cmaes")
        ->check(CLI::IsMember({"uniform", "sobol", "cmaes"}));
    sample->add_option("--budget", budget, "Portfolio size T")->check(CLI::PositiveNumber);
    sample->add_option("--seed", seed, "64-bit seed");
    sample->add_option("--dim", dim, "Dimension D")->check(CLI::PositiveNumber);
    sample->add_option("--function", function_id, "Function id (see list-functions)");
    sample->add_option("--sobol-skip", sobol_skip, "Leading Sobol' points to drop");
    sample->add_option("--popsize", popsize, "CMA-ES population size");
    sample->add_option("--sigma0", sigma0, "CMA-ES initial step size");
    sample->add_option("--out", sample_out, "Output portfolio CSV")->required();

    // greedy
    auto* greedy = app.add_subcommand("greedy", "Greedy diversity sweep over a portfolio");
    std::string greedy_in, greedy_out;
    std::size_t greedy_k = 5, iters = 1000;
    double eps = 0.0;
    std::optional<double> greedy_fopt;
    greedy->add_option("--portfolio", greedy_in, "Portfolio CSV")->required()->check(CLI::ExistingFile);
    greedy->add_option("--k", greedy_k, "Batch size")->check(CLI::Range(2, 1 << 30));
    greedy->add_option("--iters", iters, "Iteration budget M");
    greedy->add_option("--eps", eps, "Required distance gain per step")->check(CLI::NonNegativeNumber);
    greedy->add_option("--f-opt", greedy_fopt, "Optimum value (default: from the function catalog)");
    greedy->add_option("--out", greedy_out, "Output records CSV")->required();

    // exact
    auto* exact = app.add_subcommand("exact", "Exact branch-and-bound batch selection");
    std::string exact_in, exact_out, warm_records;
    std::size_t exact_k = 5;
    double dmin = 1.0, time_limit = std::numeric_limits<double>::infinity();
    std::optional<double> exact_fopt;
    exact->add_option("--portfolio", exact_in, "Portfolio CSV")->required()->check(CLI::ExistingFile);
    exact->add_option("--k", exact_k, "Batch size")->check(CLI::Range(2, 1 << 30));
    exact->add_option("--dmin", dmin, "Enforced minimum distance")->required()->check(CLI::PositiveNumber);
    exact->add_option("--time-limit", time_limit, "Wall-clock limit in seconds")->check(CLI::PositiveNumber);
    exact->add_option("--f-opt", exact_fopt, "Optimum value (default: from the function catalog)");
    exact->add_option("--warm-start", warm_records, "Greedy records CSV used to seed the incumbent")
        ->check(CLI::ExistingFile);
    exact->add_option("--out", exact_out, "Output batch JSON")->required();

    // run-plan
    auto* run = app.add_subcommand("run-plan", "Run (or resume) an experiment plan");
    std::string plan_file;
    run->add_option("--config", plan_file, "Plan file (TOML key = value; flags override)")
        ->check(CLI::ExistingFile);
    divsel::ExperimentPlan plan;
    std::string out_dir = plan.output_dir.string();
    run->add_option("--functions", plan.functions)->capture_default_str();
    run->add_option("--dimensions", plan.dimensions)->capture_default_str();
    run->add_option("--samplers", plan.samplers)->capture_default_str();
    run->add_option("--budgets", plan.budgets)->capture_default_str();
    run->add_option("--batch-sizes", plan.batch_sizes)->capture_default_str();
    run->add_option("--seeds", plan.seeds)->capture_default_str();
    run->add_option("--master-seed", plan.master_seed)->capture_default_str();
    run->add_option("--iters", plan.iterations)->capture_default_str();
    run->add_option("--eps", plan.epsilon)->capture_default_str();
    run->add_option("--exact-dmins", plan.exact_dmins);
    run->add_option("--exact-time-limit", plan.exact_time_limit)->capture_default_str();
    run->add_option("--exact-size-cap", plan.exact_size_cap)->capture_default_str();
    run->add_option("--report-grid", plan.report_grid)->capture_default_str();
    run->add_option("--workers", plan.workers, "Worker threads (DIVSEL_WORKERS overrides)")
        ->capture_default_str();
    run->add_option("--out-dir", out_dir)->capture_default_str();

    // report
    auto* rep = app.add_subcommand("report", "Aggregate a finished plan");
    std::string report_dir = plan.output_dir.string();
    std::vector<double> grid = plan.report_grid;
    rep->add_option("--out-dir", report_dir, "Plan output directory")->capture_default_str();
    rep->add_option("--grid", grid, "Enforced distances to aggregate at")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (app.got_subcommand("list-functions")) return cmd_list_functions();

        if (sample->parsed()) {
            const auto fn = divsel::make_function(function_id, dim);
            divsel::SamplerConfig cfg;
            cfg.sampler = divsel::parse_sampler(sampler);
            cfg.budget = budget;
            cfg.seed = seed;
            cfg.sobol_skip = sobol_skip;
            cfg.cmaes.population = popsize;
            cfg.cmaes.sigma0 = sigma0;
            const auto p = divsel::sample(fn, cfg);
            divsel::save_portfolio(p, sample_out);
            std::cerr << "wrote " << p.size() << " points to " << sample_out << '\n';
            return 0;
        }

        if (greedy->parsed()) {
            const auto p = divsel::load_portfolio(greedy_in);
            divsel::SelectionConfig cfg;
            cfg.k = greedy_k;
            cfg.iterations = iters;
            cfg.epsilon = eps;
            cfg.f_opt = resolve_f_opt(p, greedy_fopt);
            const auto records = divsel::greedy_sweep(p, cfg);
            divsel::write_records_csv(records, greedy_out);
            const auto& last = records.back();
            std::cerr << records.size() << " records, final dmin " << divsel::format_double(last.min_distance)
                      << ", loss " << divsel::format_double(last.loss)
                      << (last.stalled ? " (stopped: no feasible swap)" : "") << '\n';
            return 0;
        }

        if (exact->parsed()) {
            const auto p = divsel::load_portfolio(exact_in);
            divsel::SelectionConfig cfg;
            cfg.k = exact_k;
            cfg.d_min = dmin;
            cfg.time_limit = time_limit;
            cfg.f_opt = resolve_f_opt(p, exact_fopt);
            divsel::ExactOptions opts;
            if (!warm_records.empty()) {
                for (const auto& r : divsel::read_records_csv(warm_records))
                    if (r.min_distance >= dmin) opts.warm_starts.push_back(r.batch.indices);
            }
            const auto res = divsel::exact_select(p, cfg, opts);
            bool verified = false;
            std::optional<divsel::DistanceDistribution> dist;
            if (res.batch) {
                verified = divsel::verify_batch(p, *res.batch, dmin, cfg.f_opt);
                dist = divsel::pairwise_distance_stats(p, *res.batch, dmin);
            }
            const auto j = divsel::exact_result_to_json(res, exact_k, dmin, verified, dist ? &*dist : nullptr);
            divsel::write_file_atomic(exact_out, j.dump(2) + "\n");
            std::cerr << divsel::to_string(res.status);
            if (res.batch) std::cerr << ", loss " << divsel::format_double(res.batch->loss);
            std::cerr << '\n';
            if (res.batch && !verified) return kInternal;
            return 0;
        }

        if (run->parsed()) {
            if (!plan_file.empty()) apply_config(*run, plan_file);
            plan.output_dir = out_dir;
            const auto issues = divsel::validate_plan(plan);
            for (const auto& i : issues)
                std::cerr << (i.severity == divsel::PlanIssue::Severity::Error ? "error: " : "warning: ")
                          << i.message << '\n';
            if (divsel::has_errors(issues)) return kUsage;
            const auto m = divsel::run_plan(plan);
            std::size_t executed = 0;
            for (const auto& j : m.jobs) executed += j.executed;
            std::cerr << m.jobs.size() << " jobs: " << m.completed() << " completed, " << m.failed()
                      << " failed, " << executed << " executed this run\n";
            for (const auto& j : m.jobs)
                if (j.status == divsel::JobStatus::Failed) std::cerr << "  " << j.job_id << ": " << j.error << '\n';
            return m.failed() == 0 ? 0 : kPartial;
        }

        if (rep->parsed()) {
            const auto manifest = std::filesystem::path(report_dir) / "manifest.json";
            const auto s = divsel::report(manifest, grid);
            if (s.empty()) {
                std::cerr << "nothing to report in " << report_dir << '\n';
                return kPartial;
            }
            std::cout << "completed " << s.completed << ", failed " << s.failed << '\n';
            std::cout << "function,dimension,sampler,budget,k,d,runs,unreached,median\n";
            for (const auto& r : s.rows) {
                std::cout << r.function_id << ',' << r.dimension << ',' << r.sampler_id << ',' << r.budget
                          << ',' << r.k << ',' << divsel::format_double(r.d) << ',' << r.run_count << ','
                          << r.unreached << ',' << (r.stats ? divsel::format_double(r.stats->median) : "")
                          << '\n';
            }
            return s.failed == 0 ? 0 : kPartial;
        }
    } catch (const CLI::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const divsel::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return kInternal;
    }
    return kUsage;
}
