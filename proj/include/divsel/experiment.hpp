#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "divsel/analysis.hpp"
#include "divsel/samplers.hpp"

namespace divsel {

/// Benchmark matrix: function x dimension x sampler x budget x k x seed.
struct ExperimentPlan {
    std::vector<std::string> functions = {"f1-sphere"};
    std::vector<std::size_t> dimensions = {2, 5, 10};
    std::vector<std::string> samplers = {"uniform", "sobol", "cmaes"};
    std::vector<std::size_t> budgets = {1000, 10000};
    std::vector<std::size_t> batch_sizes = {5, 10};
    std::vector<std::uint64_t> seeds = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    std::uint64_t master_seed = 0;

    std::size_t iterations = 1000;
    double epsilon = 0.0;

    std::vector<double> exact_dmins;  // optional exact checkpoints
    double exact_time_limit = 600.0;  // seconds per exact solve
    std::size_t exact_size_cap = 20000;

    std::vector<double> report_grid = {0.5, 1.0, 3.0, 5.0, 9.0, 15.0};
    std::filesystem::path output_dir = "divsel-out";
    std::size_t workers = 1;
};

struct PlanIssue {
    enum class Severity { Warning, Error } severity;
    std::string message;
};

/// Static checks; never throws.
std::vector<PlanIssue> validate_plan(const ExperimentPlan& plan);
bool has_errors(const std::vector<PlanIssue>& issues);

struct JobSpec {
    std::string function_id;
    std::size_t dimension = 0;
    std::string sampler;
    std::size_t budget = 0;
    std::size_t k = 0;
    std::uint64_t seed_index = 0;

    std::string id() const;
};

/// Jobs in canonical order. Sobol' is deterministic, so it contributes one
/// job per (function, dimension, budget, k), under the first seed.
std::vector<JobSpec> expand_jobs(const ExperimentPlan& plan);

enum class JobStatus { Completed, Failed };

struct JobRecord {
    std::string job_id;
    std::string config_hash;
    std::uint64_t seed = 0;  // derived sampler seed
    std::vector<std::string> outputs;  // paths relative to the output dir
    JobStatus status = JobStatus::Failed;
    double wall_time = 0.0;
    std::string error;
    bool executed = false;  // false when reused from a previous run
    JobSpec spec;
};

struct RunManifest {
    std::vector<JobRecord> jobs;

    std::size_t completed() const;
    std::size_t failed() const;
};

std::uint64_t portfolio_seed(const ExperimentPlan& plan, const JobSpec& job);
std::string config_hash(const ExperimentPlan& plan, const JobSpec& job);

/// Runs (or resumes) the plan. Throws only on plan-level problems (invalid
/// plan, unwritable output directory); job failures land in the manifest.
/// Writes manifest.json, curves.csv and dist_stats.csv into the output dir.
RunManifest run_plan(const ExperimentPlan& plan);

RunManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const RunManifest& m, const std::filesystem::path& path);

struct ReportSummary {
    std::size_t completed = 0;
    std::size_t failed = 0;
    std::vector<AggregateRow> rows;
    bool empty() const { return completed == 0 && failed == 0; }
};

/// Aggregates the completed jobs of a manifest over `grid` and writes
/// aggregate.csv next to the manifest (when there is anything to aggregate).
ReportSummary report(const std::filesystem::path& manifest_path, const std::vector<double>& grid);

/// Worker count from DIVSEL_WORKERS, falling back to `fallback`.
std::size_t workers_from_env(std::size_t fallback);

}  // namespace divsel
