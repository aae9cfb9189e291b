#include "divsel/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

#include <nlohmann/json.hpp>

#include "divsel/records_io.hpp"
#include "divsel/rng.hpp"
#include "divsel/selection.hpp"
#include "divsel/testbed.hpp"

namespace divsel {

namespace fs = std::filesystem;
using nlohmann::json;

std::string JobSpec::id() const {
    return function_id + "_d" + std::to_string(dimension) + "_" + sampler + "_T" +
           std::to_string(budget) + "_k" + std::to_string(k) + "_s" + std::to_string(seed_index);
}

std::size_t RunManifest::completed() const {
    std::size_t n = 0;
    for (const auto& j : jobs) n += j.status == JobStatus::Completed;
    return n;
}

std::size_t RunManifest::failed() const { return jobs.size() - completed(); }

bool has_errors(const std::vector<PlanIssue>& issues) {
    for (const auto& i : issues)
        if (i.severity == PlanIssue::Severity::Error) return true;
    return false;
}

namespace {

std::string fmt_distance(double d) {
    // Short, filesystem-friendly rendering used in file names.
    std::string s = format_double(d);
    for (auto& c : s)
        if (c == '.') c = 'p';
    return s;
}

const FunctionDescriptor* find_descriptor(const std::vector<FunctionDescriptor>& cat,
                                          const std::string& id) {
    for (const auto& d : cat)
        if (d.id == id) return &d;
    return nullptr;
}

}  // namespace

std::vector<PlanIssue> validate_plan(const ExperimentPlan& plan) {
    std::vector<PlanIssue> out;
    auto error = [&](std::string m) { out.push_back({PlanIssue::Severity::Error, std::move(m)}); };
    auto warn = [&](std::string m) { out.push_back({PlanIssue::Severity::Warning, std::move(m)}); };

    if (plan.functions.empty() || plan.dimensions.empty() || plan.samplers.empty() ||
        plan.budgets.empty() || plan.batch_sizes.empty() || plan.seeds.empty())
        error("plan cross-product is empty");
    if (!(plan.epsilon >= 0.0)) error("epsilon must be >= 0");

    const auto cat = list_functions();
    for (const auto& f : plan.functions) {
        const auto* desc = find_descriptor(cat, f);
        if (!desc) {
            error("unknown function '" + f + "'");
            continue;
        }
        for (auto d : plan.dimensions)
            if (!supports_dimension(*desc, d))
                error(f + " does not support dimension " + std::to_string(d));
    }
    for (const auto& s : plan.samplers) {
        try {
            const auto kind = parse_sampler(s);
            for (auto d : plan.dimensions) {
                if (kind == SamplerKind::Sobol && d > SobolSequence::max_dimension())
                    error("sobol supports at most " + std::to_string(SobolSequence::max_dimension()) +
                          " dimensions, got " + std::to_string(d));
                if (kind == SamplerKind::Cmaes && d > 0) {
                    const auto lambda = 4 + static_cast<std::size_t>(std::floor(3.0 * std::log(double(d))));
                    for (auto t : plan.budgets)
                        if (t < lambda)
                            error("cmaes budget T = " + std::to_string(t) + " below population size " +
                                  std::to_string(lambda) + " in dimension " + std::to_string(d));
                }
            }
        } catch (const std::invalid_argument& e) {
            error(e.what());
        }
    }
    for (auto d : plan.dimensions)
        if (d == 0) error("dimension must be positive");
    for (auto t : plan.budgets) {
        if (t == 0) error("budget must be positive");
        for (auto k : plan.batch_sizes) {
            if (k < 2) error("batch size k must be >= 2");
            if (k > t)
                error("batch size k = " + std::to_string(k) + " exceeds budget T = " + std::to_string(t));
        }
    }
    for (double dmin : plan.exact_dmins) {
        if (!(dmin > 0.0)) error("exact d_min must be > 0");
        for (auto d : plan.dimensions) {
            const double diameter = 10.0 * std::sqrt(static_cast<double>(d));
            if (dmin > diameter)
                error("d_min = " + format_double(dmin) + " exceeds the box diameter " +
                      format_double(diameter) + " in dimension " + std::to_string(d));
        }
    }
    if (!plan.exact_dmins.empty()) {
        for (auto t : plan.budgets) {
            if (t > plan.exact_size_cap) {
                if (std::isfinite(plan.exact_time_limit) && plan.exact_time_limit > 0.0)
                    warn("exact solves on T = " + std::to_string(t) + " exceed the size cap of " +
                         std::to_string(plan.exact_size_cap) + "; they stop after the " +
                         format_double(plan.exact_time_limit) +
                         " s time limit and report the incumbent with its gap");
                else
                    error("exact solves on T = " + std::to_string(t) + " exceed the size cap of " +
                          std::to_string(plan.exact_size_cap) + " and need a finite time limit");
            }
        }
    }
    return out;
}

std::vector<JobSpec> expand_jobs(const ExperimentPlan& plan) {
    std::vector<JobSpec> jobs;
    for (const auto& f : plan.functions)
        for (auto d : plan.dimensions)
            for (const auto& s : plan.samplers)
                for (auto t : plan.budgets)
                    for (auto k : plan.batch_sizes)
                        for (auto seed : plan.seeds) {
                            jobs.push_back({f, d, s, t, k, seed});
                            if (s == "sobol") break;
                        }
    return jobs;
}

std::uint64_t portfolio_seed(const ExperimentPlan& plan, const JobSpec& job) {
    // The batch size is not part of the key: all k share one portfolio.
    const std::string key = job.function_id + "|" + std::to_string(job.dimension) + "|" + job.sampler +
                            "|" + std::to_string(job.budget) + "|" + std::to_string(job.seed_index);
    return derive_seed(plan.master_seed, key);
}

std::string config_hash(const ExperimentPlan& plan, const JobSpec& job) {
    json j = {{"function", job.function_id},
              {"dimension", job.dimension},
              {"sampler", job.sampler},
              {"budget", job.budget},
              {"k", job.k},
              {"seed_index", job.seed_index},
              {"master_seed", plan.master_seed},
              {"iterations", plan.iterations},
              {"epsilon", format_double(plan.epsilon)},
              {"exact_time_limit", format_double(plan.exact_time_limit)}};
    json dmins = json::array();
    for (double d : plan.exact_dmins) dmins.push_back(format_double(d));
    j["exact_dmins"] = dmins;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
    return buf;
}

namespace {

json job_to_json(const JobRecord& r) {
    return {{"job_id", r.job_id},
            {"config_hash", r.config_hash},
            {"seed", r.seed},
            {"outputs", r.outputs},
            {"status", r.status == JobStatus::Completed ? "completed" : "failed"},
            {"wall_time", r.wall_time},
            {"error", r.error},
            {"spec",
             {{"function", r.spec.function_id},
              {"dimension", r.spec.dimension},
              {"sampler", r.spec.sampler},
              {"budget", r.spec.budget},
              {"k", r.spec.k},
              {"seed_index", r.spec.seed_index}}}};
}

JobRecord job_from_json(const json& j) {
    JobRecord r;
    r.job_id = j.at("job_id").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.outputs = j.at("outputs").get<std::vector<std::string>>();
    r.status = j.at("status").get<std::string>() == "completed" ? JobStatus::Completed : JobStatus::Failed;
    r.wall_time = j.at("wall_time").get<double>();
    r.error = j.value("error", "");
    const auto& s = j.at("spec");
    r.spec = {s.at("function").get<std::string>(), s.at("dimension").get<std::size_t>(),
              s.at("sampler").get<std::string>(),  s.at("budget").get<std::size_t>(),
              s.at("k").get<std::size_t>(),        s.at("seed_index").get<std::uint64_t>()};
    return r;
}

CurveMetadata metadata_of(const JobSpec& s) {
    return {s.function_id, s.sampler, s.dimension, s.budget, s.k, s.seed_index};
}

std::string records_path(const JobSpec& s) { return "jobs/" + s.id() + "/records.csv"; }

std::string exact_path(const JobSpec& s, double d) {
    return "jobs/" + s.id() + "/exact_d" + fmt_distance(d) + ".json";
}

void execute_job(const ExperimentPlan& plan, JobRecord& rec) {
    const auto& s = rec.spec;
    const auto root = plan.output_dir;
    const auto dir = root / "jobs" / s.id();
    fs::create_directories(dir);

    const auto fn = make_function(s.function_id, s.dimension);
    SamplerConfig sc;
    sc.sampler = parse_sampler(s.sampler);
    sc.budget = s.budget;
    sc.seed = rec.seed;
    const Portfolio p = sample(fn, sc);
    {
        const auto tmp = dir / "portfolio.csv.tmp";
        save_portfolio(p, tmp);
        fs::rename(tmp, dir / "portfolio.csv");
    }
    rec.outputs.push_back("jobs/" + s.id() + "/portfolio.csv");

    SelectionConfig cfg;
    cfg.k = s.k;
    cfg.iterations = plan.iterations;
    cfg.epsilon = plan.epsilon;
    cfg.f_opt = fn.f_opt();
    const auto records = greedy_sweep(p, cfg);
    write_records_csv(records, root / records_path(s));
    rec.outputs.push_back(records_path(s));

    for (double d : plan.exact_dmins) {
        SelectionConfig ec = cfg;
        ec.d_min = d;
        ec.time_limit = plan.exact_time_limit;
        ExactOptions opts;
        for (const auto& r : records)
            if (r.min_distance >= d) opts.warm_starts.push_back(r.batch.indices);
        const auto res = exact_select(p, ec, opts);
        bool verified = false;
        std::optional<DistanceDistribution> dist;
        if (res.batch) {
            verified = verify_batch(p, *res.batch, d, fn.f_opt());
            dist = pairwise_distance_stats(p, *res.batch, d);
            if (!verified) throw std::runtime_error("exact batch failed verification at d_min " + format_double(d));
        }
        const auto j = exact_result_to_json(res, s.k, d, verified, dist ? &*dist : nullptr);
        write_file_atomic(root / exact_path(s, d), j.dump(2) + "\n");
        rec.outputs.push_back(exact_path(s, d));
    }
}

bool outputs_present(const fs::path& root, const JobRecord& r) {
    for (const auto& o : r.outputs)
        if (!fs::exists(root / o)) return false;
    return !r.outputs.empty();
}

}  // namespace

RunManifest load_manifest(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest " + path.string());
    const json j = json::parse(in);
    RunManifest m;
    for (const auto& e : j.at("jobs")) m.jobs.push_back(job_from_json(e));
    return m;
}

void save_manifest(const RunManifest& m, const fs::path& path) {
    json jobs = json::array();
    for (const auto& r : m.jobs) jobs.push_back(job_to_json(r));
    json j = {{"version", 1}, {"jobs", jobs}};
    write_file_atomic(path, j.dump(2) + "\n");
}

std::size_t workers_from_env(std::size_t fallback) {
    if (const char* v = std::getenv("DIVSEL_WORKERS")) {
        char* end = nullptr;
        const auto n = std::strtoul(v, &end, 10);
        if (end != v && *end == '\0' && n > 0) return n;
    }
    return fallback == 0 ? 1 : fallback;
}

RunManifest run_plan(const ExperimentPlan& plan) {
    const auto issues = validate_plan(plan);
    if (has_errors(issues)) {
        std::string msg = "invalid plan:";
        for (const auto& i : issues)
            if (i.severity == PlanIssue::Severity::Error) msg += "\n  " + i.message;
        throw std::invalid_argument(msg);
    }
    const fs::path root = plan.output_dir;
    fs::create_directories(root / "jobs");
    const auto manifest_path = root / "manifest.json";

    std::map<std::string, JobRecord> previous;
    if (fs::exists(manifest_path)) {
        for (auto& r : load_manifest(manifest_path).jobs) previous[r.job_id] = std::move(r);
    }

    RunManifest manifest;
    for (const auto& spec : expand_jobs(plan)) {
        JobRecord rec;
        rec.spec = spec;
        rec.job_id = spec.id();
        rec.config_hash = config_hash(plan, spec);
        rec.seed = portfolio_seed(plan, spec);
        auto it = previous.find(rec.job_id);
        if (it != previous.end() && it->second.config_hash == rec.config_hash &&
            it->second.status == JobStatus::Completed && outputs_present(root, it->second)) {
            rec = it->second;
            rec.executed = false;
        } else {
            rec.executed = true;
        }
        manifest.jobs.push_back(std::move(rec));
    }

    std::mutex mu;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= manifest.jobs.size()) return;
            auto& rec = manifest.jobs[i];
            if (!rec.executed) continue;
            rec.outputs.clear();
            rec.error.clear();
            const auto t0 = std::chrono::steady_clock::now();
            try {
                execute_job(plan, rec);
                rec.status = JobStatus::Completed;
            } catch (const std::exception& e) {
                rec.status = JobStatus::Failed;
                rec.error = e.what();
            }
            rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::lock_guard lock(mu);
            save_manifest(manifest, manifest_path);
        }
    };
    const std::size_t nworkers = std::min(workers_from_env(plan.workers), manifest.jobs.size());
    if (nworkers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < nworkers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    save_manifest(manifest, manifest_path);

    // Plan-level exports are rebuilt from the per-job files so that resumed
    // and fresh runs produce identical bytes.
    std::vector<TradeoffCurve> curves;
    std::vector<DistanceRow> dist_rows;
    for (const auto& rec : manifest.jobs) {
        if (rec.status != JobStatus::Completed) continue;
        const auto records = read_records_csv(root / records_path(rec.spec));
        curves.push_back(lower_envelope(records, metadata_of(rec.spec)));
        for (double d : plan.exact_dmins) {
            std::ifstream in(root / exact_path(rec.spec, d));
            if (!in) continue;
            const json j = json::parse(in);
            if (!j.contains("pairwise_distances")) continue;
            DistanceRow row;
            row.metadata = metadata_of(rec.spec);
            row.distribution.enforced_d_min = d;
            row.distribution.distances = j["pairwise_distances"].get<std::vector<double>>();
            row.distribution.stats = summarize(row.distribution.distances);
            dist_rows.push_back(std::move(row));
        }
    }
    write_curves_csv(curves, (root / "curves.csv").string());
    write_distance_csv(dist_rows, (root / "dist_stats.csv").string());
    return manifest;
}

ReportSummary report(const fs::path& manifest_path, const std::vector<double>& grid) {
    ReportSummary out;
    if (!fs::exists(manifest_path)) return out;
    const auto m = load_manifest(manifest_path);
    const auto root = manifest_path.parent_path();
    std::vector<TradeoffCurve> curves;
    for (const auto& rec : m.jobs) {
        if (rec.status != JobStatus::Completed) {
            ++out.failed;
            continue;
        }
        ++out.completed;
        curves.push_back(lower_envelope(read_records_csv(root / records_path(rec.spec)), metadata_of(rec.spec)));
    }
    if (!curves.empty()) {
        out.rows = aggregate(curves, grid);
        write_aggregate_csv(out.rows, (root / "aggregate.csv").string());
    }
    return out;
}

}  // namespace divsel
