#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "divsel/experiment.hpp"
#include "divsel/records_io.hpp"
#include "divsel/selection.hpp"

namespace fs = std::filesystem;
using namespace divsel;

namespace {

fs::path fresh_dir(const std::string& name) {
    auto dir = fs::temp_directory_path() / "divsel_test_experiment" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

ExperimentPlan small_plan(const fs::path& dir) {
    ExperimentPlan plan;
    plan.functions = {"f1-sphere"};
    plan.dimensions = {2};
    plan.samplers = {"uniform"};
    plan.budgets = {1000};
    plan.batch_sizes = {5};
    plan.seeds = {0, 1};
    plan.output_dir = dir;
    return plan;
}

bool has_issue(const std::vector<PlanIssue>& v, PlanIssue::Severity s, const std::string& needle) {
    for (const auto& i : v)
        if (i.severity == s && i.message.find(needle) != std::string::npos) return true;
    return false;
}

}  // namespace

TEST_CASE("plan validation") {
    ExperimentPlan plan;
    CHECK(validate_plan(plan).empty());

    plan.budgets = {10};
    plan.batch_sizes = {20};
    CHECK(has_issue(validate_plan(plan), PlanIssue::Severity::Error, "exceeds budget"));

    plan = {};
    plan.dimensions = {2};
    plan.exact_dmins = {15.0};
    CHECK(has_issue(validate_plan(plan), PlanIssue::Severity::Error, "box diameter"));
    plan.exact_dmins = {14.0};
    CHECK_FALSE(has_errors(validate_plan(plan)));

    plan = {};
    plan.budgets = {1000000};
    plan.exact_dmins = {1.0};
    const auto issues = validate_plan(plan);
    CHECK_FALSE(has_errors(issues));
    CHECK(has_issue(issues, PlanIssue::Severity::Warning, "time limit"));

    plan = {};
    plan.functions = {"f8-rosenbrock"};
    plan.dimensions = {1};
    CHECK(has_errors(validate_plan(plan)));

    plan = {};
    plan.seeds.clear();
    CHECK(has_errors(validate_plan(plan)));
}

TEST_CASE("job expansion") {
    ExperimentPlan plan;
    const auto jobs = expand_jobs(plan);
    // Sobol' contributes one job per remaining combination.
    CHECK(jobs.size() == 3 * 2 * 2 * (10 + 10 + 1));
    std::set<std::string> ids;
    for (const auto& j : jobs) ids.insert(j.id());
    CHECK(ids.size() == jobs.size());

    const auto& a = jobs.front();
    auto b = a;
    b.seed_index += 1;
    CHECK(portfolio_seed(plan, a) != portfolio_seed(plan, b));
    CHECK(config_hash(plan, a) != config_hash(plan, b));
    CHECK(config_hash(plan, a) == config_hash(plan, a));
    auto other = plan;
    other.iterations = 10;
    CHECK(config_hash(plan, a) != config_hash(other, a));
}

TEST_CASE("run plan, resume and report") {
    const auto dir = fresh_dir("contract");
    const auto plan = small_plan(dir);
    const auto m = run_plan(plan);
    REQUIRE(m.jobs.size() == 2);
    CHECK(m.completed() == 2);
    for (const auto& j : m.jobs) {
        CHECK(j.executed);
        CHECK(fs::exists(dir / "jobs" / j.job_id / "records.csv"));
        const auto rec = read_records_csv(dir / "jobs" / j.job_id / "records.csv");
        const auto p = load_portfolio(dir / "jobs" / j.job_id / "portfolio.csv");
        CHECK(p.size() == 1000);
        for (const auto& r : rec) CHECK(verify_batch(p, make_batch(p, r.batch.indices, 0.0), r.min_distance));
    }
    CHECK(fs::exists(dir / "curves.csv"));
    CHECK(fs::exists(dir / "manifest.json"));
    const auto curves = slurp(dir / "curves.csv");

    const auto again = run_plan(plan);
    CHECK(again.completed() == 2);
    for (const auto& j : again.jobs) CHECK_FALSE(j.executed);
    CHECK(slurp(dir / "curves.csv") == curves);

    const auto loaded = load_manifest(dir / "manifest.json");
    REQUIRE(loaded.jobs.size() == 2);
    CHECK(loaded.jobs[0].config_hash == m.jobs[0].config_hash);

    const auto s = report(dir / "manifest.json", {0.5, 1.0, 15.0});
    CHECK(s.completed == 2);
    CHECK(s.failed == 0);
    REQUIRE(s.rows.size() == 3);
    CHECK(s.rows[0].run_count == 2);
    CHECK(s.rows[2].unreached == 2);
    CHECK(fs::exists(dir / "aggregate.csv"));

    // Changing the configuration re-executes everything.
    auto changed = plan;
    changed.iterations = 50;
    for (const auto& j : run_plan(changed).jobs) CHECK(j.executed);
}

TEST_CASE("failed jobs are recorded, not fatal") {
    const auto dir = fresh_dir("failure");
    auto plan = small_plan(dir);
    const auto jobs = expand_jobs(plan);
    fs::create_directories(dir / "jobs");
    std::ofstream(dir / "jobs" / jobs[1].id()) << "blocker";
    const auto m = run_plan(plan);
    CHECK(m.completed() == 1);
    CHECK(m.failed() == 1);
    CHECK_FALSE(m.jobs[1].error.empty());
    const auto s = report(dir / "manifest.json", {1.0});
    CHECK(s.completed == 1);
    CHECK(s.failed == 1);
    REQUIRE(s.rows.size() == 1);
    CHECK(s.rows[0].run_count == 1);

    fs::remove(dir / "jobs" / jobs[1].id());
    const auto fixed = run_plan(plan);
    CHECK(fixed.completed() == 2);
    CHECK_FALSE(fixed.jobs[0].executed);
    CHECK(fixed.jobs[1].executed);
}

TEST_CASE("exact checkpoints") {
    const auto dir = fresh_dir("exact");
    auto plan = small_plan(dir);
    plan.budgets = {2000};
    plan.seeds = {0};
    plan.exact_dmins = {1.0, 3.0};
    const auto m = run_plan(plan);
    REQUIRE(m.completed() == 1);
    for (const char* name : {"exact_d1.json", "exact_d3.json"}) {
        std::ifstream in(dir / "jobs" / m.jobs[0].job_id / name);
        REQUIRE(in);
        const auto j = nlohmann::json::parse(in);
        CHECK(j["status"] == "optimal");
        CHECK(j["verified"] == true);
        CHECK(j["indices"].size() == 5);
        CHECK(j["min_distance"].get<double>() >= j["d_min"].get<double>());
    }
    const auto dist = slurp(dir / "dist_stats.csv");
    CHECK(std::count(dist.begin(), dist.end(), '\n') == 3);
}

TEST_CASE("empty report") {
    const auto dir = fresh_dir("empty");
    CHECK(report(dir / "manifest.json", {1.0}).empty());
    save_manifest({}, dir / "manifest.json");
    CHECK(report(dir / "manifest.json", {1.0}).empty());
    CHECK_FALSE(fs::exists(dir / "aggregate.csv"));
}

TEST_CASE("records csv round trip") {
    const Portfolio p(1, {0.0, 0.1, 1.0, 2.0}, {0.0, 0.01, 1.0, 4.0}, {});
    SelectionConfig cfg;
    cfg.k = 2;
    const auto rec = greedy_sweep(p, cfg);
    const auto dir = fresh_dir("records");
    write_records_csv(rec, dir / "r.csv");
    const auto back = read_records_csv(dir / "r.csv");
    REQUIRE(back.size() == rec.size());
    for (std::size_t i = 0; i < rec.size(); ++i) {
        CHECK(back[i].iteration == rec[i].iteration);
        CHECK(back[i].min_distance == rec[i].min_distance);
        CHECK(back[i].loss == rec[i].loss);
        CHECK(back[i].batch.indices == rec[i].batch.indices);
    }
    CHECK(records_to_csv(rec).rfind("iter,dmin,loss,idx_1,idx_2\n", 0) == 0);
}

TEST_CASE("worker count from the environment") {
    ::setenv("DIVSEL_WORKERS", "3", 1);
    CHECK(workers_from_env(1) == 3);
    ::setenv("DIVSEL_WORKERS", "zero", 1);
    CHECK(workers_from_env(2) == 2);
    ::unsetenv("DIVSEL_WORKERS");
    CHECK(workers_from_env(0) == 1);
}

TEST_CASE("parallel and serial runs agree") {
    const auto a = fresh_dir("serial");
    const auto b = fresh_dir("parallel");
    auto plan = small_plan(a);
    plan.samplers = {"uniform", "sobol", "cmaes"};
    plan.budgets = {300};
    run_plan(plan);
    plan.output_dir = b;
    plan.workers = 3;
    run_plan(plan);
    CHECK(slurp(a / "curves.csv") == slurp(b / "curves.csv"));
}
