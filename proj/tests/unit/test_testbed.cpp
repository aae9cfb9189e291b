#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <vector>

#include "divsel/portfolio.hpp"
#include "divsel/rng.hpp"
#include "divsel/selection.hpp"
#include "divsel/testbed.hpp"

namespace fs = std::filesystem;
using namespace divsel;

namespace {

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / "divsel_test_testbed";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& p, const std::string& s) {
    std::ofstream out(p);
    out << s;
}

}  // namespace

TEST_CASE("sphere and rastrigin values") {
    const auto sphere = make_function("f1-sphere", 2);
    CHECK(sphere.evaluate(std::vector<double>{0.0, 0.0}) == 0.0);
    CHECK(sphere.evaluate(std::vector<double>{1.0, 2.0}) == 5.0);

    const auto rast = make_function("f3-rastrigin-separable", 3);
    CHECK(rast.evaluate(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);

    Rng rng(11);
    for (int i = 0; i < 100; ++i) {
        std::vector<double> x = {rng.uniform(-5, 5), rng.uniform(-5, 5), rng.uniform(-5, 5)};
        double ref = 30.0;
        for (double v : x) ref += v * v - 10.0 * std::cos(2.0 * std::numbers::pi * v);
        CHECK(rast.evaluate(x) == doctest::Approx(ref).epsilon(1e-12));
    }
}

TEST_CASE("rosenbrock optimum and formula") {
    const auto f = make_function("f8-rosenbrock", 4);
    CHECK(f.f_opt() == 0.0);
    CHECK(f.evaluate(std::vector<double>{1, 1, 1, 1}) == 0.0);
    const std::vector<double> x = {0.5, -1.0, 2.0, 0.0};
    double ref = 0.0;
    for (int i = 0; i < 3; ++i)
        ref += 100.0 * std::pow(x[i + 1] - x[i] * x[i], 2) + std::pow(1.0 - x[i], 2);
    CHECK(f.evaluate(x) == doctest::Approx(ref).epsilon(1e-14));
}

TEST_CASE("evaluate rejects bad input") {
    const auto f = make_function("f1-sphere", 2);
    CHECK_THROWS_AS(f.evaluate(std::vector<double>{0.0}), EvaluationError);
    CHECK_THROWS_AS(f.evaluate(std::vector<double>{5.5, 0.0}), EvaluationError);
    CHECK(f.evaluate(std::vector<double>{5.0, -5.0}) == 50.0);
    CHECK_THROWS(make_function("no-such-function", 2));
    CHECK_THROWS(make_function("f8-rosenbrock", 1));
}

TEST_CASE("every function stays above its optimum and attains it") {
    for (const auto& desc : list_functions()) {
        for (std::size_t dim : {2u, 5u, 10u}) {
            if (!supports_dimension(desc, dim)) continue;
            CAPTURE(desc.id);
            CAPTURE(dim);
            const auto f = make_function(desc.id, dim);
            CHECK(f.id() == desc.id);
            CHECK(f.group() == desc.group);
            CHECK(f.dimension() == dim);
            CHECK(f.box_diameter() == doctest::Approx(10.0 * std::sqrt(double(dim))));
            REQUIRE(f.argmin().has_value());
            CHECK(f.in_bounds(*f.argmin()));
            CHECK(std::abs(f.evaluate(*f.argmin()) - f.f_opt()) <= 1e-12);

            Rng rng(1000 + dim);
            std::vector<double> x(dim);
            double lowest = std::numeric_limits<double>::infinity();
            for (int probe = 0; probe < 10000; ++probe) {
                for (auto& v : x) v = rng.uniform(-5.0, 5.0);
                const double y = f.evaluate(x);
                const double again = f.evaluate(x);
                REQUIRE(std::isfinite(y));
                REQUIRE(y == again);
                lowest = std::min(lowest, y);
            }
            CHECK(lowest >= f.f_opt() - 1e-12);
        }
    }
}

TEST_CASE("catalog contents") {
    const auto fs = list_functions();
    std::set<std::string> ids;
    std::set<int> groups;
    bool sphere_g1 = false, ellipsoid_g3 = false;
    for (const auto& d : fs) {
        ids.insert(d.id);
        groups.insert(static_cast<int>(d.group));
        if (d.id == "f1-sphere" && d.group == FunctionGroup::Separable) sphere_g1 = true;
        if (d.id.find("ellipsoid") != std::string::npos && d.group == FunctionGroup::HighConditioningUnimodal)
            ellipsoid_g3 = true;
    }
    CHECK(ids.size() == fs.size());
    CHECK(sphere_g1);
    CHECK(ellipsoid_g3);
    CHECK(groups == std::set<int>{1, 2, 3, 4, 5});
}

TEST_CASE("gallagher optimum is the tallest peak") {
    std::vector<GaussianPeak> peaks = {
        {{1.0, 1.0}, 4.0, 1.0},
        {{-2.0, 3.0}, 9.5, 2.0},
        {{3.0, -3.0}, 7.0, 0.5},
    };
    const auto f = make_gallagher("g", peaks, {{-5, 5}, {-5, 5}});
    CHECK(f.f_opt() == doctest::Approx(10.0 - 9.5));
    REQUIRE(f.argmin());
    CHECK((*f.argmin())[0] == -2.0);
    CHECK((*f.argmin())[1] == 3.0);
    CHECK(f.evaluate(*f.argmin()) == doctest::Approx(0.5).epsilon(1e-12));

    peaks[1].center = {7.0, 0.0};
    CHECK_THROWS(make_gallagher("g", peaks, {{-5, 5}, {-5, 5}}));
}

TEST_CASE("portfolio round trip") {
    const auto f = make_function("f1-sphere", 2);
    const auto p = Portfolio::evaluate(f, {0.1, 0.2, -3.3, 4.4, 1.0 / 3.0, -0.0}, {"uniform", "f1-sphere", 7});
    const auto path = scratch("roundtrip.csv");
    save_portfolio(p, path);
    const auto q = load_portfolio(path);
    CHECK(q == p);
    CHECK(q.consistent_with(f));
}

TEST_CASE("parse errors name the line") {
    const auto path = scratch("bad.csv");
    write_text(path, "dim=2\n0,0,0\n1,2,3,4\n");
    try {
        load_portfolio(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    write_text(path, "dim=2\n0,0,0\n1,nan,1\n");
    try {
        load_portfolio(path);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }

    write_text(path, "dimension two\n0,0,0\n");
    CHECK_THROWS_AS(load_portfolio(path), ParseError);
}

TEST_CASE("external trajectory feeds selection") {
    const auto path = scratch("external.csv");
    write_text(path, "dim=2\n# sampler=external function=f1-sphere seed=0\n0,0,0\n1,0,1\n0,2,4\n3,0,9\n");
    const auto p = load_portfolio(path);
    CHECK(p.provenance().sampler_id == "external");
    CHECK(p.size() == 4);
    const auto b = initial_batch(p, 2);
    CHECK(b.indices == std::vector<std::size_t>{0, 1});
    CHECK(verify_batch(p, b, 1.0));
}
