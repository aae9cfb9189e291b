#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "divsel/analysis.hpp"
#include "divsel/experiment.hpp"
#include "divsel/portfolio.hpp"
#include "divsel/samplers.hpp"
#include "divsel/selection.hpp"
#include "divsel/testbed.hpp"

namespace py = pybind11;
using namespace divsel;

namespace {

py::array_t<double> coords_array(const Portfolio& p) {
    py::array_t<double> out({p.size(), p.dimension()});
    std::copy(p.coords().begin(), p.coords().end(), out.mutable_data());
    return out;
}

Portfolio from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> coords,
                      py::array_t<double, py::array::c_style | py::array::forcecast> fitness,
                      const std::string& function_id) {
    if (coords.ndim() != 2) throw std::invalid_argument("coords must be a 2-d array");
    const auto n = static_cast<std::size_t>(coords.shape(0));
    const auto d = static_cast<std::size_t>(coords.shape(1));
    std::vector<double> c(coords.data(), coords.data() + n * d);
    std::vector<double> f(fitness.data(), fitness.data() + fitness.size());
    return Portfolio(d, std::move(c), std::move(f), {"external", function_id, 0});
}

SelectionConfig selection_config(std::size_t k, std::size_t iterations, double epsilon, double d_min,
                                 double time_limit, double f_opt) {
    SelectionConfig cfg;
    cfg.k = k;
    cfg.iterations = iterations;
    cfg.epsilon = epsilon;
    cfg.d_min = d_min;
    cfg.time_limit = time_limit;
    cfg.f_opt = f_opt;
    return cfg;
}

}  // namespace

PYBIND11_MODULE(_divsel, m) {
    m.doc() = "Diversity-constrained batch selection";
    m.attr("__version__") = "0.1.0";

    py::class_<FunctionDescriptor>(m, "FunctionDescriptor")
        .def_readonly("id", &FunctionDescriptor::id)
        .def_readonly("min_dimension", &FunctionDescriptor::min_dimension)
        .def_readonly("max_dimension", &FunctionDescriptor::max_dimension)
        .def_readonly("f_opt_rule", &FunctionDescriptor::f_opt_rule)
        .def_property_readonly("group", [](const FunctionDescriptor& d) { return static_cast<int>(d.group); })
        .def("__repr__", [](const FunctionDescriptor& d) { return "<FunctionDescriptor " + d.id + ">"; });

    py::class_<ObjectiveFunction>(m, "ObjectiveFunction")
        .def_property_readonly("id", &ObjectiveFunction::id)
        .def_property_readonly("dimension", &ObjectiveFunction::dimension)
        .def_property_readonly("f_opt", &ObjectiveFunction::f_opt)
        .def_property_readonly("argmin", &ObjectiveFunction::argmin)
        .def_property_readonly("box_diameter", &ObjectiveFunction::box_diameter)
        .def("__call__", [](const ObjectiveFunction& f, std::vector<double> x) { return f.evaluate(x); },
             py::arg("x"));

    m.def("list_functions", &list_functions);
    m.def("make_function", &make_function, py::arg("id"), py::arg("dimension"));

    py::class_<Portfolio>(m, "Portfolio")
        .def(py::init(&from_arrays), py::arg("coords"), py::arg("fitness"), py::arg("function_id") = "")
        .def("__len__", &Portfolio::size)
        .def_property_readonly("dimension", &Portfolio::dimension)
        .def_property_readonly("coords", &coords_array)
        .def_property_readonly("fitness", [](const Portfolio& p) {
            return py::array_t<double>(std::vector<py::ssize_t>{static_cast<py::ssize_t>(p.size())},
                                       p.fitness().data());
        })
        .def_property_readonly("sampler_id", [](const Portfolio& p) { return p.provenance().sampler_id; })
        .def_property_readonly("function_id", [](const Portfolio& p) { return p.provenance().function_id; })
        .def("save", [](const Portfolio& p, const std::filesystem::path& path) { save_portfolio(p, path); })
        .def_static("load", &load_portfolio, py::arg("path"));

    m.def(
        "sample",
        [](const ObjectiveFunction& fn, const std::string& sampler, std::size_t budget, std::uint64_t seed,
           std::size_t sobol_skip) {
            SamplerConfig cfg;
            cfg.sampler = parse_sampler(sampler);
            cfg.budget = budget;
            cfg.seed = seed;
            cfg.sobol_skip = sobol_skip;
            return sample(fn, cfg);
        },
        py::arg("function"), py::arg("sampler") = "uniform", py::arg("budget") = 1000, py::arg("seed") = 0,
        py::arg("sobol_skip") = 1);

    py::class_<Batch>(m, "Batch")
        .def_readonly("indices", &Batch::indices)
        .def_readonly("min_distance", &Batch::min_distance)
        .def_readonly("loss", &Batch::loss);

    py::class_<TradeoffRecord>(m, "TradeoffRecord")
        .def_readonly("iteration", &TradeoffRecord::iteration)
        .def_readonly("min_distance", &TradeoffRecord::min_distance)
        .def_readonly("loss", &TradeoffRecord::loss)
        .def_readonly("batch", &TradeoffRecord::batch)
        .def_readonly("stalled", &TradeoffRecord::stalled);

    m.def(
        "greedy_sweep",
        [](const Portfolio& p, std::size_t k, std::size_t iterations, double epsilon, double f_opt) {
            return greedy_sweep(p, selection_config(k, iterations, epsilon, 0.0, 0.0, f_opt));
        },
        py::arg("portfolio"), py::arg("k") = 5, py::arg("iterations") = 1000, py::arg("epsilon") = 0.0,
        py::arg("f_opt") = 0.0);

    py::class_<ExactResult>(m, "ExactResult")
        .def_property_readonly("status", [](const ExactResult& r) { return to_string(r.status); })
        .def_readonly("batch", &ExactResult::batch)
        .def_readonly("lower_bound", &ExactResult::lower_bound)
        .def_readonly("gap", &ExactResult::gap)
        .def_readonly("nodes", &ExactResult::nodes)
        .def_readonly("seconds", &ExactResult::seconds);

    m.def(
        "exact_select",
        [](const Portfolio& p, std::size_t k, double d_min, double f_opt, double time_limit,
           std::vector<std::vector<std::size_t>> warm_starts) {
            ExactOptions opts;
            opts.warm_starts = std::move(warm_starts);
            py::gil_scoped_release release;
            return exact_select(p, selection_config(k, 0, 0.0, d_min, time_limit, f_opt), opts);
        },
        py::arg("portfolio"), py::arg("k"), py::arg("d_min"), py::arg("f_opt") = 0.0,
        py::arg("time_limit") = std::numeric_limits<double>::infinity(),
        py::arg("warm_starts") = std::vector<std::vector<std::size_t>>{});

    m.def(
        "verify_batch",
        [](const Portfolio& p, const Batch& b, double d_min, double f_opt) { return verify_batch(p, b, d_min, f_opt); },
        py::arg("portfolio"), py::arg("batch"), py::arg("d_min"), py::arg("f_opt") = 0.0);

    m.def(
        "lower_envelope",
        [](const std::vector<TradeoffRecord>& records) {
            std::vector<std::pair<double, double>> out;
            for (const auto& pt : lower_envelope(records).points) out.emplace_back(pt.min_distance, pt.loss);
            return out;
        },
        py::arg("records"), "Envelope of a sweep as (min_distance, loss) pairs.");

    m.def(
        "interpolate_at",
        [](const std::vector<std::pair<double, double>>& envelope, double d) {
            TradeoffCurve c;
            for (const auto& [x, l] : envelope) c.points.push_back({x, l});
            return interpolate_at(c, d);
        },
        py::arg("envelope"), py::arg("d"));
}
