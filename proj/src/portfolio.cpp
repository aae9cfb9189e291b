#include "divsel/portfolio.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

namespace divsel {

Portfolio::Portfolio(std::size_t dimension, std::vector<double> coords, std::vector<double> fitness,
                     Provenance provenance)
    : dimension_(dimension),
      coords_(std::move(coords)),
      fitness_(std::move(fitness)),
      provenance_(std::move(provenance)) {
    if (dimension_ == 0) throw std::invalid_argument("portfolio dimension must be positive");
    if (fitness_.empty()) throw std::invalid_argument("portfolio must contain at least one point");
    if (coords_.size() != fitness_.size() * dimension_)
        throw std::invalid_argument("portfolio coordinate count does not match T * D");
    for (double v : coords_)
        if (!std::isfinite(v)) throw std::invalid_argument("portfolio contains non-finite coordinate");
    for (double v : fitness_)
        if (!std::isfinite(v)) throw std::invalid_argument("portfolio contains non-finite fitness");
}

Portfolio Portfolio::evaluate(const ObjectiveFunction& fn, std::vector<double> coords,
                              Provenance provenance) {
    const std::size_t d = fn.dimension();
    if (coords.size() % d != 0) throw std::invalid_argument("coordinate count not a multiple of D");
    std::vector<double> fitness(coords.size() / d);
    for (std::size_t i = 0; i < fitness.size(); ++i)
        fitness[i] = fn.evaluate(std::span<const double>(coords.data() + i * d, d));
    if (provenance.function_id.empty()) provenance.function_id = fn.id();
    return Portfolio(d, std::move(coords), std::move(fitness), std::move(provenance));
}

bool Portfolio::consistent_with(const ObjectiveFunction& fn) const {
    if (fn.dimension() != dimension_) return false;
    for (std::size_t i = 0; i < size(); ++i) {
        if (!fn.in_bounds(point(i))) return false;
        if (fn.evaluate(point(i)) != fitness_[i]) return false;
    }
    return true;
}

ParseError::ParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

std::string format_double(double v) {
    char buf[40];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return {buf, res.ptr};
}

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view tok, std::size_t line) {
    tok = trim(tok);
    if (!tok.empty() && tok.front() == '+') tok.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        throw ParseError(line, "cannot parse number '" + std::string(tok) + "'");
    if (!std::isfinite(v)) throw ParseError(line, "non-finite value");
    return v;
}

void parse_provenance(std::string_view body, Provenance& prov, std::size_t line) {
    std::istringstream ss{std::string(body)};
    std::string kv;
    while (ss >> kv) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const auto key = kv.substr(0, eq);
        const auto val = kv.substr(eq + 1);
        if (key == "sampler") {
            prov.sampler_id = val;
        } else if (key == "function") {
            prov.function_id = val;
        } else if (key == "seed") {
            auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), prov.seed);
            if (ec != std::errc() || ptr != val.data() + val.size())
                throw ParseError(line, "invalid seed '" + val + "'");
        }
    }
}

}  // namespace

void save_portfolio(const Portfolio& p, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    const auto& prov = p.provenance();
    out << "dim=" << p.dimension() << '\n';
    out << "# sampler=" << prov.sampler_id;
    if (!prov.function_id.empty()) out << " function=" << prov.function_id;
    out << " seed=" << prov.seed << '\n';
    std::string row;
    for (std::size_t i = 0; i < p.size(); ++i) {
        row.clear();
        for (double v : p.point(i)) {
            row += format_double(v);
            row += ',';
        }
        row += format_double(p.fitness(i));
        row += '\n';
        out << row;
    }
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

Portfolio load_portfolio(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string raw;
    std::size_t line = 0;
    std::size_t dim = 0;
    Provenance prov;
    std::vector<double> coords, fitness;
    while (std::getline(in, raw)) {
        ++line;
        auto s = trim(raw);
        if (s.empty()) continue;
        if (dim == 0) {
            if (s.substr(0, 4) != "dim=") throw ParseError(line, "expected header 'dim=D'");
            auto num = s.substr(4);
            auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), dim);
            if (ec != std::errc() || ptr != num.data() + num.size() || dim == 0)
                throw ParseError(line, "malformed header '" + std::string(s) + "'");
            continue;
        }
        if (s.front() == '#') {
            parse_provenance(s.substr(1), prov, line);
            continue;
        }
        std::size_t fields = 0;
        std::size_t start = 0;
        while (true) {
            const auto comma = s.find(',', start);
            const auto tok = s.substr(start, comma == std::string_view::npos ? s.npos : comma - start);
            ++fields;
            if (fields > dim + 1)
                throw ParseError(line, "row has more than " + std::to_string(dim + 1) + " fields");
            const double v = parse_double(tok, line);
            if (fields <= dim) coords.push_back(v);
            else fitness.push_back(v);
            if (comma == std::string_view::npos) break;
            start = comma + 1;
        }
        if (fields != dim + 1)
            throw ParseError(line, "expected " + std::to_string(dim + 1) + " fields, got " +
                                       std::to_string(fields));
    }
    if (dim == 0) throw ParseError(line, "missing header 'dim=D'");
    if (fitness.empty()) throw ParseError(line, "no data rows");
    return Portfolio(dim, std::move(coords), std::move(fitness), std::move(prov));
}

}  // namespace divsel
