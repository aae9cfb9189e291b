#include "divsel/records_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "divsel/portfolio.hpp"

namespace divsel {

std::string records_to_csv(const std::vector<TradeoffRecord>& records) {
    std::string out = "iter,dmin,loss";
    const std::size_t k = records.empty() ? 0 : records.front().batch.indices.size();
    for (std::size_t i = 1; i <= k; ++i) out += ",idx_" + std::to_string(i);
    out += '\n';
    for (const auto& r : records) {
        out += std::to_string(r.iteration);
        out += ',';
        out += format_double(r.min_distance);
        out += ',';
        out += format_double(r.loss);
        for (auto idx : r.batch.indices) {
            out += ',';
            out += std::to_string(idx);
        }
        out += '\n';
    }
    return out;
}

void write_records_csv(const std::vector<TradeoffRecord>& records, const std::filesystem::path& path) {
    write_file_atomic(path, records_to_csv(records));
}

std::vector<TradeoffRecord> read_records_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(in, line)) throw ParseError(1, "empty records file");
    ++lineno;
    if (line.rfind("iter,dmin,loss", 0) != 0) throw ParseError(1, "unexpected records header");
    std::vector<TradeoffRecord> out;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) fields.push_back(tok);
        if (fields.size() < 3) throw ParseError(lineno, "too few fields");
        TradeoffRecord r;
        auto parse_num = [&](const std::string& s, auto& v) {
            auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
            if (ec != std::errc() || ptr != s.data() + s.size())
                throw ParseError(lineno, "cannot parse '" + s + "'");
        };
        parse_num(fields[0], r.iteration);
        parse_num(fields[1], r.min_distance);
        parse_num(fields[2], r.loss);
        for (std::size_t i = 3; i < fields.size(); ++i) {
            std::size_t idx = 0;
            parse_num(fields[i], idx);
            r.batch.indices.push_back(idx);
        }
        r.batch.min_distance = r.min_distance;
        r.batch.loss = r.loss;
        out.push_back(std::move(r));
    }
    return out;
}

nlohmann::json exact_result_to_json(const ExactResult& r, std::size_t k, double d_min, bool verified,
                                    const DistanceDistribution* dist) {
    nlohmann::json j;
    j["status"] = to_string(r.status);
    j["k"] = k;
    j["d_min"] = d_min;
    j["nodes"] = r.nodes;
    j["seconds"] = r.seconds;
    if (r.batch) {
        j["indices"] = r.batch->indices;
        j["loss"] = r.batch->loss;
        j["min_distance"] = r.batch->min_distance;
        j["verified"] = verified;
    } else {
        j["indices"] = nlohmann::json::array();
        j["loss"] = nullptr;
        j["min_distance"] = nullptr;
        j["verified"] = false;
    }
    if (r.status == ExactStatus::TimeLimit) {
        j["lower_bound"] = std::isfinite(r.lower_bound) ? nlohmann::json(r.lower_bound) : nlohmann::json();
        j["gap"] = std::isfinite(r.gap) ? nlohmann::json(r.gap) : nlohmann::json();
    }
    if (dist) j["pairwise_distances"] = dist->distances;
    return j;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace divsel
