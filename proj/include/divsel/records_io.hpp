#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "divsel/analysis.hpp"
#include "divsel/selection.hpp"

namespace divsel {

// Greedy records: header `iter,dmin,loss,idx_1,...,idx_k`, one row per record.
std::string records_to_csv(const std::vector<TradeoffRecord>& records);
void write_records_csv(const std::vector<TradeoffRecord>& records, const std::filesystem::path& path);

/// Reads (iter, dmin, loss, indices) back; `batch` fields are filled from the
/// row, not recomputed.
std::vector<TradeoffRecord> read_records_csv(const std::filesystem::path& path);

nlohmann::json exact_result_to_json(const ExactResult& r, std::size_t k, double d_min,
                                    bool verified, const DistanceDistribution* dist = nullptr);

/// Writes `content` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace divsel
