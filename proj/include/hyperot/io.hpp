#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyperot/dmk.hpp"
#include "hyperot/temporal.hpp"

namespace hyperot {

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: parent directories are created.
void write_file(const std::filesystem::path& path, std::string_view contents);

/// Shortest decimal form that round-trips (std::to_chars).
std::string format_number(double v);

/// FNV-1a 64-bit, lower-case hex.
std::string content_hash(std::string_view bytes);

/// Pretty-printed JSON with sorted keys and a trailing newline.
std::string dump_json(const nlohmann::json& j);

/// Trace CSV: t,beta,run_id,property,s,value
std::string trace_csv(const std::vector<PropertyTrace>& traces, const std::string& run_id);
/// Property rows without run id: t,beta,property,s,value
std::string property_csv(const std::vector<PropertyTrace>& traces);

struct AggregateSeries {
  std::string property;
  int s = 0;
  double beta = 0.0;
  std::vector<AggregateRow> rows;
};

/// t,beta,property,s,mean,std,n
std::string aggregate_csv(const std::vector<AggregateSeries>& series);

nlohmann::json to_json(const ConvergenceReport& report);

/// Flat little-endian snapshot file: "HOMU", u32 triangles, u32 steps, then
/// per step i32 time_index followed by the float64 conductivities.
std::string encode_snapshots(const std::vector<ConductivityField>& fields);
std::vector<ConductivityField> decode_snapshots(std::string_view bytes);

}  // namespace hyperot
