#include "hyperot/io.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "hyperot/errors.hpp"

namespace hyperot {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) throw IoError("cannot create directory " + path.parent_path().string() + ": " + ec.message());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for writing " + path.string());
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path.string());
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc()) return "nan";
  return std::string(buf.data(), ptr);
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(h));
  return buf.data();
}

std::string dump_json(const nlohmann::json& j) {
  // nlohmann::json objects are std::map backed, so keys are already sorted
  return j.dump(1, ' ') + "\n";
}

std::string trace_csv(const std::vector<PropertyTrace>& traces, const std::string& run_id) {
  std::string out = "t,beta,run_id,property,s,value\n";
  for (const auto& tr : traces) {
    for (const auto& pt : tr.values) {
      out += std::to_string(pt.t) + "," + format_number(tr.beta) + "," + run_id + "," + tr.name + "," +
             std::to_string(tr.s) + "," + format_number(pt.value) + "\n";
    }
  }
  return out;
}

std::string property_csv(const std::vector<PropertyTrace>& traces) {
  std::string out = "t,beta,property,s,value\n";
  for (const auto& tr : traces) {
    for (const auto& pt : tr.values) {
      out += std::to_string(pt.t) + "," + format_number(tr.beta) + "," + tr.name + "," + std::to_string(tr.s) + "," +
             format_number(pt.value) + "\n";
    }
  }
  return out;
}

std::string aggregate_csv(const std::vector<AggregateSeries>& series) {
  std::string out = "t,beta,property,s,mean,std,n\n";
  for (const auto& s : series) {
    for (const auto& r : s.rows) {
      out += std::to_string(r.t) + "," + format_number(s.beta) + "," + s.property + "," + std::to_string(s.s) + "," +
             format_number(r.mean) + "," + format_number(r.std) + "," + std::to_string(r.n) + "\n";
    }
  }
  return out;
}

nlohmann::json to_json(const ConvergenceReport& report) {
  nlohmann::json props = nlohmann::json::object();
  for (const auto& [k, v] : report.t_property) props[k] = v;
  return {{"p", report.p}, {"t_cost", report.t_cost}, {"t_property", std::move(props)}};
}

namespace {

static_assert(std::endian::native == std::endian::little, "snapshot codec assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

template <typename T>
T take(std::string_view bytes, std::size_t& pos) {
  if (pos + sizeof(T) > bytes.size()) throw IoError("snapshot file truncated");
  T v;
  std::memcpy(&v, bytes.data() + pos, sizeof(T));
  pos += sizeof(T);
  return v;
}

}  // namespace

std::string encode_snapshots(const std::vector<ConductivityField>& fields) {
  std::string out = "HOMU";
  const auto n_tri = static_cast<std::uint32_t>(fields.empty() ? 0 : fields.front().mu.size());
  put<std::uint32_t>(out, n_tri);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(fields.size()));
  for (const auto& f : fields) {
    if (f.mu.size() != n_tri) throw IoError("snapshots have inconsistent sizes");
    put<std::int32_t>(out, f.time_index);
    for (double m : f.mu) put<double>(out, m);
  }
  return out;
}

std::vector<ConductivityField> decode_snapshots(std::string_view bytes) {
  if (bytes.substr(0, 4) != "HOMU") throw IoError("not a conductivity snapshot file");
  std::size_t pos = 4;
  const auto n_tri = take<std::uint32_t>(bytes, pos);
  const auto n_steps = take<std::uint32_t>(bytes, pos);
  std::vector<ConductivityField> fields(n_steps);
  for (auto& f : fields) {
    f.time_index = take<std::int32_t>(bytes, pos);
    f.mu.resize(n_tri);
    for (auto& m : f.mu) m = take<double>(bytes, pos);
  }
  return fields;
}

}  // namespace hyperot
