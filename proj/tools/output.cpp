#include "output.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>

#include "hausloss/error.hpp"

namespace hausloss::cli {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Csv::Csv(std::vector<std::string> header) : header_(std::move(header)) {}

Csv& Csv::operator<<(double v) {
  rows_.back().push_back(format_double(v));
  return *this;
}

Csv& Csv::operator<<(int v) {
  rows_.back().push_back(std::to_string(v));
  return *this;
}

Csv& Csv::operator<<(long long v) {
  rows_.back().push_back(std::to_string(v));
  return *this;
}

Csv& Csv::operator<<(const std::string& v) {
  rows_.back().push_back(v);
  return *this;
}

std::string Csv::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    require(out.good(), ErrorCode::Io, "cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    require(out.good(), ErrorCode::Io, "failed writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) { write_atomic(path, j.dump(2) + "\n"); }

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace hausloss::cli
