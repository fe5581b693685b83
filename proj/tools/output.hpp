#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace hausloss::cli {

/// Shortest round-trip decimal form; "inf", "-inf", "nan" for non-finite values.
std::string format_double(double v);

class Csv {
 public:
  explicit Csv(std::vector<std::string> header);

  Csv& row() {
    rows_.emplace_back();
    return *this;
  }
  Csv& operator<<(double v);
  Csv& operator<<(int v);
  Csv& operator<<(long long v);
  Csv& operator<<(const std::string& v);
  Csv& operator<<(const char* v) { return *this << std::string(v); }

  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// Writes to a sibling temporary file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& content);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

std::string utc_timestamp();

}  // namespace hausloss::cli
