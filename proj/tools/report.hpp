#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace secrelay::cli {

/// Provenance block written at the top of every CSV and into every summary.
struct Manifest {
  std::string version;
  std::string command;
  std::string scenario_path;
  std::string scenario_hash;
  std::string settings;
  std::string timestamp;

  nlohmann::json to_json() const;
  /// "# key: value" lines; only the timestamp varies between identical runs.
  void write_comment(std::ostream& os) const;
};

/// 64-bit FNV-1a, as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view bytes);

/// UTC, ISO 8601 to the second.
std::string utc_timestamp();

/// 9 significant digits, '.' decimal; "inf" / "nan" for non-finite values.
std::string csv_number(double x);

/// RFC-4180 rows with LF line endings. Fields are quoted only when needed.
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& fields);

 private:
  std::ostream& os_;
};

}  // namespace secrelay::cli
