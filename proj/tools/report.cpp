#include "report.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <ostream>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace secrelay::cli {

nlohmann::json Manifest::to_json() const {
  return {{"version", version},   {"command", command},   {"scenario", scenario_path},
          {"scenario_fnv1a", scenario_hash}, {"settings", settings}, {"timestamp", timestamp}};
}

void Manifest::write_comment(std::ostream& os) const {
  os << "# secrelay " << version << '\n';
  os << "# command: " << command << '\n';
  os << "# scenario: " << scenario_path << " (fnv1a " << scenario_hash << ")\n";
  os << "# settings: " << settings << '\n';
  os << "# timestamp: " << timestamp << '\n';
}

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char ch : bytes) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return fmt::format("{:016x}", h);
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
}

std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{:.9g}", x);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    const std::string& f = fields[i];
    if (f.find_first_of(",\"\r\n") == std::string::npos) {
      os_ << f;
      continue;
    }
    os_ << '"';
    for (char ch : f) {
      if (ch == '"') os_ << '"';
      os_ << ch;
    }
    os_ << '"';
  }
  os_ << '\n';
}

}  // namespace secrelay::cli
