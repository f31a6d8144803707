#pragma once

#include <map>
#include <string>
#include <vector>

namespace synthograph {

enum class LogLevel { kOff = 0, kError = 1, kWarn = 2, kInfo = 3, kDebug = 4 };

/// One structured record on the diagnostic stream.
struct Diagnostic {
  LogLevel level = LogLevel::kWarn;
  std::string stage;
  std::string kind;
  std::string doc_id;
  std::string message;
};

/// Collects diagnostics and mirrors them to stderr as JSON lines when the
/// record's level is within the threshold read from SYNTHOGRAPH_LOG.
class Diagnostics {
 public:
  Diagnostics();
  explicit Diagnostics(LogLevel threshold) : threshold_(threshold) {}

  void emit(Diagnostic d);
  void warn(std::string stage, std::string kind, std::string doc_id, std::string message);
  void info(std::string stage, std::string kind, std::string doc_id, std::string message);

  const std::vector<Diagnostic>& records() const { return records_; }
  /// Counts keyed by "stage/kind".
  std::map<std::string, int> counts() const;
  LogLevel threshold() const { return threshold_; }

 private:
  LogLevel threshold_;
  std::vector<Diagnostic> records_;
};

/// Parses "off|error|warn|info|debug" (case-insensitive); unknown → kError.
LogLevel parse_log_level(const std::string& s);
LogLevel log_level_from_env();
std::string to_json_line(const Diagnostic& d);

}  // namespace synthograph
