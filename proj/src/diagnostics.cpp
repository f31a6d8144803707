#include "synthograph/diagnostics.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <iostream>

#include <json.hpp>

namespace synthograph {

namespace {

const char* level_name(LogLevel l) {
  switch (l) {
    case LogLevel::kOff: return "off";
    case LogLevel::kError: return "error";
    case LogLevel::kWarn: return "warn";
    case LogLevel::kInfo: return "info";
    case LogLevel::kDebug: return "debug";
  }
  return "warn";
}

}  // namespace

LogLevel parse_log_level(const std::string& s) {
  std::string v = s;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "off" || v == "none" || v == "0") return LogLevel::kOff;
  if (v == "warn" || v == "warning" || v == "2") return LogLevel::kWarn;
  if (v == "info" || v == "3") return LogLevel::kInfo;
  if (v == "debug" || v == "4") return LogLevel::kDebug;
  return LogLevel::kError;
}

LogLevel log_level_from_env() {
  const char* env = std::getenv("SYNTHOGRAPH_LOG");
  return env ? parse_log_level(env) : LogLevel::kError;
}

Diagnostics::Diagnostics() : threshold_(log_level_from_env()) {}

std::string to_json_line(const Diagnostic& d) {
  nlohmann::json j = {{"level", level_name(d.level)},
                      {"stage", d.stage},
                      {"kind", d.kind},
                      {"doc_id", d.doc_id},
                      {"message", d.message}};
  return j.dump();
}

void Diagnostics::emit(Diagnostic d) {
  if (d.level != LogLevel::kOff && static_cast<int>(d.level) <= static_cast<int>(threshold_)) {
    std::cerr << to_json_line(d) << '\n';
  }
  records_.push_back(std::move(d));
}

void Diagnostics::warn(std::string stage, std::string kind, std::string doc_id, std::string message) {
  emit({LogLevel::kWarn, std::move(stage), std::move(kind), std::move(doc_id), std::move(message)});
}

void Diagnostics::info(std::string stage, std::string kind, std::string doc_id, std::string message) {
  emit({LogLevel::kInfo, std::move(stage), std::move(kind), std::move(doc_id), std::move(message)});
}

std::map<std::string, int> Diagnostics::counts() const {
  std::map<std::string, int> out;
  for (const auto& d : records_) ++out[d.stage + "/" + d.kind];
  return out;
}

}  // namespace synthograph
