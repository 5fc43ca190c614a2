#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace bellcert {

using Json = nlohmann::json;

/// One aggregated property check. `skipped` counts inputs where the check
/// could not be evaluated; they are included in `count`.
struct CheckRecord {
  std::string name;
  std::int64_t count = 0;
  std::int64_t failures = 0;
  std::int64_t skipped = 0;
  std::optional<double> worst_margin;  // smallest margin seen; < 0 means violated
  Json argmax_location = nullptr;      // where worst_margin was attained
  bool informational = false;          // failures are reported, not asserted

  void observe(double margin, bool failed, const Json& location);
  void skip() {
    ++count;
    ++skipped;
  }
  void merge(const CheckRecord& other);
  bool ok() const { return informational || failures == 0; }
};

struct VerificationReport {
  std::string tool_version = BELLCERT_VERSION;
  Json config_echo = Json::object();
  std::vector<CheckRecord> checks;
  Json results = Json::object();
  std::string timestamp;

  bool passed() const;
  const CheckRecord* find(std::string_view name) const;
};

void to_json(Json& j, const CheckRecord& c);
void from_json(const Json& j, CheckRecord& c);
void to_json(Json& j, const VerificationReport& r);
void from_json(const Json& j, VerificationReport& r);

/// Current UTC time, ISO-8601 with seconds ("2026-01-01T00:00:00Z").
std::string utc_timestamp();

/// Non-finite doubles become JSON null (JSON has no inf/nan).
Json finite_or_null(double v);

}  // namespace bellcert
