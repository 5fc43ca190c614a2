#include "bellcert/report.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>

namespace bellcert {

void CheckRecord::observe(double margin, bool failed, const Json& location) {
  ++count;
  if (failed) ++failures;
  if (!worst_margin || margin < *worst_margin) {
    worst_margin = margin;
    argmax_location = location;
  }
}

void CheckRecord::merge(const CheckRecord& other) {
  count += other.count;
  failures += other.failures;
  skipped += other.skipped;
  if (other.worst_margin && (!worst_margin || *other.worst_margin < *worst_margin)) {
    worst_margin = other.worst_margin;
    argmax_location = other.argmax_location;
  }
}

bool VerificationReport::passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckRecord& c) { return c.ok(); });
}

const CheckRecord* VerificationReport::find(std::string_view name) const {
  auto it = std::find_if(checks.begin(), checks.end(),
                         [&](const CheckRecord& c) { return c.name == name; });
  return it == checks.end() ? nullptr : &*it;
}

void to_json(Json& j, const CheckRecord& c) {
  j = Json{{"name", c.name},
           {"count", c.count},
           {"failures", c.failures},
           {"skipped", c.skipped},
           {"worst_margin", c.worst_margin ? finite_or_null(*c.worst_margin) : Json(nullptr)},
           {"argmax_location", c.argmax_location},
           {"informational", c.informational}};
}

void from_json(const Json& j, CheckRecord& c) {
  j.at("name").get_to(c.name);
  j.at("count").get_to(c.count);
  j.at("failures").get_to(c.failures);
  j.at("skipped").get_to(c.skipped);
  const Json& wm = j.at("worst_margin");
  c.worst_margin = wm.is_null() ? std::nullopt : std::optional<double>(wm.get<double>());
  c.argmax_location = j.at("argmax_location");
  c.informational = j.value("informational", false);
}

void to_json(Json& j, const VerificationReport& r) {
  j = Json{{"tool_version", r.tool_version},
           {"timestamp", r.timestamp},
           {"config_echo", r.config_echo},
           {"checks", r.checks},
           {"results", r.results},
           {"passed", r.passed()}};
}

void from_json(const Json& j, VerificationReport& r) {
  j.at("tool_version").get_to(r.tool_version);
  j.at("timestamp").get_to(r.timestamp);
  r.config_echo = j.at("config_echo");
  j.at("checks").get_to(r.checks);
  r.results = j.at("results");
}

std::string utc_timestamp() {
  const std::time_t now =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

Json finite_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

}  // namespace bellcert
