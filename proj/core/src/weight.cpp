#include "bellcert/weight.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "bellcert/errors.hpp"

namespace bellcert::gauss {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};

std::string format_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw DomainError("weight spec: bad " + std::string(what) + " '" + std::string(text) + "'");
  }
  return v;
}

bool consume(std::string_view& text, std::string_view prefix) {
  if (text.substr(0, prefix.size()) != prefix) return false;
  text.remove_prefix(prefix.size());
  return true;
}

}  // namespace

WeightSpec WeightSpec::constant(double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("constant weight must be > 0");
  return WeightSpec(Constant{c});
}

WeightSpec WeightSpec::exp_linear(double a) {
  if (!std::isfinite(a) || std::abs(a) > kMaxExpSlope) {
    throw DomainError("exp:a weight requires |a| <= 2");
  }
  return WeightSpec(ExpLinear{a});
}

WeightSpec WeightSpec::truncated(const WeightSpec& base, int n) {
  if (n < 1) throw DomainError("truncation level must be >= 1");
  return WeightSpec(Truncated{std::make_shared<const WeightSpec>(base), n});
}

WeightSpec WeightSpec::parse(std::string_view text) {
  std::string_view rest = text;
  if (consume(rest, "const:c=")) return constant(parse_number(rest, "constant"));
  if (consume(rest, "exp:a=")) return exp_linear(parse_number(rest, "slope"));
  if (consume(rest, "trunc:n=")) {
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw DomainError("weight spec: trunc needs an inner weight");
    const std::string_view level = rest.substr(0, colon);
    int n = 0;
    auto [ptr, ec] = std::from_chars(level.data(), level.data() + level.size(), n);
    if (ec != std::errc{} || ptr != level.data() + level.size() || level.empty()) {
      throw DomainError("weight spec: bad truncation level '" + std::string(level) + "'");
    }
    return truncated(parse(rest.substr(colon + 1)), n);
  }
  throw DomainError("weight spec: unknown form '" + std::string(text) + "'");
}

std::string WeightSpec::to_string() const {
  return std::visit(
      Overloaded{
          [](const Constant& k) { return "const:c=" + format_number(k.c); },
          [](const ExpLinear& k) { return "exp:a=" + format_number(k.a); },
          [](const Truncated& k) {
            return "trunc:n=" + std::to_string(k.n) + ":" + k.base->to_string();
          }},
      kind_);
}

double WeightSpec::operator()(double x) const {
  return std::visit(
      Overloaded{[](const Constant& k) { return k.c; },
                 [x](const ExpLinear& k) { return std::exp(k.a * x); },
                 [x](const Truncated& k) {
                   const double n = k.n;
                   return std::clamp((*k.base)(x), 1.0 / n, n);
                 }},
      kind_);
}

WeightSpec WeightSpec::inverse() const {
  return std::visit(
      Overloaded{[](const Constant& k) { return constant(1.0 / k.c); },
                 [](const ExpLinear& k) { return exp_linear(-k.a); },
                 [](const Truncated& k) { return truncated(k.base->inverse(), k.n); }},
      kind_);
}

bool WeightSpec::has_exponential() const {
  return std::visit(Overloaded{[](const Constant&) { return false; },
                               [](const ExpLinear&) { return true; },
                               [](const Truncated& k) { return k.base->has_exponential(); }},
                    kind_);
}

WeightSpec truncate_weight(const WeightSpec& w, int n) { return WeightSpec::truncated(w, n); }

}  // namespace bellcert::gauss
