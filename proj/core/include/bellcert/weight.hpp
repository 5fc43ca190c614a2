#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>

namespace bellcert::gauss {

/// Largest |a| accepted for exp:a weights (quadrature reliability).
inline constexpr double kMaxExpSlope = 2.0;

/// A strictly positive weight on R, written in the grammar
///   const:c=<v> | exp:a=<v> | trunc:n=<k>:<inner>
class WeightSpec {
 public:
  struct Constant {
    double c = 1.0;
  };
  struct ExpLinear {
    double a = 0.0;
  };
  struct Truncated {
    std::shared_ptr<const WeightSpec> base;
    int n = 1;
  };
  using Kind = std::variant<Constant, ExpLinear, Truncated>;

  static WeightSpec constant(double c);
  static WeightSpec exp_linear(double a);
  static WeightSpec truncated(const WeightSpec& base, int n);
  /// Throws DomainError on malformed text or out-of-range parameters.
  static WeightSpec parse(std::string_view text);

  /// Round-trips through parse().
  std::string to_string() const;

  double operator()(double x) const;
  /// The weight 1/w, expressed in the same grammar.
  WeightSpec inverse() const;
  bool has_exponential() const;

  const Kind& kind() const { return kind_; }

 private:
  explicit WeightSpec(Kind k) : kind_(std::move(k)) {}
  Kind kind_;
};

/// w clamped pointwise to [1/n, n].
WeightSpec truncate_weight(const WeightSpec& w, int n);

}  // namespace bellcert::gauss
