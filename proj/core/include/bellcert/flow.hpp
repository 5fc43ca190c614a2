#pragma once

// Ornstein-Uhlenbeck flows on the one-dimensional Gauss space.
//
// Spectral side: L hhat_n = -n hhat_n, and on one-forms the Hodge Laplacian
// acts on the dx-coefficients as L - 1, so slot m has eigenvalue -(m + 1).
//
// Kernel side, for arbitrary pointwise functions (weights):
//   e^{sL} f(x) = int f(x e^{-s} + sqrt(1 - e^{-2s}) y) dgamma(y)      (Mehler)
//   P_t f = pi^{-1/2} int_0^inf u^{-1/2} e^{-u} e^{(t^2/4u) L} f du     (subordination)
// The u-integral is computed in y = log u by the trapezoid rule after the
// mean int f dgamma has been subtracted, so the integrand decays
// double-exponentially at both ends.

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <type_traits>
#include <vector>

#include "bellcert/hermite.hpp"
#include "bellcert/quadrature.hpp"
#include "bellcert/weight.hpp"

namespace bellcert::gauss {

inline constexpr int kDefaultTruncation = 32;
inline constexpr int kUnweightedQuadOrder = 80;
inline constexpr int kExpQuadOrder = 160;
inline constexpr int kDefaultSubordinationNodes = 120;

/// 80 for weights without an exponential factor, 160 otherwise.
int default_quad_order(const WeightSpec& w);

enum class SemigroupMode { Heat, Poisson, PoissonOneForm, HeatOneForm };

/// Diagonal action: heat e^{-nt}, poisson e^{-t sqrt(n)}. One-form modes are rejected.
HermiteFunction semigroup_apply(const HermiteFunction& f, double t, SemigroupMode mode);
/// Diagonal action on one-forms: poisson_oneform e^{-t sqrt(m+1)}, heat_oneform e^{-(m+1)t}.
OneForm semigroup_apply(const OneForm& g, double t, SemigroupMode mode);

/// d (-L)^{-1/2}: slot m receives c_{m+1}; constants are annihilated.
OneForm riesz_apply(const HermiteFunction& f);

/// int u v w dgamma by Gauss-Hermite of the given order.
double weighted_inner(const HermiteFunction& u, const HermiteFunction& v, const WeightSpec& w,
                      int quad_order);
double weighted_inner(const OneForm& u, const OneForm& v, const WeightSpec& w, int quad_order);

/// Mehler average e^{sL} f(x) for a callable returning double or std::array<double, K>.
template <class F>
auto mehler_average(const F& f, double x, double s, const GaussRule& rule) {
  const double decay = std::exp(-s);
  const double spread = std::sqrt(-std::expm1(-2.0 * s));
  using R = decltype(f(x));
  R acc{};
  for (std::size_t j = 0; j < rule.size(); ++j) {
    const R v = f(x * decay + spread * rule.nodes[j]);
    if constexpr (std::is_arithmetic_v<R>) {
      acc += rule.weights[j] * v;
    } else {
      for (std::size_t k = 0; k < acc.size(); ++k) acc[k] += rule.weights[j] * v[k];
    }
  }
  return acc;
}

/// Heat times s_k and weights w_k such that
///   P_t f(x) ~ m + sum_k w_k (e^{s_k L} f(x) - m),   m = int f dgamma.
class Subordinator {
 public:
  Subordinator(double t, int nodes = kDefaultSubordinationNodes);

  double t() const { return t_; }
  const std::vector<double>& heat_times() const { return times_; }
  const std::vector<double>& weights() const { return weights_; }

 private:
  double t_;
  std::vector<double> times_;
  std::vector<double> weights_;
};

/// Poisson semigroup applied to a pointwise function (double or std::array result).
template <class F>
auto poisson_apply(const F& f, double x, const Subordinator& sub, const GaussRule& rule) {
  using R = decltype(f(x));
  if (sub.t() == 0.0) return f(x);
  const R mean = mehler_average(f, 0.0, std::numeric_limits<double>::infinity(), rule);
  R acc = mean;
  const auto& times = sub.heat_times();
  const auto& weights = sub.weights();
  for (std::size_t k = 0; k < times.size(); ++k) {
    const R g = mehler_average(f, x, times[k], rule);
    if constexpr (std::is_arithmetic_v<R>) {
      acc += weights[k] * (g - mean);
    } else {
      for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += weights[k] * (g[i] - mean[i]);
    }
  }
  return acc;
}

/// One-form Poisson flow of the dx-coefficient field G (no mean subtraction:
/// e^{s Hodge} G = e^{-s} e^{sL} G decays on its own).
template <class F>
double oneform_poisson_apply(const F& g, double x, const Subordinator& sub, const GaussRule& rule) {
  if (sub.t() == 0.0) return g(x);
  double acc = 0.0;
  const auto& times = sub.heat_times();
  const auto& weights = sub.weights();
  for (std::size_t k = 0; k < times.size(); ++k) {
    acc += weights[k] * std::exp(-times[k]) * mehler_average(g, x, times[k], rule);
  }
  return acc;
}

/// P_t w (x). quad_order 0 selects default_quad_order(w).
double poisson_weight(const WeightSpec& w, double x, double t, int quad_order = 0,
                      int sub_nodes = kDefaultSubordinationNodes);

/// Discretization of the (x, t) half-space for sup computations.
struct FlowGrid {
  std::vector<double> x_nodes;
  std::vector<double> t_nodes;
  int sub_nodes = kDefaultSubordinationNodes;

  /// x in [-8, 8] step 0.25; t log-spaced on [1e-3, 32] with 40 nodes.
  static FlowGrid standard();
  /// Throws DomainError unless x is symmetric about 0 and t strictly increasing, positive.
  void validate() const;
};

struct Q2Result {
  double value = 0.0;       // lower bound of the sup
  double argmax_x = 0.0;
  double argmax_t = 0.0;    // +inf when the t -> infinity limit attains the max
  bool at_limit = false;
  double limit_value = 0.0; // (int w dgamma)(int w^{-1} dgamma)
  double grid_max = 0.0;
};

/// max over the grid of P_t w(x) P_t w^{-1}(x), and the t -> infinity limit.
Q2Result q2_characteristic(const WeightSpec& w, const FlowGrid& grid, int quad_order = 0);

}  // namespace bellcert::gauss
