#include "bellcert/flow.hpp"

#include <algorithm>
#include <numbers>

#include "bellcert/errors.hpp"
#include "parallel.hpp"

namespace bellcert::gauss {

namespace {

// e^{-40} is below double resolution relative to O(1) integrands.
constexpr double kUpperU = 40.0;
constexpr double kLargestHeatTime = 40.0;

void require_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("flow time must be finite and >= 0");
}

template <class Series>
double weighted_inner_impl(const Series& u, const Series& v, const WeightSpec& w, int quad_order) {
  if (quad_order < 2) throw DomainError("quadrature order must be >= 2");
  const GaussRule& rule = gauss_hermite(quad_order);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double x = rule.nodes[i];
    acc += rule.weights[i] * u(x) * v(x) * w(x);
  }
  if (!std::isfinite(acc)) {
    throw NumericalError("weighted inner product is not finite; raise the quadrature order");
  }
  return acc;
}

}  // namespace

int default_quad_order(const WeightSpec& w) {
  return w.has_exponential() ? kExpQuadOrder : kUnweightedQuadOrder;
}

HermiteFunction semigroup_apply(const HermiteFunction& f, double t, SemigroupMode mode) {
  require_time(t);
  std::vector<double> c = f.coeffs();
  for (std::size_t n = 0; n < c.size(); ++n) {
    const double nn = static_cast<double>(n);
    switch (mode) {
      case SemigroupMode::Heat: c[n] *= std::exp(-nn * t); break;
      case SemigroupMode::Poisson: c[n] *= std::exp(-t * std::sqrt(nn)); break;
      default: throw DomainError("one-form semigroup mode applied to a function");
    }
  }
  return HermiteFunction(std::move(c));
}

OneForm semigroup_apply(const OneForm& g, double t, SemigroupMode mode) {
  require_time(t);
  std::vector<double> b = g.coeffs();
  for (std::size_t m = 0; m < b.size(); ++m) {
    const double eig = static_cast<double>(m) + 1.0;
    switch (mode) {
      case SemigroupMode::PoissonOneForm: b[m] *= std::exp(-t * std::sqrt(eig)); break;
      case SemigroupMode::HeatOneForm: b[m] *= std::exp(-eig * t); break;
      default: throw DomainError("function semigroup mode applied to a one-form");
    }
  }
  return OneForm(std::move(b));
}

OneForm riesz_apply(const HermiteFunction& f) {
  if (f.order() == 0) return OneForm();
  std::vector<double> b(f.coeffs().begin() + 1, f.coeffs().end());
  return OneForm(std::move(b));
}

double weighted_inner(const HermiteFunction& u, const HermiteFunction& v, const WeightSpec& w,
                      int quad_order) {
  return weighted_inner_impl(u, v, w, quad_order);
}

double weighted_inner(const OneForm& u, const OneForm& v, const WeightSpec& w, int quad_order) {
  return weighted_inner_impl(u, v, w, quad_order);
}

Subordinator::Subordinator(double t, int nodes) : t_(t) {
  require_time(t);
  if (nodes < 2) throw DomainError("subordination needs at least 2 nodes");
  if (t == 0.0) return;
  // u = e^y, du = u dy; heat time s = t^2 / (4u) capped at kLargestHeatTime.
  const double y_hi = std::log(kUpperU);
  const double y_lo = std::min(std::log(t * t / (4.0 * kLargestHeatTime)), y_hi - 1.0);
  const double h = (y_hi - y_lo) / (nodes - 1);
  times_.reserve(static_cast<std::size_t>(nodes));
  weights_.reserve(static_cast<std::size_t>(nodes));
  for (int k = 0; k < nodes; ++k) {
    const double u = std::exp(y_lo + k * h);
    const double end = (k == 0 || k == nodes - 1) ? 0.5 : 1.0;
    times_.push_back(t * t / (4.0 * u));
    weights_.push_back(end * h * std::sqrt(u) * std::exp(-u) / std::sqrt(std::numbers::pi));
  }
}

double poisson_weight(const WeightSpec& w, double x, double t, int quad_order, int sub_nodes) {
  require_time(t);
  if (t == 0.0) return w(x);
  const GaussRule& rule = gauss_hermite(quad_order > 0 ? quad_order : default_quad_order(w));
  const double v = poisson_apply(w, x, Subordinator(t, sub_nodes), rule);
  if (!std::isfinite(v)) throw NumericalError("P_t w is not finite");
  return v;
}

FlowGrid FlowGrid::standard() {
  FlowGrid g;
  for (int i = -32; i <= 32; ++i) g.x_nodes.push_back(0.25 * i);
  const int count = 40;
  const double lo = std::log(1e-3);
  const double hi = std::log(32.0);
  for (int k = 0; k < count; ++k) g.t_nodes.push_back(std::exp(lo + (hi - lo) * k / (count - 1)));
  return g;
}

void FlowGrid::validate() const {
  if (x_nodes.empty() || t_nodes.empty()) throw DomainError("flow grid must be nonempty");
  std::vector<double> sorted = x_nodes;
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0, j = sorted.size() - 1; i <= j && j < sorted.size(); ++i, --j) {
    if (sorted[i] != -sorted[j]) throw DomainError("flow grid x nodes must be symmetric about 0");
    if (j == 0) break;
  }
  for (std::size_t k = 0; k < t_nodes.size(); ++k) {
    if (!(t_nodes[k] > 0.0)) throw DomainError("flow grid t nodes must be positive");
    if (k > 0 && !(t_nodes[k] > t_nodes[k - 1])) {
      throw DomainError("flow grid t nodes must be strictly increasing");
    }
  }
  if (sub_nodes < 2) throw DomainError("flow grid needs at least 2 subordination nodes");
}

Q2Result q2_characteristic(const WeightSpec& w, const FlowGrid& grid, int quad_order) {
  grid.validate();
  const GaussRule& rule = gauss_hermite(quad_order > 0 ? quad_order : default_quad_order(w));
  // w^{-1} is evaluated as 1/w pointwise; for clamped weights this equals the
  // clamp of the inverse at the same level.
  const auto both = [&w](double y) {
    const double v = w(y);
    return std::array<double, 2>{v, 1.0 / v};
  };

  struct Best {
    double value = -1.0;
    double x = 0.0;
  };
  std::vector<Best> per_t(grid.t_nodes.size());
  detail::parallel_for(grid.t_nodes.size(), [&](std::size_t k) {
    const Subordinator sub(grid.t_nodes[k], grid.sub_nodes);
    Best best;
    for (double x : grid.x_nodes) {
      const auto p = poisson_apply(both, x, sub, rule);
      const double prod = p[0] * p[1];
      if (!std::isfinite(prod)) throw NumericalError("P_t w is not finite on the grid");
      if (prod > best.value) best = {prod, x};
    }
    per_t[k] = best;
  });

  Q2Result out;
  out.grid_max = -1.0;
  for (std::size_t k = 0; k < per_t.size(); ++k) {
    if (per_t[k].value > out.grid_max) {
      out.grid_max = per_t[k].value;
      out.argmax_x = per_t[k].x;
      out.argmax_t = grid.t_nodes[k];
    }
  }
  const auto means = mehler_average(both, 0.0, std::numeric_limits<double>::infinity(), rule);
  out.limit_value = means[0] * means[1];
  if (!std::isfinite(out.limit_value)) throw NumericalError("int w dgamma is not finite");
  out.value = out.grid_max;
  if (out.limit_value >= out.grid_max) {
    out.value = out.limit_value;
    out.at_limit = true;
    out.argmax_x = 0.0;
    out.argmax_t = std::numeric_limits<double>::infinity();
  }
  return out;
}

}  // namespace bellcert::gauss
