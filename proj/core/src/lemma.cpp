#include "bellcert/lemma.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "parallel.hpp"

namespace bellcert::gauss {

namespace {

// Sample abscissae for the spectral comparisons.
constexpr std::array<double, 7> kSampleX{-2.5, -1.0, -0.3, 0.0, 0.7, 1.5, 3.0};

Json where(double x, double t) { return Json{{"x", x}, {"t", t}}; }

// Runs body(t_index, record) per t node and merges in t order.
template <class Body>
CheckRecord over_t(const std::string& name, const FlowGrid& grid, Body&& body) {
  std::vector<CheckRecord> parts(grid.t_nodes.size());
  detail::parallel_for(parts.size(), [&](std::size_t k) { body(k, parts[k]); });
  CheckRecord out;
  out.name = name;
  for (const CheckRecord& p : parts) out.merge(p);
  return out;
}

}  // namespace

CheckRecord check_heat_eigen(int max_n, const std::vector<double>& s_list) {
  CheckRecord rec;
  rec.name = "heat_eigen";
  const GaussRule& outer = gauss_hermite(kUnweightedQuadOrder);
  const GaussRule& inner = gauss_hermite(kUnweightedQuadOrder);
  std::vector<double> basis(static_cast<std::size_t>(max_n) + 1);
  for (double s : s_list) {
    for (int n = 0; n <= max_n; ++n) {
      const HermiteFunction h = HermiteFunction::basis(n);
      std::vector<double> proj(basis.size(), 0.0);
      for (std::size_t i = 0; i < outer.size(); ++i) {
        const double x = outer.nodes[i];
        const double u = mehler_average(h, x, s, inner);
        hermite_orthonormal_all(x, basis);
        for (std::size_t k = 0; k < basis.size(); ++k) proj[k] += outer.weights[i] * u * basis[k];
      }
      double err = 0.0;
      for (int k = 0; k <= max_n; ++k) {
        const double expect = k == n ? std::exp(-n * s) : 0.0;
        err = std::max(err, std::abs(proj[static_cast<std::size_t>(k)] - expect));
      }
      const double margin = kHeatEigenTol - err;
      rec.observe(margin, margin < 0.0, Json{{"n", n}, {"s", s}});
    }
  }
  return rec;
}

CheckRecord check_subordination(int max_n, const std::vector<double>& t_list, int sub_nodes) {
  CheckRecord rec;
  rec.name = "subordination";
  const GaussRule& rule = gauss_hermite(kUnweightedQuadOrder);
  for (double t : t_list) {
    const Subordinator sub(t, sub_nodes);
    for (int n = 0; n <= max_n; ++n) {
      const HermiteFunction h = HermiteFunction::basis(n);
      const OneForm g = OneForm::basis(n);
      const double fn_factor = std::exp(-t * std::sqrt(static_cast<double>(n)));
      const double form_factor = std::exp(-t * std::sqrt(n + 1.0));
      for (double x : kSampleX) {
        const double hx = h(x);
        const double e_fn = std::abs(poisson_apply(h, x, sub, rule) - fn_factor * hx);
        const double e_form = std::abs(oneform_poisson_apply(g, x, sub, rule) - form_factor * hx);
        const double err = std::max(e_fn, e_form) / (1.0 + std::abs(hx));
        const double margin = kSubordinationTol - err;
        rec.observe(margin, margin < 0.0, Json{{"n", n}, {"t", t}, {"x", x}});
      }
    }
  }
  return rec;
}

CheckRecord check_lemma_a(const std::vector<HermiteFunction>& fs, const std::vector<WeightSpec>& ws,
                          const FlowGrid& grid) {
  grid.validate();
  CheckRecord out;
  out.name = "lemma1_a";
  for (const WeightSpec& w : ws) {
    const GaussRule& rule = gauss_hermite(default_quad_order(w));
    for (std::size_t fi = 0; fi < fs.size(); ++fi) {
      const HermiteFunction& f = fs[fi];
      const auto sides = [&](double y) {
        const double fy = f(y);
        const double wy = w(y);
        return std::array<double, 3>{fy, fy * fy * wy, 1.0 / wy};
      };
      CheckRecord part = over_t(out.name, grid, [&](std::size_t k, CheckRecord& rec) {
        const double t = grid.t_nodes[k];
        const Subordinator sub(t, grid.sub_nodes);
        for (double x : grid.x_nodes) {
          const auto p = poisson_apply(sides, x, sub, rule);
          const double margin = p[1] * p[2] + kLemmaSlack - p[0] * p[0];
          Json loc = where(x, t);
          loc["f"] = fi;
          loc["weight"] = w.to_string();
          rec.observe(margin, margin < 0.0, loc);
        }
      });
      out.merge(part);
    }
  }
  return out;
}

CheckRecord check_lemma_b(const std::vector<HermiteFunction>& fs, const FlowGrid& grid) {
  CheckRecord rec;
  rec.name = "lemma1_b";
  for (std::size_t fi = 0; fi < fs.size(); ++fi) {
    const OneForm df = differential(fs[fi]);
    for (double t : grid.t_nodes) {
      const OneForm lhs = differential(semigroup_apply(fs[fi], t, SemigroupMode::Poisson));
      const OneForm rhs = semigroup_apply(df, t, SemigroupMode::PoissonOneForm);
      double err = 0.0;
      for (int m = 0; m <= std::max(lhs.order(), rhs.order()); ++m) {
        err = std::max(err, std::abs(lhs.coeff(m) - rhs.coeff(m)));
      }
      // Both sides multiply the same coefficient by the same exponential.
      const double margin = 1e-14 * (1.0 + df.l2_norm()) - err;
      rec.observe(margin, margin < 0.0, Json{{"f", fi}, {"t", t}});
    }
  }
  return rec;
}

CheckRecord check_lemma_c(const std::vector<OneForm>& gs, const FlowGrid& grid) {
  grid.validate();
  const GaussRule& rule = gauss_hermite(kUnweightedQuadOrder);
  CheckRecord out;
  out.name = "lemma1_c";
  for (std::size_t gi = 0; gi < gs.size(); ++gi) {
    const OneForm& g = gs[gi];
    const auto abs_g = [&g](double y) { return std::abs(g(y)); };
    CheckRecord part = over_t(out.name, grid, [&](std::size_t k, CheckRecord& rec) {
      const double t = grid.t_nodes[k];
      const OneForm flowed = semigroup_apply(g, t, SemigroupMode::HeatOneForm);
      for (double x : grid.x_nodes) {
        const double margin = mehler_average(abs_g, x, t, rule) + kLemmaSlack - std::abs(flowed(x));
        Json loc = where(x, t);
        loc["g"] = gi;
        rec.observe(margin, margin < 0.0, loc);
      }
    });
    out.merge(part);
  }
  return out;
}

CheckRecord check_lemma_d(const std::vector<OneForm>& gs, const std::vector<WeightSpec>& ws,
                          const FlowGrid& grid) {
  grid.validate();
  CheckRecord out;
  out.name = "lemma1_d";
  for (const WeightSpec& w : ws) {
    const GaussRule& rule = gauss_hermite(default_quad_order(w));
    for (std::size_t gi = 0; gi < gs.size(); ++gi) {
      const OneForm& g = gs[gi];
      const auto sides = [&](double y) {
        const double gy = g(y);
        const double wy = w(y);
        return std::array<double, 2>{gy * gy / wy, wy};
      };
      CheckRecord part = over_t(out.name, grid, [&](std::size_t k, CheckRecord& rec) {
        const double t = grid.t_nodes[k];
        const Subordinator sub(t, grid.sub_nodes);
        for (double x : grid.x_nodes) {
          const double pg = oneform_poisson_apply(g, x, sub, rule);
          const auto p = poisson_apply(sides, x, sub, rule);
          const double margin = p[0] * p[1] + kLemmaSlack - pg * pg;
          Json loc = where(x, t);
          loc["g"] = gi;
          loc["weight"] = w.to_string();
          rec.observe(margin, margin < 0.0, loc);
        }
      });
      out.merge(part);
    }
  }
  return out;
}

CheckRecord check_product_lower(const std::vector<WeightSpec>& ws, const FlowGrid& grid) {
  grid.validate();
  CheckRecord out;
  out.name = "poisson_product_ge_1";
  for (const WeightSpec& w : ws) {
    const GaussRule& rule = gauss_hermite(default_quad_order(w));
    const auto both = [&w](double y) {
      const double v = w(y);
      return std::array<double, 2>{v, 1.0 / v};
    };
    CheckRecord part = over_t(out.name, grid, [&](std::size_t k, CheckRecord& rec) {
      const double t = grid.t_nodes[k];
      const Subordinator sub(t, grid.sub_nodes);
      for (double x : grid.x_nodes) {
        const auto p = poisson_apply(both, x, sub, rule);
        const double margin = p[0] * p[1] - (1.0 - kProductSlack);
        Json loc = where(x, t);
        loc["weight"] = w.to_string();
        rec.observe(margin, margin < 0.0, loc);
      }
    });
    out.merge(part);
  }
  return out;
}

std::vector<HermiteFunction> lemma_functions() {
  using H = HermiteFunction;
  return {H::basis(1), H::basis(2) + H::basis(3) * 0.5,
          H::basis(0) - H::basis(1) + H::basis(4) * 0.25};
}

std::vector<OneForm> lemma_oneforms() {
  return {OneForm::basis(0), OneForm::basis(1) - OneForm::basis(3) * 0.5};
}

std::vector<WeightSpec> lemma_weights() {
  return {WeightSpec::parse("const:c=2"), WeightSpec::parse("exp:a=0.5"),
          WeightSpec::parse("exp:a=-1"), WeightSpec::parse("trunc:n=4:exp:a=1")};
}

std::vector<CheckRecord> run_lemma_suite(const FlowGrid& grid) {
  const auto fs = lemma_functions();
  const auto gs = lemma_oneforms();
  const auto ws = lemma_weights();
  return {check_heat_eigen(),
          check_subordination(),
          check_lemma_a(fs, ws, grid),
          check_lemma_b(fs, grid),
          check_lemma_c(gs, grid),
          check_lemma_d(gs, ws, grid),
          check_product_lower(ws, grid)};
}

}  // namespace bellcert::gauss
