#include "bellcert/estimates.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "bellcert/errors.hpp"

namespace bellcert::gauss {

namespace {

constexpr int kLegendreOrder = 16;
constexpr double kLadderSlack = 1e-12;
constexpr double kBoundSlack = 1e-6;

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double embedding_tail(double scale, double t) {
  return scale * std::exp(-2.0 * t) * (2.0 * t + 1.0) / 4.0;
}

}  // namespace

EmbeddingResult bilinear_lhs(const HermiteFunction& f, const OneForm& g, const WeightSpec& w,
                             const FlowGrid& grid) {
  return bilinear_lhs(f, g, w, q2_characteristic(w, grid).value);
}

EmbeddingResult bilinear_lhs(const HermiteFunction& f, const OneForm& g, const WeightSpec& w,
                             double q2) {
  if (f.coeff(0) != 0.0) throw DomainError("f must have zero mean (range of -L)");
  EmbeddingResult out;
  out.q2 = q2;
  const int order = default_quad_order(w);
  out.f_norm = std::sqrt(std::max(0.0, weighted_inner(f, f, w, order)));
  out.g_norm = std::sqrt(std::max(0.0, weighted_inner(g, g, w.inverse(), order)));
  out.bound = kEmbeddingConstant * q2 * out.f_norm * out.g_norm;

  // Each |grad .|^2 integrates to at most e^{-2t} times these constants.
  double sf = 0.0;
  for (int n = 1; n <= f.order(); ++n) sf += 2.0 * n * f.coeff(n) * f.coeff(n);
  double sg = 0.0;
  for (int m = 0; m <= g.order(); ++m) sg += (2.0 * m + 1.0) * g.coeff(m) * g.coeff(m);
  const double scale = std::sqrt(sf) * std::sqrt(sg);
  if (scale == 0.0) return out;

  double t_max = 1.0;
  while (embedding_tail(scale, t_max) >= kTailTarget) t_max += 1.0;
  out.t_truncation = t_max;
  out.tail_estimate = embedding_tail(scale, t_max);

  const int deg = std::max(f.order(), g.order()) + 1;
  const GaussRule& xr = gauss_hermite(std::max(kUnweightedQuadOrder, 2 * deg + 4));
  const GaussRule tr = composite_legendre(0.0, t_max, 2 * static_cast<int>(t_max), kLegendreOrder);
  std::vector<double> h(static_cast<std::size_t>(deg) + 1);
  std::vector<double> df(static_cast<std::size_t>(f.order()) + 1);
  std::vector<double> dg(static_cast<std::size_t>(g.order()) + 1);

  double total = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double t = tr.nodes[k];
    for (int n = 0; n <= f.order(); ++n) {
      df[static_cast<std::size_t>(n)] = f.coeff(n) * std::sqrt(static_cast<double>(n)) *
                                        std::exp(-t * std::sqrt(static_cast<double>(n)));
    }
    for (int m = 0; m <= g.order(); ++m) {
      dg[static_cast<std::size_t>(m)] = g.coeff(m) * std::exp(-t * std::sqrt(m + 1.0));
    }
    double inner = 0.0;
    for (std::size_t i = 0; i < xr.size(); ++i) {
      hermite_orthonormal_all(xr.nodes[i], h);
      double fx = 0.0;  // spatial derivative
      double ft = 0.0;  // time derivative (up to sign)
      for (int n = 1; n <= f.order(); ++n) {
        fx += df[static_cast<std::size_t>(n)] * h[static_cast<std::size_t>(n - 1)];
        ft += df[static_cast<std::size_t>(n)] * h[static_cast<std::size_t>(n)];
      }
      double gx = 0.0;
      double gt = 0.0;
      for (int m = 0; m <= g.order(); ++m) {
        const double b = dg[static_cast<std::size_t>(m)];
        if (m > 0) gx += b * std::sqrt(static_cast<double>(m)) * h[static_cast<std::size_t>(m - 1)];
        gt += b * std::sqrt(m + 1.0) * h[static_cast<std::size_t>(m)];
      }
      inner += xr.weights[i] * std::hypot(fx, ft) * std::hypot(gx, gt);
    }
    total += tr.weights[k] * t * inner;
  }
  out.lhs = total;
  out.ratio = out.bound > 0.0 ? out.lhs / out.bound : 0.0;
  return out;
}

double riesz_subspace_norm(const WeightSpec& w, int n, int quad_order) {
  if (n < 2) throw DomainError("subspace dimension must be >= 2");
  const GaussRule& rule = gauss_hermite(quad_order > 0 ? quad_order : default_quad_order(w));
  const auto rows = static_cast<Eigen::Index>(rule.size());
  Eigen::MatrixXd phi(rows, n);  // hhat_1..hhat_n
  Eigen::MatrixXd psi(rows, n);  // hhat_0..hhat_{n-1}
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const double x = rule.nodes[static_cast<std::size_t>(i)];
    const double root = std::sqrt(rule.weights[static_cast<std::size_t>(i)] * w(x));
    if (!std::isfinite(root)) throw NumericalError("weight is not finite at a quadrature node");
    hermite_orthonormal_all(x, h);
    for (int k = 0; k < n; ++k) {
      phi(i, k) = root * h[static_cast<std::size_t>(k) + 1];
      psi(i, k) = root * h[static_cast<std::size_t>(k)];
    }
  }
  // phi = Q R, so the Gram matrix of hhat_1..hhat_n is R^T R.
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(phi);
  const Eigen::MatrixXd r = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
  const Eigen::VectorXd diag = r.diagonal().cwiseAbs();
  if (!(diag.minCoeff() > 1e-13 * diag.maxCoeff())) {
    throw NumericalError("Gram matrix is numerically singular; lower N or raise the order");
  }
  const Eigen::MatrixXd m =
      r.transpose().triangularView<Eigen::Lower>().solve(psi.transpose()).transpose();
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

NormResult weighted_riesz_norm(const WeightSpec& w, int n, const FlowGrid& grid) {
  NormResult out;
  out.n = n;
  out.weighted_norm = riesz_subspace_norm(w, n);
  out.q2 = q2_characteristic(w, grid).value;
  out.bound_ratio = out.weighted_norm / (kRieszConstant * out.q2);
  return out;
}

NormResult weighted_riesz_norm(const WeightSpec& w, int n) {
  return weighted_riesz_norm(w, n, FlowGrid::standard());
}

ReprResult representation_pair(const HermiteFunction& f, const OneForm& g, double t_max) {
  if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
  ReprResult out;
  out.t_truncation = t_max;
  out.lhs = weighted_inner(riesz_apply(f), g, WeightSpec::constant(1.0), kUnweightedQuadOrder);
  // Slot m pairs sqrt(m+1) c_{m+1} e^{-t lam} with -lam b_m e^{-t lam}, lam = sqrt(m+1).
  const int top = std::min(f.order() - 1, g.order());
  const GaussRule tr = composite_legendre(0.0, t_max, 2 * static_cast<int>(std::ceil(t_max)), 20);
  double total = 0.0;
  for (std::size_t k = 0; k < tr.size(); ++k) {
    const double t = tr.nodes[k];
    double pair = 0.0;
    for (int m = 0; m <= top; ++m) {
      const double lam = std::sqrt(m + 1.0);
      pair -= lam * lam * f.coeff(m + 1) * g.coeff(m) * std::exp(-2.0 * t * lam);
    }
    total += tr.weights[k] * t * pair;
  }
  out.rhs = 4.0 * total;
  for (int m = 0; m <= top; ++m) {
    const double lam = std::sqrt(m + 1.0);
    out.tail += std::abs(f.coeff(m + 1) * g.coeff(m)) * std::exp(-2.0 * t_max * lam) *
                (2.0 * t_max * lam + 1.0);
  }
  out.abs_gap = std::abs(std::abs(out.lhs) - std::abs(out.rhs));
  return out;
}

ReprResult representation_check(int n, double t_max) {
  if (n < 1) throw DomainError("representation_check needs n >= 1");
  return representation_pair(HermiteFunction::basis(n), OneForm::basis(n - 1), t_max);
}

std::string instantiate_family(const std::string& family, double param) {
  const auto pos = family.find("{}");
  if (pos == std::string::npos) throw DomainError("weight family needs a {} placeholder");
  std::string out = family;
  out.replace(pos, 2, shortest(param));
  return out;
}

SweepTable sweep_report(const std::string& family, const std::vector<double>& params, int n,
                        const FlowGrid& grid, const std::vector<int>& ladder) {
  if (params.empty()) throw DomainError("sweep needs at least one parameter");
  if (!std::is_sorted(params.begin(), params.end())) {
    throw DomainError("sweep parameters must be ascending");
  }
  for (int k : ladder) {
    if (k < 1) throw DomainError("truncation levels must be >= 1");
  }
  grid.validate();
  // Validate every instance before any heavy work.
  std::vector<WeightSpec> weights;
  for (double p : params) weights.push_back(WeightSpec::parse(instantiate_family(family, p)));

  SweepTable table;
  table.family = family;
  table.n = n;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const WeightSpec& w = weights[i];
    SweepRow row;
    row.param = params[i];
    row.weight = w.to_string();
    row.q2_lower = q2_characteristic(w, grid).value;
    row.weighted_norm = riesz_subspace_norm(w, n);
    row.bound_ratio = row.weighted_norm / (kRieszConstant * row.q2_lower);
    row.bound_ok = row.weighted_norm <= kRieszConstant * row.q2_lower + kBoundSlack;
    row.ladder_monotone = true;
    double prev = -1.0;
    for (int k : ladder) {
      const double q = q2_characteristic(truncate_weight(w, k), grid).value;
      if (q < prev - kLadderSlack) row.ladder_monotone = false;
      prev = q;
      row.ladder.emplace_back(k, q);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

bool SweepTable::passed() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const SweepRow& r) { return r.bound_ok && r.ladder_monotone; });
}

std::string SweepTable::to_csv() const {
  std::ostringstream os;
  os << "param,q2_lower,weighted_norm,bound_ratio,trunc_n,q2_trunc\n";
  for (const SweepRow& r : rows) {
    const std::string head = shortest(r.param) + ',' + shortest(r.q2_lower) + ',' +
                             shortest(r.weighted_norm) + ',' + shortest(r.bound_ratio) + ',';
    if (r.ladder.empty()) os << head << ",\n";
    for (const auto& [k, q] : r.ladder) os << head << k << ',' << shortest(q) << '\n';
  }
  return os.str();
}

void to_json(Json& j, const EmbeddingResult& r) {
  j = Json{{"lhs", r.lhs},         {"bound", r.bound},
           {"ratio", r.ratio},     {"t_truncation", r.t_truncation},
           {"tail_estimate", r.tail_estimate}, {"q2", r.q2},
           {"f_norm", r.f_norm},   {"g_norm", r.g_norm}};
}

void to_json(Json& j, const NormResult& r) {
  j = Json{{"weighted_norm", r.weighted_norm},
           {"q2", r.q2},
           {"bound_ratio", r.bound_ratio},
           {"n", r.n}};
}

void to_json(Json& j, const ReprResult& r) {
  j = Json{{"lhs", r.lhs},
           {"rhs", r.rhs},
           {"abs_gap", r.abs_gap},
           {"t_truncation", r.t_truncation},
           {"tail", r.tail}};
}

void to_json(Json& j, const SweepRow& r) {
  Json ladder = Json::array();
  for (const auto& [k, q] : r.ladder) ladder.push_back(Json{{"trunc_n", k}, {"q2_trunc", q}});
  j = Json{{"param", r.param},
           {"weight", r.weight},
           {"q2_lower", r.q2_lower},
           {"weighted_norm", r.weighted_norm},
           {"bound_ratio", r.bound_ratio},
           {"ladder", ladder},
           {"bound_ok", r.bound_ok},
           {"ladder_monotone", r.ladder_monotone}};
}

void to_json(Json& j, const SweepTable& t) {
  j = Json{{"family", t.family}, {"n", t.n}, {"rows", t.rows}, {"passed", t.passed()}};
}

}  // namespace bellcert::gauss
