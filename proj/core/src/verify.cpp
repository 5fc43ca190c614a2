#include "bellcert/verify.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "bellcert/errors.hpp"
#include "bellcert/rng.hpp"
#include "parallel.hpp"

namespace bellcert {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string short_number(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, end) : std::to_string(v);
}

std::string check_name(std::string_view base, double q) {
  return std::string(base) + "[Q=" + short_number(q) + "]";
}

// Splits a product rs into (r, s) with r/s = ratio, then nudges s by ulps so
// that the floating-point product lies in [1, q].
bool split_rs(double rs, double ratio, double q, double& r, double& s) {
  r = std::sqrt(rs * ratio);
  s = rs / r;
  for (int i = 0; i < 8; ++i) {
    const double prod = r * s;
    if (prod >= 1.0 && prod <= q) return true;
    s = std::nextafter(s, prod < 1.0 ? kInf : 0.0);
  }
  return false;
}

double log_uniform(Rng& rng, double spread) {
  return std::pow(10.0, rng.uniform(-std::log10(spread), std::log10(spread)));
}

Json location(double q, std::size_t index, const BellmanPoint& p) {
  Json coords = Json::array();
  for (double v : to_coordinates(p)) coords.push_back(v);
  return Json{{"Q", q}, {"index", index}, {"point", coords}};
}

}  // namespace

void SuiteConfig::validate() const {
  if (q_list.empty()) throw DomainError("q_list must not be empty");
  for (double q : q_list) QContext::make(q, eta_dim);
  if (samples_per_q < 1) throw DomainError("samples_per_q must be >= 1");
  if (!(fd_step > 0.0) || !std::isfinite(fd_step)) throw DomainError("fd_step must be > 0");
  if (!(pi_exclusion > 0.0)) throw DomainError("pi_exclusion must be > 0");
  if (directions_per_point < 0) throw DomainError("directions_per_point must be >= 0");
  if (!(mollify_eps >= 0.0)) throw DomainError("mollify_eps must be >= 0");
  if (mc_samples < 1) throw DomainError("mc_samples must be >= 1");
  if (aux_grid < 0 || aux_grid == 1) throw DomainError("aux_grid must be 0 or >= 2");
}

void to_json(Json& j, const SuiteConfig& c) {
  j = Json{{"q_list", c.q_list},
           {"samples_per_q", c.samples_per_q},
           {"eta_dim", c.eta_dim},
           {"seed", c.seed},
           {"fd_step", c.fd_step},
           {"pi_exclusion", c.pi_exclusion},
           {"directions_per_point", c.directions_per_point},
           {"mollify_eps", c.mollify_eps},
           {"mc_samples", c.mc_samples},
           {"aux_grid", c.aux_grid}};
}

void from_json(const Json& j, SuiteConfig& c) {
  j.at("q_list").get_to(c.q_list);
  j.at("samples_per_q").get_to(c.samples_per_q);
  j.at("eta_dim").get_to(c.eta_dim);
  j.at("seed").get_to(c.seed);
  j.at("fd_step").get_to(c.fd_step);
  j.at("pi_exclusion").get_to(c.pi_exclusion);
  j.at("directions_per_point").get_to(c.directions_per_point);
  j.at("mollify_eps").get_to(c.mollify_eps);
  j.at("mc_samples").get_to(c.mc_samples);
  j.at("aux_grid").get_to(c.aux_grid);
}

std::vector<BellmanPoint> sample_domain(const QContext& ctx, int count, std::uint64_t seed) {
  if (count < 1) throw DomainError("sample count must be >= 1");
  Rng rng(seed);
  std::vector<BellmanPoint> points;
  points.reserve(static_cast<std::size_t>(count));
  const double lo = 1.0 + kSampleMargin;
  const double hi = ctx.q - kSampleMargin;
  while (static_cast<int>(points.size()) < count) {
    double rs = 1.0;
    if (ctx.q > 1.0) rs = hi > lo ? rng.uniform(lo, hi) : 0.5 * (1.0 + ctx.q);
    BellmanPoint p;
    if (!split_rs(rs, log_uniform(rng, kRatioSpread), ctx.q, p.r, p.s)) continue;
    p.Z = log_uniform(rng, kSizeSpread);
    p.H = log_uniform(rng, kSizeSpread);
    p.zeta = rng.uniform(-1.0, 1.0) * std::sqrt((1.0 - kSampleMargin) * p.Z * p.r);
    p.eta.assign(static_cast<std::size_t>(ctx.eta_dim), 0.0);
    double norm = 0.0;
    for (double& e : p.eta) {
      e = rng.normal();
      norm += e * e;
    }
    norm = std::sqrt(norm);
    const double radius = rng.uniform() * std::sqrt((1.0 - kSampleMargin) * p.H * p.s);
    for (double& e : p.eta) e *= norm > 0.0 ? radius / norm : 0.0;
    if (in_domain(p, ctx)) points.push_back(std::move(p));
  }
  return points;
}

bool stencil_admissible(const RadialPoint& p, double q) {
  if (!(p.Z >= 0.0) || !(p.H >= 0.0) || !(p.r > 0.0) || !(p.s > 0.0)) return false;
  const double rs = p.r * p.s;
  return rs >= 1.0 - kStencilBand && rs <= q * (1.0 + kStencilBand);
}

Eigen::VectorXd to_coordinates(const BellmanPoint& p) {
  const auto n = static_cast<Eigen::Index>(p.eta.size());
  Eigen::VectorXd x(5 + n);
  x(0) = p.Z;
  x(1) = p.H;
  x(2) = p.zeta;
  for (Eigen::Index i = 0; i < n; ++i) x(3 + i) = p.eta[static_cast<std::size_t>(i)];
  x(3 + n) = p.r;
  x(4 + n) = p.s;
  return x;
}

BellmanPoint from_coordinates(const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size() - 5;
  BellmanPoint p;
  p.Z = x(0);
  p.H = x(1);
  p.zeta = x(2);
  p.eta.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) p.eta[static_cast<std::size_t>(i)] = x(3 + i);
  p.r = x(3 + n);
  p.s = x(4 + n);
  return p;
}

namespace {

struct StencilExit {};

}  // namespace

FdHessian fd_hessian(const PointFunction& f, const BellmanPoint& p, const QContext& ctx,
                     double h) {
  if (!(h > 0.0)) throw DomainError("finite-difference step must be > 0");
  const Eigen::VectorXd x = to_coordinates(p);
  const Eigen::Index dim = x.size();
  FdHessian out;
  for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
    const double base = std::ldexp(h, -halvings);
    Eigen::VectorXd step(dim);
    for (Eigen::Index i = 0; i < dim; ++i) step(i) = base * std::max(1.0, std::abs(x(i)));

    const auto eval_at = [&](Eigen::Index i, double a, Eigen::Index j, double b) {
      Eigen::VectorXd y = x;
      y(i) += a * step(i);
      y(j) += b * step(j);
      const BellmanPoint q = from_coordinates(y);
      if (!stencil_admissible(radial(q), ctx.q)) throw StencilExit{};
      try {
        return f(q);
      } catch (const DomainError&) {
        throw StencilExit{};
      }
    };

    try {
      Eigen::MatrixXd hess(dim, dim);
      for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = i; j < dim; ++j) {
          const double v = (eval_at(i, 1, j, 1) - eval_at(i, 1, j, -1) -
                            eval_at(i, -1, j, 1) + eval_at(i, -1, j, -1)) /
                           (4.0 * step(i) * step(j));
          hess(i, j) = v;
          hess(j, i) = v;
        }
      }
      out.ok = true;
      out.matrix = std::move(hess);
      out.step = base;
      out.halvings = halvings;
      return out;
    } catch (const StencilExit&) {
    }
  }
  out.reason = "finite-difference stencil leaves the admissible region after " +
               std::to_string(kMaxHalvings) + " halvings";
  return out;
}

FdHessian fd_hessian(const BellmanPoint& p, const QContext& ctx, double h) {
  const double q = ctx.q;
  return fd_hessian([q](const BellmanPoint& x) { return eval_radial(radial(x), q); }, p,
                    ctx, h);
}

std::vector<Eigen::VectorXd> hessian_directions(int dim, int random_count,
                                                std::uint64_t seed) {
  std::vector<Eigen::VectorXd> dirs;
  dirs.reserve(static_cast<std::size_t>(random_count + 2 * dim));
  Rng rng(seed);
  while (static_cast<int>(dirs.size()) < random_count) {
    Eigen::VectorXd d(dim);
    for (Eigen::Index i = 0; i < dim; ++i) d(i) = rng.normal();
    const double n = d.norm();
    if (n < 1e-12) continue;
    dirs.push_back(d / n);
  }
  for (int i = 0; i < dim; ++i) {
    for (double sign : {1.0, -1.0}) {
      Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
      d(i) = sign;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

double concavity_slack(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& dir,
                       int eta_dim, double q) {
  const double form = -dir.dot(hessian * dir);
  const double d_zeta = std::abs(dir(2));
  const double d_eta = dir.segment(3, eta_dim).norm();
  return form - 4.0 / q * d_zeta * d_eta;
}

PointVerdict verify_point(const BellmanPoint& p, const QContext& ctx, const SuiteConfig& cfg) {
  return verify_point(p, ctx, cfg,
                      hessian_directions(5 + ctx.eta_dim, cfg.directions_per_point,
                                         mix_seed(cfg.seed, 0xD1)));
}

PointVerdict verify_point(const BellmanPoint& p, const QContext& ctx, const SuiteConfig& cfg,
                          const std::vector<Eigen::VectorXd>& directions) {
  require_in_domain(p, ctx);
  PointVerdict v;
  v.point = p;
  const RadialPoint rp = radial(p);
  const double q = ctx.q;
  v.value = eval_radial(rp, q);
  const double norm = 1.0 + std::abs(v.value);
  std::vector<std::string> reasons;

  // size
  const double scale = p.Z + p.H;
  const double upper = kSizeConstant * scale;
  v.size_ok = v.value >= -kSizeRelTol * scale && v.value <= upper * (1.0 + kSizeRelTol);
  v.size_margin = std::min(v.value, upper - v.value) / norm;
  v.worst_margin = v.size_margin;

  // sign: forward difference in nu of the radial profile
  {
    const double room = std::sqrt(p.H * p.s);
    double step = cfg.fd_step * (1.0 + rp.nu);
    for (int k = 0; k <= kMaxHalvings && rp.nu + step > room; ++k) step *= 0.5;
    if (rp.nu + step <= room) {
      RadialPoint moved = rp;
      moved.nu += step;
      const double derivative = (eval_radial(moved, q) - v.value) / step;
      v.sign_checked = true;
      v.sign_margin = -derivative / norm;
      v.sign_ok = derivative <= kSignTol * norm;
      v.worst_margin = std::min(v.worst_margin, v.sign_margin);
    } else {
      reasons.emplace_back("sign: nu step leaves <eta,eta> <= Hs");
    }
  }

  // concavity
  v.min_deriv_ratio = kInf;
  if (pi_distance(rp, q) <= cfg.pi_exclusion) {
    v.excluded_near_pi = true;
    reasons.emplace_back("hessian: within the Pi exclusion band");
  } else {
    const FdHessian fd = fd_hessian(p, ctx, cfg.fd_step);
    if (!fd.ok) {
      reasons.push_back("hessian: " + fd.reason);
    } else {
      v.hessian_checked = true;
      double worst = kInf;
      for (const Eigen::VectorXd& d : directions) {
        const double form = -d.dot(fd.matrix * d);
        const double rhs = 4.0 / q * std::abs(d(2)) * d.segment(3, ctx.eta_dim).norm();
        worst = std::min(worst, (form - rhs) / norm);
        if (rhs > 0.0) v.min_deriv_ratio = std::min(v.min_deriv_ratio, form / rhs);
      }
      v.hessian_margin = worst;
      v.hessian_ok = worst >= -kHessianTol;
      v.worst_margin = std::min(v.worst_margin, worst);
    }
  }

  for (std::size_t i = 0; i < reasons.size(); ++i) {
    if (i) v.skip_reason += "; ";
    v.skip_reason += reasons[i];
  }
  return v;
}

double aux_hessian_rhs(AuxKind kind, double r, double s, double dr, double ds) {
  switch (kind) {
    case AuxKind::M: return r * ds * ds;
    case AuxKind::N: return s * dr * dr;
    case AuxKind::K: return 0.25 * std::abs(dr * ds);
    case AuxKind::Mtilde: return std::abs(dr * ds) / s;
    case AuxKind::Ntilde: return std::abs(dr * ds) / r;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

AuxVerdict verify_aux(double r, double s, const QContext& ctx, double h) {
  if (!(r > 0.0) || !(s > 0.0)) throw DomainError("r and s must be positive");
  const double q = ctx.q;
  AuxVerdict out;
  out.r = r;
  out.s = s;

  static const std::array<std::array<double, 2>, 16> kDirections = [] {
    std::array<std::array<double, 2>, 16> d{};
    for (int k = 0; k < 16; ++k) {
      const double theta = k * std::numbers::pi / 16.0;
      d[static_cast<std::size_t>(k)] = {std::cos(theta), std::sin(theta)};
    }
    return d;
  }();

  // 2x2 Hessians for all five functions share one stencil.
  std::array<Eigen::Matrix2d, 5> hess{};
  bool have_hessian = false;
  for (int halvings = 0; halvings <= kMaxHalvings && !have_hessian; ++halvings) {
    const double base = std::ldexp(h, -halvings);
    const std::array<double, 2> x{r, s};
    const std::array<double, 2> step{base * std::max(1.0, r), base * std::max(1.0, s)};
    bool inside = true;
    for (int a : {-2, -1, 0, 1, 2}) {
      for (int b : {-2, -1, 0, 1, 2}) {
        const double rr = r + a * step[0];
        const double ss = s + b * step[1];
        const double rs = rr * ss;
        if (!(rr > 0.0) || !(ss > 0.0) || rs < 1.0 - kStencilBand ||
            rs > q * (1.0 + kStencilBand)) {
          inside = false;
        }
      }
    }
    if (!inside) continue;
    for (std::size_t k = 0; k < kAllAux.size(); ++k) {
      const auto f = [&](int i, double a, int j, double b) {
        std::array<double, 2> y = x;
        y[static_cast<std::size_t>(i)] += a * step[static_cast<std::size_t>(i)];
        y[static_cast<std::size_t>(j)] += b * step[static_cast<std::size_t>(j)];
        return detail::aux_formula(kAllAux[k], y[0], y[1], q);
      };
      for (int i = 0; i < 2; ++i) {
        for (int j = i; j < 2; ++j) {
          const double v = (f(i, 1, j, 1) - f(i, 1, j, -1) - f(i, -1, j, 1) + f(i, -1, j, -1)) /
                           (4.0 * step[static_cast<std::size_t>(i)] * step[static_cast<std::size_t>(j)]);
          hess[k](i, j) = v;
          hess[k](j, i) = v;
        }
      }
    }
    have_hessian = true;
  }
  if (!have_hessian) {
    out.skip_reason = "finite-difference stencil leaves the admissible region after " +
                      std::to_string(kMaxHalvings) + " halvings";
  }

  for (std::size_t k = 0; k < kAllAux.size(); ++k) {
    AuxCheck& c = out.checks[k];
    c.kind = kAllAux[k];
    c.value = detail::aux_formula(c.kind, r, s, q);
    c.bound = aux_size_bound(c.kind, r, s, q);
    c.size_ok = c.value >= -kAuxSlack && c.value <= c.bound + kAuxSlack;
    if (have_hessian) {
      c.hessian_checked = true;
      double worst = kInf;
      for (const auto& d : kDirections) {
        const Eigen::Vector2d dv(d[0], d[1]);
        const double form = -dv.dot(hess[k] * dv);
        worst = std::min(worst, form - aux_hessian_rhs(c.kind, r, s, d[0], d[1]));
      }
      c.hessian_margin = worst;
      c.hessian_ok = worst >= -kAuxSlack;
    }
  }
  return out;
}

std::vector<std::array<double, 2>> aux_grid(const QContext& ctx, int n) {
  std::vector<std::array<double, 2>> grid;
  if (n < 1) return grid;
  grid.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  const double lo = 1.0 + kSampleMargin;
  const double hi = ctx.q - kSampleMargin;
  const double log_spread = std::log10(kRatioSpread);
  for (int i = 0; i < n; ++i) {
    double rs = 1.0;
    if (ctx.q > 1.0) {
      rs = hi > lo ? (n == 1 ? lo : lo + (hi - lo) * i / (n - 1)) : 0.5 * (1.0 + ctx.q);
    }
    for (int j = 0; j < n; ++j) {
      const double e = n == 1 ? 0.0 : -log_spread + 2.0 * log_spread * j / (n - 1);
      double r = 0.0;
      double s = 0.0;
      if (split_rs(rs, std::pow(10.0, e), ctx.q, r, s)) grid.push_back({r, s});
    }
  }
  return grid;
}

bool mollify_ball_inside(const RadialPoint& p, double q, double eps) {
  if (eps < 0.0) return false;
  const double z_hi = p.zeta + eps;
  const double n_hi = p.nu + eps;
  const double zl = p.Z - eps;
  const double hl = p.H - eps;
  const double rl = p.r - eps;
  const double sl = p.s - eps;
  if (zl < 0.0 || hl < 0.0 || rl <= 0.0 || sl <= 0.0) return false;
  return z_hi * z_hi <= zl * rl && n_hi * n_hi <= hl * sl && rl * sl >= 1.0 &&
         (p.r + eps) * (p.s + eps) <= q;
}

double mollify_eval(const BellmanPoint& p, const QContext& ctx, double eps, int mc,
                    std::uint64_t seed) {
  require_in_domain(p, ctx);
  if (mc < 1) throw DomainError("mc must be >= 1");
  const RadialPoint rp = radial(p);
  if (eps == 0.0) return eval_radial(rp, ctx.q);
  if (!mollify_ball_inside(rp, ctx.q, eps)) {
    throw DomainError("mollification ball leaves the domain");
  }
  Rng rng(seed);
  const int pairs = (mc + 1) / 2;
  double weighted = 0.0;
  double total = 0.0;
  std::array<double, 6> u{};
  for (int k = 0; k < pairs; ++k) {
    double n2 = 0.0;
    for (double& c : u) {
      c = rng.normal();
      n2 += c * c;
    }
    // uniform in the unit ball of R^6
    const double radius = std::pow(rng.uniform(), 1.0 / 6.0) / std::sqrt(n2);
    double u2 = 0.0;
    for (double& c : u) {
      c *= radius;
      u2 += c * c;
    }
    if (u2 >= 1.0) continue;
    const double psi = std::exp(-1.0 / (1.0 - u2));
    for (double sign : {1.0, -1.0}) {
      const RadialPoint x{rp.Z + sign * eps * u[0],
                          rp.H + sign * eps * u[1],
                          std::abs(rp.zeta + sign * eps * u[2]),
                          std::abs(rp.nu + sign * eps * u[3]),
                          rp.r + sign * eps * u[4],
                          rp.s + sign * eps * u[5]};
      weighted += psi * eval_radial(x, ctx.q);
      total += psi;
    }
  }
  if (!(total > 0.0)) throw NumericalError("mollifier normalization vanished");
  return weighted / total;
}

bool SuiteOutcome::passed() const {
  for (const QRun& run : runs) {
    for (const CheckRecord& c : run.checks) {
      if (!c.ok()) return false;
    }
  }
  return true;
}

Json to_json(const PointVerdict& v) {
  Json coords = Json::array();
  for (double c : to_coordinates(v.point)) coords.push_back(c);
  Json j{{"point", coords},
         {"value", v.value},
         {"size_ok", v.size_ok},
         {"sign_ok", v.sign_ok},
         {"sign_checked", v.sign_checked},
         {"hessian_ok", v.hessian_ok},
         {"hessian_checked", v.hessian_checked},
         {"excluded_near_pi", v.excluded_near_pi},
         {"worst_margin", finite_or_null(v.worst_margin)}};
  if (!v.skip_reason.empty()) j["skip_reason"] = v.skip_reason;
  return j;
}

VerificationReport SuiteOutcome::report(bool include_verdicts) const {
  VerificationReport r;
  r.config_echo = config;
  Json per_q = Json::array();
  for (const QRun& run : runs) {
    for (const CheckRecord& c : run.checks) r.checks.push_back(c);
    Json entry = run.summary;
    if (include_verdicts) {
      Json verdicts = Json::array();
      for (const PointVerdict& v : run.verdicts) verdicts.push_back(to_json(v));
      entry["verdicts"] = std::move(verdicts);
    }
    per_q.push_back(std::move(entry));
  }
  r.results["runs"] = std::move(per_q);
  return r;
}

std::vector<CheckRecord> run_aux_checks(const QContext& ctx, int n, double h) {
  if (n < 2) throw DomainError("aux grid size must be >= 2");
  if (!(h > 0.0)) throw DomainError("finite-difference step must be positive");
  const double q = ctx.q;
  const auto grid = aux_grid(ctx, n);
  std::vector<AuxVerdict> aux(grid.size());
  detail::parallel_for(grid.size(), [&](std::size_t i) {
    aux[i] = verify_aux(grid[i][0], grid[i][1], ctx, h);
  });
  CheckRecord aux_size;
  aux_size.name = check_name("aux_size", q);
  CheckRecord aux_hess;
  aux_hess.name = check_name("aux_hessian", q);
  for (const AuxVerdict& a : aux) {
    for (const AuxCheck& c : a.checks) {
      const Json loc{{"Q", q}, {"r", a.r}, {"s", a.s}, {"function", to_string(c.kind)}};
      aux_size.observe(std::min(c.value, c.bound - c.value), !c.size_ok, loc);
      if (c.hessian_checked) {
        aux_hess.observe(c.hessian_margin, !c.hessian_ok, loc);
      } else {
        aux_hess.skip();
      }
    }
  }
  return {aux_size, aux_hess};
}

SuiteOutcome run_suite(const SuiteConfig& cfg) {
  cfg.validate();
  SuiteOutcome outcome;
  outcome.config = cfg;
  for (std::size_t qi = 0; qi < cfg.q_list.size(); ++qi) {
    const QContext ctx = QContext::make(cfg.q_list[qi], cfg.eta_dim);
    const double q = ctx.q;
    QRun run;
    run.q = q;

    const auto points = sample_domain(ctx, cfg.samples_per_q, mix_seed(cfg.seed, qi));
    const auto directions = hessian_directions(5 + ctx.eta_dim, cfg.directions_per_point,
                                               mix_seed(cfg.seed, 0xD1));
    run.verdicts.resize(points.size());
    std::vector<double> unweighted(points.size());
    std::vector<double> mollified(points.size(), std::numeric_limits<double>::quiet_NaN());
    detail::parallel_for(points.size(), [&](std::size_t i) {
      run.verdicts[i] = verify_point(points[i], ctx, cfg, directions);
      const RadialPoint rp = radial(points[i]);
      double u = 0.0;
      for (Component c : kAllComponents) u += eval_component_radial(c, rp, q);
      unweighted[i] = u;
      if (cfg.mollify_eps > 0.0 && mollify_ball_inside(rp, q, cfg.mollify_eps)) {
        mollified[i] = mollify_eval(points[i], ctx, cfg.mollify_eps, cfg.mc_samples,
                                    mix_seed(cfg.seed ^ 0x6d6f6c6cULL, i));
      }
    });

    CheckRecord size;

    size.name = check_name("size", q);
    CheckRecord sign;
    sign.name = check_name("sign", q);
    CheckRecord hessian;
    hessian.name = check_name("hessian", q);
    CheckRecord six;
    six.name = check_name("unweighted_6bound", q);
    six.informational = true;
    CheckRecord moll;
    moll.name = check_name("mollified_size", q);
    double max_ratio = 0.0;
    double max_unweighted_ratio = 0.0;
    double min_deriv_ratio = kInf;
    std::int64_t excluded = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const PointVerdict& v = run.verdicts[i];
      const Json loc = location(q, i, v.point);
      const double scale = v.point.Z + v.point.H;
      size.observe(v.size_margin, !v.size_ok, loc);
      if (v.sign_checked) {
        sign.observe(v.sign_margin, !v.sign_ok, loc);
      } else {
        sign.skip();
      }
      if (v.hessian_checked) {
        hessian.observe(v.hessian_margin, !v.hessian_ok, loc);
        min_deriv_ratio = std::min(min_deriv_ratio, v.min_deriv_ratio);
      } else {
        hessian.skip();
      }
      if (v.excluded_near_pi) ++excluded;
      if (scale > 0.0) {
        max_ratio = std::max(max_ratio, v.value / scale);
        max_unweighted_ratio = std::max(max_unweighted_ratio, unweighted[i] / scale);
      }
      const double six_bound = kUnweightedSizeConstant * scale;
      six.observe(std::min(unweighted[i], six_bound - unweighted[i]) / (1.0 + std::abs(unweighted[i])),
                  unweighted[i] < -kSizeRelTol * scale ||
                      unweighted[i] > six_bound * (1.0 + kSizeRelTol),
                  loc);
      if (cfg.mollify_eps > 0.0) {
        if (std::isnan(mollified[i])) {
          moll.skip();
        } else {
          const double m = mollified[i];
          const double bound = kSizeConstant * (1.0 + cfg.mollify_eps) * scale;
          moll.observe(std::min(m, bound - m) / (1.0 + std::abs(m)),
                       m < -kSizeRelTol * scale || m > bound * (1.0 + kSizeRelTol), loc);
        }
      }
    }
    run.checks = {size, sign, hessian, six};
    if (cfg.mollify_eps > 0.0) run.checks.push_back(moll);

    if (cfg.aux_grid > 0) {
      for (CheckRecord& c : run_aux_checks(ctx, cfg.aux_grid, cfg.fd_step)) {
        run.checks.push_back(std::move(c));
      }
    }

    run.summary = Json{{"Q", q},
                       {"points", points.size()},
                       {"excluded_near_pi", excluded},
                       {"max_bq_over_z_plus_h", max_ratio},
                       {"max_unweighted_over_z_plus_h", max_unweighted_ratio},
                       {"min_deriv_ratio", finite_or_null(min_deriv_ratio)}};
    outcome.runs.push_back(std::move(run));
  }
  return outcome;
}

}  // namespace bellcert
