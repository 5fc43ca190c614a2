#include "bellcert/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>

#include "bellcert/errors.hpp"
#include "bellcert/estimates.hpp"
#include "bellcert/flow.hpp"
#include "bellcert/lemma.hpp"
#include "bellcert/verify.hpp"

namespace bellcert::cli {

namespace {

using gauss::FlowGrid;
using gauss::WeightSpec;

struct GridOptions {
  double x_max = 8.0;
  double x_step = 0.25;
  double t_min = 1e-3;
  double t_max = 32.0;
  int t_count = 40;
  int sub_nodes = gauss::kDefaultSubordinationNodes;

  FlowGrid build() const {
    if (!(x_step > 0.0) || !(x_max >= 0.0)) throw DomainError("x grid needs x_step > 0, x_max >= 0");
    if (!(t_min > 0.0) || !(t_max >= t_min) || t_count < 1) {
      throw DomainError("t grid needs 0 < t_min <= t_max and t_count >= 1");
    }
    if (t_count > 1 && t_max == t_min) throw DomainError("t grid collapses to one point");
    FlowGrid g;
    const auto half = static_cast<int>(std::floor(x_max / x_step + 1e-9));
    for (int i = -half; i <= half; ++i) g.x_nodes.push_back(i * x_step);
    if (t_count == 1) {
      g.t_nodes.push_back(t_min);
    } else {
      const double lo = std::log(t_min);
      const double hi = std::log(t_max);
      for (int k = 0; k < t_count; ++k) {
        g.t_nodes.push_back(std::exp(lo + (hi - lo) * k / (t_count - 1)));
      }
    }
    g.sub_nodes = sub_nodes;
    g.validate();
    return g;
  }

  Json echo() const {
    return Json{{"x_max", x_max},     {"x_step", x_step},   {"t_min", t_min},
                {"t_max", t_max},     {"t_count", t_count}, {"sub_nodes", sub_nodes}};
  }
};

void add_grid_options(CLI::App* sub, GridOptions& g) {
  sub->add_option("--x-max", g.x_max, "x grid is symmetric on [-x_max, x_max]")->capture_default_str();
  sub->add_option("--x-step", g.x_step, "x grid spacing")->capture_default_str();
  sub->add_option("--t-min", g.t_min, "smallest t node")->capture_default_str();
  sub->add_option("--t-max", g.t_max, "largest t node")->capture_default_str();
  sub->add_option("--t-count", g.t_count, "number of log-spaced t nodes")->capture_default_str();
  sub->add_option("--sub-nodes", g.sub_nodes, "subordination trapezoid nodes")->capture_default_str();
}

// A computed subcommand: the report, plus an optional CSV body that replaces
// the generic per-check table.
struct Outcome {
  VerificationReport report;
  std::optional<std::string> csv;
};

using Handler = std::function<Outcome()>;

std::string checks_csv(const VerificationReport& r) {
  std::ostringstream os;
  os.precision(17);
  os << "name,count,failures,skipped,worst_margin,informational\n";
  for (const CheckRecord& c : r.checks) {
    os << c.name << ',' << c.count << ',' << c.failures << ',' << c.skipped << ',';
    if (c.worst_margin) os << *c.worst_margin;
    os << ',' << (c.informational ? "true" : "false") << '\n';
  }
  return os.str();
}

CheckRecord named(const std::string& name) {
  CheckRecord c;
  c.name = name;
  return c;
}

void require_writable(const std::string& path) {
  if (path.empty()) return;
  const std::filesystem::path p(path);
  const std::filesystem::path dir = p.has_parent_path() ? p.parent_path() : ".";
  if (!std::filesystem::is_directory(dir)) {
    throw DomainError("output directory does not exist: " + dir.string());
  }
}

// Writes through a sibling temporary file so a reader never sees a partial report.
void write_atomic(const std::string& path, const std::string& body) {
  const std::string tmp = path + ".partial";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open " + tmp);
    f << body;
    if (!f.flush()) throw std::runtime_error("cannot write " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

Outcome verify_bellman(const SuiteConfig& cfg) {
  cfg.validate();
  Outcome o;
  const SuiteOutcome suite = run_suite(cfg);
  o.report = suite.report(true);
  return o;
}

Outcome aux_bounds(const std::vector<double>& qs, int grid, double h) {
  if (qs.empty()) throw DomainError("--q must list at least one value");
  std::vector<QContext> ctxs;
  for (double q : qs) ctxs.push_back(QContext::make(q, 1));
  if (grid < 2) throw DomainError("--grid must be >= 2");
  if (!(h > 0.0)) throw DomainError("--fd-step must be positive");
  Outcome o;
  for (const QContext& ctx : ctxs) {
    for (CheckRecord& c : run_aux_checks(ctx, grid, h)) o.report.checks.push_back(std::move(c));
  }
  return o;
}

Outcome a2(const WeightSpec& w, const FlowGrid& grid) {
  Outcome o;
  const gauss::Q2Result q = gauss::q2_characteristic(w, grid);
  o.report.results = Json{{"weight", w.to_string()},
                          {"q2_lower", q.value},
                          {"argmax_x", q.argmax_x},
                          {"argmax_t", finite_or_null(q.argmax_t)},
                          {"at_limit", q.at_limit},
                          {"limit_value", q.limit_value},
                          {"grid_max", q.grid_max}};
  CheckRecord c = named("q2_at_least_one");
  const double margin = q.value - (1.0 - gauss::kProductSlack);
  c.observe(margin, margin < 0.0, Json{{"x", q.argmax_x}, {"t", finite_or_null(q.argmax_t)}});
  o.report.checks.push_back(c);
  return o;
}

Outcome riesz_norm(const WeightSpec& w, int n, const FlowGrid& grid) {
  if (n < 2) throw DomainError("--n must be >= 2");
  Outcome o;
  const gauss::NormResult r = gauss::weighted_riesz_norm(w, n, grid);
  o.report.results = r;
  o.report.results["weight"] = w.to_string();
  CheckRecord c = named("corollary_bound");
  const double margin = gauss::kRieszConstant * r.q2 + 1e-6 - r.weighted_norm;
  c.observe(margin, margin < 0.0, Json{{"weight", w.to_string()}, {"n", n}});
  o.report.checks.push_back(c);
  return o;
}

Outcome embedding(const std::vector<double>& fc, const std::vector<double>& gc, const WeightSpec& w,
                  const FlowGrid& grid) {
  const gauss::HermiteFunction f(fc);
  const gauss::OneForm g(gc);
  if (f.coeff(0) != 0.0) throw DomainError("--f must have a zero constant coefficient");
  Outcome o;
  const gauss::EmbeddingResult r = gauss::bilinear_lhs(f, g, w, grid);
  o.report.results = r;
  o.report.results["weight"] = w.to_string();
  CheckRecord c = named("theorem1_bound");
  const double margin = r.bound + 1e-6 - r.lhs;
  c.observe(margin, margin < 0.0, Json{{"weight", w.to_string()}});
  o.report.checks.push_back(c);
  return o;
}

Outcome repr_check(const std::vector<int>& ns, double t_max) {
  if (ns.empty()) throw DomainError("--n must list at least one value");
  for (int n : ns) {
    if (n < 1) throw DomainError("--n values must be >= 1");
  }
  if (!(t_max > 0.0)) throw DomainError("--t-max must be positive");
  Outcome o;
  CheckRecord c = named("representation_gap");
  Json rows = Json::array();
  for (int n : ns) {
    const gauss::ReprResult r = gauss::representation_check(n, t_max);
    Json row = r;
    row["n"] = n;
    rows.push_back(row);
    const double margin = 1e-6 - r.abs_gap;
    c.observe(margin, margin < 0.0, Json{{"n", n}});
  }
  o.report.results = Json{{"pairs", rows}};
  o.report.checks.push_back(c);
  return o;
}

Outcome sweep(const std::string& family, const std::vector<double>& params, int n,
              const std::vector<int>& ladder, const FlowGrid& grid) {
  if (n < 2) throw DomainError("--n must be >= 2");
  Outcome o;
  const gauss::SweepTable t = gauss::sweep_report(family, params, n, grid, ladder);
  o.report.results = t;
  CheckRecord bound = named("corollary_bound");
  CheckRecord ladder_check = named("truncation_monotone");
  for (const gauss::SweepRow& r : t.rows) {
    const Json loc{{"param", r.param}};
    bound.observe(1.0 - r.bound_ratio, !r.bound_ok, loc);
    double worst = std::numeric_limits<double>::infinity();
    for (std::size_t k = 1; k < r.ladder.size(); ++k) {
      worst = std::min(worst, r.ladder[k].second - r.ladder[k - 1].second);
    }
    ladder_check.observe(r.ladder.size() > 1 ? worst : 0.0, !r.ladder_monotone, loc);
  }
  o.report.checks = {bound, ladder_check};
  o.csv = t.to_csv();
  return o;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Numerical certificates for the Bellman function and the Gauss-space model",
               "bellcert"};
  app.set_version_flag("--version", std::string(BELLCERT_VERSION));
  app.set_config("--config", "", "TOML file with option values (flags override it)");
  app.allow_config_extras(CLI::config_extras_mode::error);
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string out_path;
  std::string format = "json";
  app.add_option("--out", out_path, "report path (stdout when omitted)");
  app.add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}))
      ->capture_default_str();

  Handler handler;
  Json echo;

  // verify-bellman
  SuiteConfig suite;
  auto* vb = app.add_subcommand("verify-bellman", "sample D_Q and check size, sign and concavity");
  vb->add_option("--q", suite.q_list, "values of Q")->delimiter(',')->capture_default_str();
  vb->add_option("--samples", suite.samples_per_q, "points per Q")->capture_default_str();
  vb->add_option("--eta-dim", suite.eta_dim, "dimension of eta")->capture_default_str();
  vb->add_option("--seed", suite.seed, "64-bit seed")->capture_default_str();
  vb->add_option("--fd-step", suite.fd_step, "finite-difference step")->capture_default_str();
  vb->add_option("--pi-exclusion", suite.pi_exclusion, "relative distance to Pi below which the Hessian check is skipped")
      ->capture_default_str();
  vb->add_option("--directions", suite.directions_per_point, "random directions per point")
      ->capture_default_str();
  vb->add_option("--mollify-eps", suite.mollify_eps, "mollifier radius (0 disables)")
      ->capture_default_str();
  vb->add_option("--mc-samples", suite.mc_samples, "Monte-Carlo samples per mollified value")
      ->capture_default_str();
  vb->add_option("--aux-grid", suite.aux_grid, "auxiliary-function grid size (0 disables)")
      ->capture_default_str();
  vb->callback([&] {
    echo = suite;
    handler = [&] { return verify_bellman(suite); };
  });

  // aux-bounds
  std::vector<double> aux_q{1.0, 2.0, 10.0, 100.0};
  int aux_n = 200;
  double aux_h = 1e-4;
  auto* ab = app.add_subcommand("aux-bounds", "size and Hessian bounds of M, N, K, Mtilde, Ntilde");
  ab->add_option("--q", aux_q, "values of Q")->delimiter(',')->capture_default_str();
  ab->add_option("--grid", aux_n, "grid size per axis")->capture_default_str();
  ab->add_option("--fd-step", aux_h, "finite-difference step")->capture_default_str();
  ab->callback([&] {
    echo = Json{{"q_list", aux_q}, {"grid", aux_n}, {"fd_step", aux_h}};
    handler = [&] { return aux_bounds(aux_q, aux_n, aux_h); };
  });

  // Weight-based subcommands share the grid and weight options.
  GridOptions grid_opts;
  std::string weight_text = "exp:a=1";

  auto* a2c = app.add_subcommand("a2", "lower bound of the Poisson-A2 characteristic");
  a2c->add_option("--weight", weight_text, "weight grammar")->capture_default_str();
  add_grid_options(a2c, grid_opts);
  a2c->callback([&] {
    echo = Json{{"weight", weight_text}, {"grid", grid_opts.echo()}};
    handler = [&] { return a2(WeightSpec::parse(weight_text), grid_opts.build()); };
  });

  int riesz_n = 32;
  auto* rn = app.add_subcommand("riesz-norm", "weighted Riesz-transform norm on span{h_1..h_N}");
  rn->add_option("--weight", weight_text, "weight grammar")->capture_default_str();
  rn->add_option("--n", riesz_n, "subspace dimension N")->capture_default_str();
  add_grid_options(rn, grid_opts);
  rn->callback([&] {
    echo = Json{{"weight", weight_text}, {"n", riesz_n}, {"grid", grid_opts.echo()}};
    handler = [&] { return riesz_norm(WeightSpec::parse(weight_text), riesz_n, grid_opts.build()); };
  });

  std::vector<double> f_coeffs{0.0, 1.0};
  std::vector<double> g_coeffs{1.0};
  auto* em = app.add_subcommand("embedding", "bilinear embedding left side against its bound");
  em->add_option("--weight", weight_text, "weight grammar")->capture_default_str();
  em->add_option("--f", f_coeffs, "Hermite coefficients of f")->delimiter(',')->capture_default_str();
  em->add_option("--g", g_coeffs, "Hermite coefficients of the dx-component of g")
      ->delimiter(',')
      ->capture_default_str();
  add_grid_options(em, grid_opts);
  em->callback([&] {
    echo = Json{{"weight", weight_text}, {"f", f_coeffs}, {"g", g_coeffs}, {"grid", grid_opts.echo()}};
    handler = [&] {
      return embedding(f_coeffs, g_coeffs, WeightSpec::parse(weight_text), grid_opts.build());
    };
  });

  std::vector<int> repr_n{1, 2, 4, 9};
  double repr_t = gauss::kReprTruncation;
  auto* rc = app.add_subcommand("repr-check", "representation formula on (h_n, h_{n-1} dx)");
  rc->add_option("--n", repr_n, "values of n")->delimiter(',')->capture_default_str();
  rc->add_option("--t-max", repr_t, "t truncation")->capture_default_str();
  rc->callback([&] {
    echo = Json{{"n", repr_n}, {"t_max", repr_t}};
    handler = [&] { return repr_check(repr_n, repr_t); };
  });

  std::string family = "exp:a={}";
  std::vector<double> params{0.0, 0.5, 1.0, 1.5, 2.0};
  int sweep_n = 32;
  std::vector<int> ladder = gauss::kTruncationLadder;
  auto* sw = app.add_subcommand("sweep", "q2, Riesz norm and truncation ladder over a weight family");
  sw->add_option("--family", family, "weight template with a {} placeholder")->capture_default_str();
  sw->add_option("--params", params, "ascending parameter values")->delimiter(',')->capture_default_str();
  sw->add_option("--n", sweep_n, "subspace dimension N")->capture_default_str();
  sw->add_option("--ladder", ladder, "truncation levels")->delimiter(',')->capture_default_str();
  add_grid_options(sw, grid_opts);
  sw->callback([&] {
    echo = Json{{"family", family}, {"params", params}, {"n", sweep_n}, {"ladder", ladder},
                {"grid", grid_opts.echo()}};
    handler = [&] { return sweep(family, params, sweep_n, ladder, grid_opts.build()); };
  });

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitPass : kExitUsage;
  }

  Outcome outcome;
  try {
    require_writable(out_path);
    outcome = handler();
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "computation failed: " << e.what() << '\n';
    return kExitFail;
  }

  VerificationReport& report = outcome.report;
  report.config_echo = Json{{"subcommand", app.get_subcommands().front()->get_name()},
                            {"format", format},
                            {"parameters", echo}};
  report.timestamp = utc_timestamp();

  std::string body;
  if (format == "csv") {
    body = outcome.csv ? *outcome.csv : checks_csv(report);
  } else {
    body = Json(report).dump(2) + "\n";
  }
  try {
    if (out_path.empty()) {
      out << body;
    } else {
      write_atomic(out_path, body);
    }
  } catch (const std::exception& e) {
    err << "cannot write report: " << e.what() << '\n';
    return kExitUsage;
  }
  return report.passed() ? kExitPass : kExitFail;
}

}  // namespace bellcert::cli
