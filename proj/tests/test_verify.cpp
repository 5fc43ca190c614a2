#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bellcert/errors.hpp"
#include "bellcert/verify.hpp"
#include "oracles.hpp"

using namespace bellcert;

namespace {

BellmanPoint pt(double Z, double H, double zeta, std::vector<double> eta, double r, double s) {
  return BellmanPoint{Z, H, zeta, std::move(eta), r, s};
}

double form(const Eigen::MatrixXd& h, const Eigen::VectorXd& d) { return d.dot(h * d); }

Eigen::VectorXd axis(int dim, int i) {
  Eigen::VectorXd d = Eigen::VectorXd::Zero(dim);
  d(i) = 1.0;
  return d;
}

}  // namespace

TEST(Sample, QOneSitsOnBoundary) {
  const QContext ctx = QContext::make(1.0);
  const auto pts = sample_domain(ctx, 50, 4);
  ASSERT_EQ(pts.size(), 50u);
  for (const auto& p : pts) {
    EXPECT_EQ(p.r * p.s, 1.0);
    EXPECT_TRUE(in_domain(p, ctx));
  }
}

TEST(Sample, CountMembershipDeterminism) {
  for (int dim : {1, 3}) {
    const QContext ctx = QContext::make(2.0, dim);
    const auto a = sample_domain(ctx, 1000, 77);
    const auto b = sample_domain(ctx, 1000, 77);
    ASSERT_EQ(a.size(), 1000u);
    for (std::size_t i = 0; i < a.size(); ++i) {
      EXPECT_TRUE(in_domain(a[i], ctx));
      EXPECT_EQ(to_coordinates(a[i]), to_coordinates(b[i]));
    }
    EXPECT_NE(to_coordinates(sample_domain(ctx, 1, 78)[0]), to_coordinates(a[0]));
  }
  EXPECT_THROW(sample_domain(QContext::make(2.0), 0, 1), DomainError);
}

TEST(Sample, CoordinatesRoundTrip) {
  const auto p = pt(1, 2, 0.5, {0.1, -0.2, 0.3}, 1.5, 1.1);
  const auto q = from_coordinates(to_coordinates(p));
  EXPECT_EQ(to_coordinates(q), to_coordinates(p));
  EXPECT_EQ(to_coordinates(p).size(), 8);
}

TEST(FdHessian, B1AnalyticForm) {
  const QContext ctx = QContext::make(2.0);
  const auto p = pt(1, 1, 1, {0}, 1, 1);
  const auto b1 = [](const BellmanPoint& x) {
    return eval_component_radial(Component::B1, radial(x), 2.0);
  };
  const FdHessian h = fd_hessian(b1, p, ctx, 1e-4);
  ASSERT_TRUE(h.ok);
  // -d^2 B1 = (2 zeta^2 / r) |dzeta/zeta - dr/r|^2 + ...; pure dzeta gives 2.
  EXPECT_NEAR(form(h.matrix, axis(6, 2)), -2.0, 1e-6);
  // Mixed zeta-r entry: d^2/dzeta dr (-zeta^2/r) = 2 zeta / r^2.
  EXPECT_NEAR(h.matrix(2, 4), 2.0, 1e-6);
  EXPECT_NEAR(h.matrix(4, 4), -2.0, 1e-6);
}

TEST(FdHessian, AffineInZ) {
  for (double q : {1.0, 2.0, 100.0}) {
    const QContext ctx = QContext::make(q);
    for (const auto& p : sample_domain(ctx, 40, 8)) {
      const FdHessian h = fd_hessian(p, ctx, 1e-4);
      if (!h.ok) continue;
      // roundoff of a second difference is about eps |B| / (h max(1, Z))^2
      const double scale = 1e-6 * (1.0 + std::abs(eval_bq(p, ctx)));
      EXPECT_NEAR(form(h.matrix, axis(6, 0)), 0.0, scale) << q;
    }
  }
}

TEST(FdHessian, RichardsonConsistency) {
  const QContext ctx = QContext::make(10.0);
  const auto p = pt(2, 3, 0.3, {0.5}, 1.2, 2.5);
  ASSERT_TRUE(in_domain(p, ctx));
  ASSERT_GT(pi_distance(p, ctx), 1e-2);
  const FdHessian a = fd_hessian(p, ctx, 1e-3);
  const FdHessian b = fd_hessian(p, ctx, 5e-4);
  ASSERT_TRUE(a.ok && b.ok);
  const Eigen::MatrixXd rich = (4.0 * b.matrix - a.matrix) / 3.0;
  // the O(h^2) error of the coarse step is about 4x that of the fine step
  const double ea = (a.matrix - rich).cwiseAbs().maxCoeff();
  const double eb = (b.matrix - rich).cwiseAbs().maxCoeff();
  EXPECT_LT(ea, 1e-3 * (1.0 + rich.cwiseAbs().maxCoeff()));
  EXPECT_LT(eb, ea);
}

TEST(FdHessian, Symmetric) {
  const QContext ctx = QContext::make(2.0, 2);
  for (const auto& p : sample_domain(ctx, 20, 3)) {
    const FdHessian h = fd_hessian(p, ctx, 1e-4);
    if (!h.ok) continue;
    EXPECT_EQ(h.matrix, h.matrix.transpose());
    EXPECT_EQ(h.matrix.rows(), 7);
  }
}

TEST(FdHessian, RejectsBadStep) {
  EXPECT_THROW(fd_hessian(pt(1, 1, 0, {0}, 1, 1), QContext::make(2.0), 0.0), DomainError);
}

TEST(Directions, UnitAndSuperset) {
  const auto small = hessian_directions(6, 16, 5);
  const auto big = hessian_directions(6, 64, 5);
  ASSERT_EQ(small.size(), 16u + 12u);
  ASSERT_EQ(big.size(), 64u + 12u);
  for (const auto& d : big) EXPECT_NEAR(d.norm(), 1.0, 1e-12);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_EQ(small[i], big[i]);
}

TEST(Directions, MoreDirectionsNeverRescue) {
  const QContext ctx = QContext::make(10.0);
  SuiteConfig few;
  few.directions_per_point = 8;
  SuiteConfig many = few;
  many.directions_per_point = 128;
  for (const auto& p : sample_domain(ctx, 50, 31)) {
    const PointVerdict a = verify_point(p, ctx, few);
    const PointVerdict b = verify_point(p, ctx, many);
    if (!a.hessian_checked) continue;
    EXPECT_LE(b.hessian_margin, a.hessian_margin);
    if (!a.hessian_ok) {
      EXPECT_FALSE(b.hessian_ok);
    }
  }
}

TEST(VerifyPoint, Examples) {
  const SuiteConfig cfg;
  const PointVerdict v = verify_point(pt(1, 1, 0, {0}, 1, 1), QContext::make(1.0), cfg);
  EXPECT_TRUE(v.size_ok);
  EXPECT_NEAR(v.value, 136.808695, 1e-6);

  const PointVerdict z = verify_point(pt(0, 0, 0, {0}, 1, 1), QContext::make(2.0), cfg);
  EXPECT_TRUE(z.size_ok);
  EXPECT_EQ(z.value, 0.0);

  const double r = 1.0;
  const double s = 1.5;
  const double k = oracle::kay(r, s, 2.0) / 2.0;
  const PointVerdict on_pi =
      verify_point(pt(1, 4, 0.5, {0.5 * s / k}, r, s), QContext::make(2.0), cfg);
  EXPECT_TRUE(on_pi.excluded_near_pi);
  EXPECT_FALSE(on_pi.hessian_checked);
  EXPECT_FALSE(on_pi.skip_reason.empty());
}

TEST(VerifyPoint, PassesOnSamples) {
  SuiteConfig cfg;
  for (double q : {1.0, 2.0, 10.0, 100.0}) {
    const QContext ctx = QContext::make(q);
    for (const auto& p : sample_domain(ctx, 200, 17)) {
      const PointVerdict v = verify_point(p, ctx, cfg);
      EXPECT_TRUE(v.ok()) << "Q=" << q << " margin " << v.worst_margin;
    }
  }
}

TEST(VerifyPoint, ConcavitySlackMatchesDefinition) {
  Eigen::MatrixXd h = -Eigen::MatrixXd::Identity(6, 6);
  Eigen::VectorXd d = Eigen::VectorXd::Zero(6);
  d(2) = std::sqrt(0.5);
  d(3) = std::sqrt(0.5);
  EXPECT_NEAR(concavity_slack(h, d, 1, 2.0), 1.0 - 2.0 * 0.5, 1e-15);
}

TEST(VerifyAux, Examples) {
  const AuxVerdict a = verify_aux(1, 2, QContext::make(2.0), 1e-4);
  EXPECT_DOUBLE_EQ(a.checks[0].value, 14.0);
  EXPECT_DOUBLE_EQ(a.checks[0].bound, 40.0);
  EXPECT_TRUE(a.checks[0].size_ok);

  const AuxVerdict b = verify_aux(1, 1, QContext::make(1.0), 1e-4);
  EXPECT_DOUBLE_EQ(b.checks[2].value, 0.75);
  EXPECT_TRUE(b.checks[2].size_ok);
  ASSERT_TRUE(b.checks[0].hessian_checked);
  EXPECT_TRUE(b.checks[0].hessian_ok);
  // -d^2 M = 8Q^2/r^3 dr^2 + 4 s dr ds + 2 r ds^2 minus r ds^2, minimized over the 16 directions.
  double ref = 1e300;
  for (int k = 0; k < 16; ++k) {
    const double c = std::cos(k * std::numbers::pi / 16);
    const double sn = std::sin(k * std::numbers::pi / 16);
    ref = std::min(ref, 8.0 * c * c + 4.0 * c * sn + sn * sn);
  }
  EXPECT_NEAR(b.checks[0].hessian_margin, ref, 1e-5);
}

TEST(VerifyAux, GridPasses) {
  for (double q : {1.0, 2.0, 10.0, 100.0}) {
    for (const CheckRecord& c : run_aux_checks(QContext::make(q), 40, 1e-4)) {
      EXPECT_EQ(c.failures, 0) << c.name;
      EXPECT_EQ(c.skipped, 0) << c.name;
    }
  }
}

TEST(Mollify, SmallEpsMatchesPoint) {
  const QContext ctx = QContext::make(4.0);
  const auto p = pt(3, 2, 0.4, {0.6}, 1.3, 1.6);
  ASSERT_TRUE(in_domain(p, ctx));
  const double v = eval_bq(p, ctx);
  EXPECT_EQ(mollify_eval(p, ctx, 0.0, 10, 1), v);
  EXPECT_NEAR(mollify_eval(p, ctx, 1e-8, 64, 1), v, 1e-5);
}

TEST(Mollify, FlatRegionAgainstDirectMonteCarlo) {
  const QContext ctx = QContext::make(4.0);
  const auto p = pt(100, 100, 0, {0}, 1.5, 1.5);
  const double eps = 0.1;
  const double v = mollify_eval(p, ctx, eps, 200000, 9);

  // Rejection sampling of the bump in the unit ball of R^6.
  std::mt19937_64 gen(12345);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double num = 0.0;
  double den = 0.0;
  const RadialPoint rp = radial(p);
  for (int n = 0; n < 1000000; ++n) {
    double x[6];
    double r2 = 0.0;
    for (double& c : x) {
      c = u(gen);
      r2 += c * c;
    }
    if (r2 >= 1.0) continue;
    const double w = std::exp(-1.0 / (1.0 - r2));
    const RadialPoint y{rp.Z + eps * x[0], rp.H + eps * x[1], std::abs(eps * x[2]),
                        std::abs(eps * x[3]), rp.r + eps * x[4], rp.s + eps * x[5]};
    num += w * eval_radial(y, ctx.q);
    den += w;
  }
  const double ref = num / den;
  EXPECT_NEAR(v, ref, 1e-4 * ref);
  EXPECT_NEAR(v, eval_bq(p, ctx), 1e-3 * v);
}

TEST(Mollify, SizeBound) {
  const QContext ctx = QContext::make(10.0);
  const double eps = 0.05;
  int used = 0;
  for (const auto& p : sample_domain(ctx, 200, 41)) {
    if (!mollify_ball_inside(radial(p), ctx.q, eps)) continue;
    ++used;
    const double m = mollify_eval(p, ctx, eps, 64, 2);
    EXPECT_GE(m, 0.0);
    EXPECT_LE(m, 80.0 * (1.0 + eps) * (p.Z + p.H));
  }
  EXPECT_GT(used, 10);
}

TEST(Mollify, RejectsBallOutside) {
  const QContext ctx = QContext::make(2.0);
  EXPECT_THROW(mollify_eval(pt(1, 1, 1, {1}, 1, 1), ctx, 0.1, 16, 1), DomainError);
}

TEST(Mollify, ConvergesAsEpsShrinks) {
  const QContext ctx = QContext::make(4.0);
  const auto p = pt(3, 2, 0.4, {0.6}, 1.3, 1.6);
  const double v = eval_bq(p, ctx);
  const double e1 = std::abs(mollify_eval(p, ctx, 0.02, 4000, 3) - v);
  const double e2 = std::abs(mollify_eval(p, ctx, 0.002, 4000, 3) - v);
  EXPECT_LT(e2, e1);
}

TEST(Suite, CardinalityAndDeterminism) {
  SuiteConfig cfg;
  cfg.q_list = {1.0};
  cfg.samples_per_q = 100;
  cfg.aux_grid = 10;
  const SuiteOutcome a = run_suite(cfg);
  ASSERT_EQ(a.runs.size(), 1u);
  EXPECT_EQ(a.runs[0].verdicts.size(), 100u);
  EXPECT_TRUE(a.passed());
  VerificationReport ra = a.report(true);
  VerificationReport rb = run_suite(cfg).report(true);
  ra.timestamp = "x";
  rb.timestamp = "y";
  Json ja = ra;
  Json jb = rb;
  ja.erase("timestamp");
  jb.erase("timestamp");
  EXPECT_EQ(ja.dump(), jb.dump());
  EXPECT_EQ(ja["results"]["runs"][0]["verdicts"].size(), 100u);
}

TEST(Suite, RejectsBadConfig) {
  SuiteConfig cfg;
  cfg.samples_per_q = 0;
  EXPECT_THROW(run_suite(cfg), DomainError);
  cfg = SuiteConfig{};
  cfg.fd_step = 0.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = SuiteConfig{};
  cfg.pi_exclusion = -1.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg = SuiteConfig{};
  cfg.q_list = {2.0, 0.5};
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Suite, ConfigJsonRoundTrip) {
  SuiteConfig cfg;
  cfg.q_list = {1.5, 7.0};
  cfg.seed = 0xFFFFFFFFFFFFFFFFULL;
  cfg.mollify_eps = 0.01;
  Json j = cfg;
  const SuiteConfig back = j.get<SuiteConfig>();
  EXPECT_EQ(Json(back).dump(), j.dump());
}

TEST(Suite, MollifiedAndUnweightedChecksReported) {
  SuiteConfig cfg;
  cfg.q_list = {10.0};
  cfg.samples_per_q = 100;
  cfg.aux_grid = 0;
  cfg.mollify_eps = 0.01;
  cfg.mc_samples = 32;
  const VerificationReport r = run_suite(cfg).report(false);
  ASSERT_NE(r.find("mollified_size[Q=10]"), nullptr);
  const CheckRecord* six = r.find("unweighted_6bound[Q=10]");
  ASSERT_NE(six, nullptr);
  EXPECT_TRUE(six->informational);
  EXPECT_EQ(r.find("aux_size[Q=10]"), nullptr);
}
