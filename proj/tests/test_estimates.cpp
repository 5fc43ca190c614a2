#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "bellcert/errors.hpp"
#include "bellcert/estimates.hpp"
#include "oracles.hpp"

using namespace bellcert;
using namespace bellcert::gauss;

namespace {

FlowGrid small_grid() {
  FlowGrid g;
  for (int i = -6; i <= 6; ++i) g.x_nodes.push_back(0.5 * i);
  for (double t : {0.01, 0.1, 0.5, 2.0, 8.0}) g.t_nodes.push_back(t);
  return g;
}

// hhat_0..hhat_{n} at x by the three-term recurrence, written out here.
std::vector<double> hermite_table(int n, double x) {
  std::vector<double> h(static_cast<std::size_t>(n) + 1);
  h[0] = 1.0;
  if (n >= 1) h[1] = x;
  for (int k = 1; k < n; ++k) h[k + 1] = x * h[k] - k * h[k - 1];
  double fact = 1.0;
  for (int k = 1; k <= n; ++k) {
    fact *= k;
    h[k] /= std::sqrt(fact);
  }
  return h;
}

}  // namespace

TEST(Embedding, ExampleAgainstClosedForm) {
  // P_t hhat_1 = e^{-t} x, P_t (hhat_0 dx) = e^{-t}; int t e^{-2t} dt = 1/4.
  const EmbeddingResult r = bilinear_lhs(HermiteFunction::basis(1), OneForm::basis(0),
                                         WeightSpec::constant(1.0), 1.0);
  const double ref = 0.25 * oracle::gaussian_mean([](double x) { return std::sqrt(1 + x * x); });
  EXPECT_NEAR(r.lhs, ref, 1e-7);
  EXPECT_NEAR(r.lhs, 0.338633, 1e-6);
  EXPECT_LE(r.tail_estimate, kTailTarget);
  EXPECT_NEAR(r.bound, kEmbeddingConstant, 1e-12);
  EXPECT_LE(r.ratio, 1.0);
}

TEST(Embedding, ZeroFunction) {
  const EmbeddingResult r = bilinear_lhs(HermiteFunction(std::vector<double>{0.0, 0.0}),
                                         OneForm::basis(1), WeightSpec::constant(1.0), 1.0);
  EXPECT_EQ(r.lhs, 0.0);
  EXPECT_EQ(r.ratio, 0.0);
}

TEST(Embedding, RejectsMean) {
  EXPECT_THROW(bilinear_lhs(HermiteFunction(std::vector<double>{1.0, 1.0}), OneForm::basis(0),
                            WeightSpec::constant(1.0), 1.0),
               DomainError);
}

TEST(Embedding, BilinearScaling) {
  const WeightSpec w = WeightSpec::exp_linear(0.5);
  const HermiteFunction f(std::vector<double>{0.0, 1.0, 0.0, 1.0});
  const OneForm g = OneForm::basis(2);
  const EmbeddingResult a = bilinear_lhs(f, g, w, 2.0);
  const EmbeddingResult b = bilinear_lhs(f * 3.0, g * -0.5, w, 2.0);
  EXPECT_NEAR(b.lhs, 1.5 * a.lhs, 1e-9 * a.lhs);
  EXPECT_NEAR(b.ratio, a.ratio, 1e-9);
}

TEST(Embedding, ExpWeightWithinBound) {
  const EmbeddingResult r = bilinear_lhs(HermiteFunction::basis(2), OneForm::basis(0),
                                         WeightSpec::exp_linear(0.5), small_grid());
  EXPECT_GT(r.lhs, 0.0);
  EXPECT_LE(r.ratio, 1.0);
  EXPECT_GE(r.q2, 1.0);
}

TEST(Riesz, ConstantWeightIsIsometry) {
  EXPECT_NEAR(riesz_subspace_norm(WeightSpec::constant(1.0), 16), 1.0, 1e-12);
  EXPECT_NEAR(riesz_subspace_norm(WeightSpec::exp_linear(0.0), 8), 1.0, 1e-12);
  EXPECT_NEAR(riesz_subspace_norm(WeightSpec::constant(7.0), 8), 1.0, 1e-12);
}

TEST(Riesz, GeneralizedEigenOracle) {
  // sup |R f|_w / |f|_w over span{hhat_1..hhat_n}: largest eigenvalue of A c = l B c with
  // A_jk = int hhat_{j-1} hhat_{k-1} w, B_jk = int hhat_j hhat_k w.
  const int n = 16;
  const double a = 0.5;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k <= j; ++k) {
      A(j, k) = A(k, j) = oracle::gaussian_mean([&](double x) {
        const auto h = hermite_table(n, x);
        return h[j] * h[k] * std::exp(a * x);
      });
      B(j, k) = B(k, j) = oracle::gaussian_mean([&](double x) {
        const auto h = hermite_table(n, x);
        return h[j + 1] * h[k + 1] * std::exp(a * x);
      });
    }
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(A, B);
  ASSERT_EQ(es.info(), Eigen::Success);
  const double ref = std::sqrt(es.eigenvalues().maxCoeff());
  EXPECT_NEAR(riesz_subspace_norm(WeightSpec::exp_linear(a), n), ref, 1e-7 * ref);
}

TEST(Riesz, BoundRatioAndRejects) {
  const NormResult r = weighted_riesz_norm(WeightSpec::exp_linear(1.0), 16, small_grid());
  EXPECT_GE(r.weighted_norm, 1.0);
  EXPECT_LE(r.bound_ratio, 1.0);
  EXPECT_NEAR(r.bound_ratio, r.weighted_norm / (kRieszConstant * r.q2), 1e-15);
  EXPECT_THROW(riesz_subspace_norm(WeightSpec::constant(1.0), 1), DomainError);
}

TEST(Riesz, SymmetricFamily) {
  // x -> -x maps w to w(-x) and preserves the Gauss measure and the subspace norms
  EXPECT_NEAR(riesz_subspace_norm(WeightSpec::exp_linear(0.8), 12),
              riesz_subspace_norm(WeightSpec::exp_linear(-0.8), 12), 1e-10);
}

TEST(Representation, Examples) {
  for (int n : {1, 2, 4, 9}) {
    const ReprResult r = representation_check(n);
    EXPECT_NEAR(r.lhs, 1.0, 1e-12) << n;
    EXPECT_NEAR(r.rhs, -1.0, 1e-8) << n;
    EXPECT_LE(r.abs_gap, 1e-8) << n;
  }
  EXPECT_THROW(representation_check(0), DomainError);
  EXPECT_THROW(representation_pair(HermiteFunction::basis(1), OneForm::basis(0), -1.0), DomainError);
}

TEST(Representation, MismatchedPairIsZero) {
  const ReprResult r = representation_pair(HermiteFunction::basis(3), OneForm::basis(0));
  EXPECT_NEAR(r.lhs, 0.0, 1e-14);
  EXPECT_NEAR(r.rhs, 0.0, 1e-12);
}

TEST(Sweep, ConstantMember) {
  const SweepTable t = sweep_report("exp:a={}", {0.0}, 8, small_grid(), {2, 4});
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_NEAR(t.rows[0].q2_lower, 1.0, 1e-12);
  EXPECT_NEAR(t.rows[0].weighted_norm, 1.0, 1e-12);
  EXPECT_TRUE(t.passed());
}

TEST(Sweep, RejectsBadInput) {
  EXPECT_THROW(sweep_report("exp:a={}", {1.0, 0.5}, 8, small_grid()), DomainError);
  EXPECT_THROW(sweep_report("exp:a=1", {1.0}, 8, small_grid()), DomainError);
  EXPECT_THROW(sweep_report("exp:a={}", {}, 8, small_grid()), DomainError);
  EXPECT_THROW(sweep_report("exp:a={}", {5.0}, 8, small_grid()), DomainError);
}

TEST(Sweep, CsvAndMonotoneQ2) {
  const std::vector<int> ladder{2, 4, 8};
  const SweepTable t = sweep_report("exp:a={}", {0.25, 0.5, 1.0}, 8, small_grid(), ladder);
  std::istringstream in(t.to_csv());
  std::string line;
  int lines = 0;
  std::getline(in, line);
  EXPECT_EQ(line, "param,q2_lower,weighted_norm,bound_ratio,trunc_n,q2_trunc");
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 3 * 3);
  for (std::size_t i = 1; i < t.rows.size(); ++i) {
    EXPECT_GT(t.rows[i].q2_lower, t.rows[i - 1].q2_lower);
    EXPECT_GT(t.rows[i].weighted_norm, t.rows[i - 1].weighted_norm);
  }
  for (const auto& row : t.rows) EXPECT_TRUE(row.ladder_monotone);
}

TEST(Sweep, InstantiateFamily) {
  EXPECT_EQ(instantiate_family("exp:a={}", 0.5), "exp:a=0.5");
  EXPECT_EQ(instantiate_family("trunc:n=4:exp:a={}", 1.0), "trunc:n=4:exp:a=1");
  EXPECT_THROW(instantiate_family("const:c=1", 1.0), DomainError);
}
