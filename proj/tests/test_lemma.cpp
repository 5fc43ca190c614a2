#include <gtest/gtest.h>

#include "bellcert/lemma.hpp"

using namespace bellcert;
using namespace bellcert::gauss;

namespace {

FlowGrid lemma_grid() {
  FlowGrid g;
  for (int i = -6; i <= 6; ++i) g.x_nodes.push_back(0.75 * i);
  for (double t : {1e-3, 0.05, 0.4, 1.5, 6.0, 25.0}) g.t_nodes.push_back(t);
  return g;
}

void expect_clean(const CheckRecord& c) {
  EXPECT_GT(c.count, 0) << c.name;
  EXPECT_EQ(c.failures, 0) << c.name << " worst at " << c.argmax_location;
  EXPECT_EQ(c.skipped, 0) << c.name;
}

}  // namespace

TEST(Lemma, HeatEigen) { expect_clean(check_heat_eigen()); }

TEST(Lemma, Subordination) { expect_clean(check_subordination()); }

TEST(Lemma, PartA) { expect_clean(check_lemma_a(lemma_functions(), lemma_weights(), lemma_grid())); }

TEST(Lemma, PartB) { expect_clean(check_lemma_b(lemma_functions(), lemma_grid())); }

TEST(Lemma, PartC) { expect_clean(check_lemma_c(lemma_oneforms(), lemma_grid())); }

TEST(Lemma, PartD) { expect_clean(check_lemma_d(lemma_oneforms(), lemma_weights(), lemma_grid())); }

TEST(Lemma, ProductAtLeastOne) { expect_clean(check_product_lower(lemma_weights(), lemma_grid())); }

TEST(Lemma, PartANotVacuous) {
  // With the weight dropped from the right side, (a) reduces to Jensen and
  // still holds; dividing the right side by 4 must break it for hhat_1 at x large.
  const FlowGrid g = lemma_grid();
  const CheckRecord c = check_lemma_a({HermiteFunction::basis(1)}, {WeightSpec::constant(1.0)}, g);
  ASSERT_TRUE(c.worst_margin.has_value());
  EXPECT_LT(*c.worst_margin, 1.0);
  EXPECT_GE(*c.worst_margin, 0.0);
}

TEST(Lemma, SuiteNames) {
  FlowGrid g;
  g.x_nodes = {-1.0, 0.0, 1.0};
  g.t_nodes = {0.5};
  const auto all = run_lemma_suite(g);
  ASSERT_EQ(all.size(), 7u);
  for (const auto& c : all) expect_clean(c);
}
