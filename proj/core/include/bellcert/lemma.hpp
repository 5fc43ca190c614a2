#pragma once

// Property checks inside the Gauss-space model: validation of the quadrature
// semigroups against the spectral ones, and the four pointwise inequalities
// relating P_t, the one-form flow and a weight. Each check returns an
// aggregated record with margin = (right side + slack) - (left side).

#include <vector>

#include "bellcert/flow.hpp"
#include "bellcert/report.hpp"

namespace bellcert::gauss {

inline constexpr double kHeatEigenTol = 1e-8;
inline constexpr double kSubordinationTol = 1e-6;
inline constexpr double kLemmaSlack = 1e-8;
inline constexpr double kProductSlack = 1e-10;

/// Mehler-quadrature e^{sL} hhat_n, projected back on hhat_0..hhat_{max_n},
/// against e^{-ns} delta_{kn}.
CheckRecord check_heat_eigen(int max_n = 12, const std::vector<double>& s_list = {0.1, 1.0});

/// Subordinated P_t hhat_n against e^{-t sqrt(n)} hhat_n, and the one-form
/// flow of hhat_m dx against e^{-t sqrt(m+1)} hhat_m, at a few sample x.
CheckRecord check_subordination(int max_n = 8, const std::vector<double>& t_list = {0.25, 1.0, 4.0},
                                int sub_nodes = kDefaultSubordinationNodes);

/// (a) |P_t f|^2 <= P_t(|f|^2 w) P_t w^{-1} on the grid.
CheckRecord check_lemma_a(const std::vector<HermiteFunction>& fs, const std::vector<WeightSpec>& ws,
                          const FlowGrid& grid);

/// (b) d P_t f == P_t d f coefficientwise, for every t in the grid.
CheckRecord check_lemma_b(const std::vector<HermiteFunction>& fs, const FlowGrid& grid);

/// (c) |e^{t Hodge} g|(x) <= e^{tL}|g|(x) on the grid.
CheckRecord check_lemma_c(const std::vector<OneForm>& gs, const FlowGrid& grid);

/// (d) |P_t g|^2 <= P_t(|g|^2 w^{-1}) P_t w on the grid.
CheckRecord check_lemma_d(const std::vector<OneForm>& gs, const std::vector<WeightSpec>& ws,
                          const FlowGrid& grid);

/// P_t w P_t w^{-1} >= 1 - kProductSlack on the grid.
CheckRecord check_product_lower(const std::vector<WeightSpec>& ws, const FlowGrid& grid);

std::vector<HermiteFunction> lemma_functions();
std::vector<OneForm> lemma_oneforms();
std::vector<WeightSpec> lemma_weights();

/// All of the above with the default test sets.
std::vector<CheckRecord> run_lemma_suite(const FlowGrid& grid);

}  // namespace bellcert::gauss
