#pragma once

// Desk-scale checks of the bilinear embedding, the weighted Riesz bound,
// the representation formula and weight-family sweeps, all in the
// one-dimensional Gauss-space model.

#include <string>
#include <utility>
#include <vector>

#include "bellcert/flow.hpp"
#include "bellcert/report.hpp"

namespace bellcert::gauss {

inline constexpr double kEmbeddingConstant = 20.0;
inline constexpr double kRieszConstant = 80.0;
inline constexpr double kTailTarget = 1e-8;
inline constexpr double kReprTruncation = 20.0;

struct EmbeddingResult {
  double lhs = 0.0;
  double bound = 0.0;  // 20 q2 |f|_w |g|_{w^{-1}}
  double ratio = 0.0;  // lhs / bound, 0 when bound == 0
  double t_truncation = 0.0;
  double tail_estimate = 0.0;
  double q2 = 0.0;
  double f_norm = 0.0;
  double g_norm = 0.0;
};

/// Space-time integral of |grad P_t f| |grad P_t g| t. Throws DomainError if
/// f has a constant component.
EmbeddingResult bilinear_lhs(const HermiteFunction& f, const OneForm& g, const WeightSpec& w,
                             const FlowGrid& grid);
/// Same, with a precomputed q2 lower bound.
EmbeddingResult bilinear_lhs(const HermiteFunction& f, const OneForm& g, const WeightSpec& w,
                             double q2);

struct NormResult {
  double weighted_norm = 0.0;
  double q2 = 0.0;
  double bound_ratio = 0.0;  // weighted_norm / (80 q2)
  int n = 0;
};

/// Norm of the Riesz transform restricted to span{hhat_1..hhat_n} in L^2(w).
/// Throws NumericalError if the Gram matrix is numerically singular.
double riesz_subspace_norm(const WeightSpec& w, int n, int quad_order = 0);

NormResult weighted_riesz_norm(const WeightSpec& w, int n, const FlowGrid& grid);
NormResult weighted_riesz_norm(const WeightSpec& w, int n);

struct ReprResult {
  double lhs = 0.0;  // <R f, g>
  double rhs = 0.0;  // 4 int <d P_t f, d/dt P_t g> t dt, signed
  double abs_gap = 0.0;
  double t_truncation = 0.0;
  double tail = 0.0;  // bound on the discarded part of rhs
};

ReprResult representation_pair(const HermiteFunction& f, const OneForm& g,
                               double t_max = kReprTruncation);
/// f = hhat_n, g = hhat_{n-1} dx.
ReprResult representation_check(int n, double t_max = kReprTruncation);

struct SweepRow {
  double param = 0.0;
  std::string weight;
  double q2_lower = 0.0;
  double weighted_norm = 0.0;
  double bound_ratio = 0.0;
  std::vector<std::pair<int, double>> ladder;  // (n, q2 of the truncation)
  bool bound_ok = false;
  bool ladder_monotone = false;
};

struct SweepTable {
  std::string family;
  int n = 0;
  std::vector<SweepRow> rows;

  bool passed() const;
  /// param,q2_lower,weighted_norm,bound_ratio,trunc_n,q2_trunc (one line per ladder level).
  std::string to_csv() const;
};

inline const std::vector<int> kTruncationLadder{2, 4, 8, 16, 32};

/// `family` is a weight with a "{}" placeholder, e.g. "exp:a={}". params must be ascending.
SweepTable sweep_report(const std::string& family, const std::vector<double>& params, int n,
                        const FlowGrid& grid, const std::vector<int>& ladder = kTruncationLadder);

/// Substitutes the parameter into the family template.
std::string instantiate_family(const std::string& family, double param);

void to_json(Json& j, const EmbeddingResult& r);
void to_json(Json& j, const NormResult& r);
void to_json(Json& j, const ReprResult& r);
void to_json(Json& j, const SweepRow& r);
void to_json(Json& j, const SweepTable& t);

}  // namespace bellcert::gauss
