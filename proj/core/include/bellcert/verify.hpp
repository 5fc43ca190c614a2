#pragma once

// Numerical certification of the Bellman function: deterministic sampling of
// D_Q, central finite-difference Hessians, and per-point checks of the size,
// concavity and nu-monotonicity properties, plus the auxiliary-function
// certificates and the mollified evaluation.

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bellcert/bellman.hpp"
#include "bellcert/report.hpp"

namespace bellcert {

struct SuiteConfig {
  std::vector<double> q_list{1.0, 2.0, 10.0, 100.0};
  int samples_per_q = 1000;
  int eta_dim = 1;
  std::uint64_t seed = 20240607;
  double fd_step = 1e-4;
  double pi_exclusion = 1e-3;
  int directions_per_point = 64;
  double mollify_eps = 0.0;  // 0 disables the mollified size check
  int mc_samples = 256;
  int aux_grid = 200;  // aux certificates on an aux_grid x aux_grid (r, s) grid; 0 disables

  /// Throws DomainError on an invalid field.
  void validate() const;
};

void to_json(Json& j, const SuiteConfig& c);
void from_json(const Json& j, SuiteConfig& c);

// Tolerances of the per-point checks. Margins are normalized by (1 + |B_Q|).
inline constexpr double kSizeRelTol = 1e-10;
inline constexpr double kSignTol = 1e-6;
inline constexpr double kHessianTol = 1e-4;
inline constexpr double kAuxSlack = 1e-6;

inline constexpr double kSampleMargin = 1e-3;
inline constexpr double kRatioSpread = 1e2;   // r/s log-uniform in [1e-2, 1e2]
inline constexpr double kSizeSpread = 1e3;    // Z, H log-uniform in [1e-3, 1e3]
inline constexpr double kStencilBand = 1e-2;  // rs may leave [1, Q] by this much
inline constexpr int kMaxHalvings = 8;

/// `count` points strictly inside D_Q, deterministic in `seed`.
std::vector<BellmanPoint> sample_domain(const QContext& ctx, int count, std::uint64_t seed);

/// Region in which finite-difference stencil points may be placed: the
/// closed form is defined there (see kStencilBand).
bool stencil_admissible(const RadialPoint& p, double q);

/// Coordinates (Z, H, zeta, eta..., r, s) of a point, length 5 + eta_dim.
Eigen::VectorXd to_coordinates(const BellmanPoint& p);
BellmanPoint from_coordinates(const Eigen::VectorXd& x);

struct FdHessian {
  bool ok = false;
  Eigen::MatrixXd matrix;  // symmetric, (5 + eta_dim) square
  double step = 0.0;       // base step h after halvings
  int halvings = 0;
  std::string reason;      // set when !ok
};

/// Function of a point that may be evaluated off D_Q (inside the stencil region).
using PointFunction = std::function<double(const BellmanPoint&)>;

/// Central second differences of `f` with per-coordinate step h max(1, |x_i|).
FdHessian fd_hessian(const PointFunction& f, const BellmanPoint& p, const QContext& ctx,
                     double h);
/// Same, for B_Q itself.
FdHessian fd_hessian(const BellmanPoint& p, const QContext& ctx, double h);

/// Unit directions used by the concavity check: `random_count` seeded
/// Gaussian directions followed by the 2 dim signed coordinate axes.
/// A larger random_count yields a superset of directions.
std::vector<Eigen::VectorXd> hessian_directions(int dim, int random_count,
                                                std::uint64_t seed);

/// <-H d, d> - (4/Q) |d_zeta| |d_eta|.
double concavity_slack(const Eigen::MatrixXd& hessian, const Eigen::VectorXd& dir,
                       int eta_dim, double q);

struct PointVerdict {
  BellmanPoint point;
  double value = 0.0;
  bool size_ok = false;
  bool sign_ok = false;
  bool sign_checked = false;
  bool hessian_ok = false;
  bool hessian_checked = false;
  bool excluded_near_pi = false;
  double size_margin = 0.0;
  double sign_margin = 0.0;
  double hessian_margin = 0.0;
  double worst_margin = 0.0;
  double min_deriv_ratio = 0.0;  // min <-H d, d> / ((4/Q)|d_zeta||d_eta|), where defined
  std::string skip_reason;

  bool ok() const { return size_ok && (!sign_checked || sign_ok) && (!hessian_checked || hessian_ok); }
};

PointVerdict verify_point(const BellmanPoint& p, const QContext& ctx, const SuiteConfig& cfg);
/// Overload reusing a precomputed direction set.
PointVerdict verify_point(const BellmanPoint& p, const QContext& ctx, const SuiteConfig& cfg,
                          const std::vector<Eigen::VectorXd>& directions);

/// Right-hand side of the auxiliary Hessian bound in direction (dr, ds):
/// r ds^2, s dr^2, |dr ds|/4, |dr ds|/s, |dr ds|/r.
double aux_hessian_rhs(AuxKind kind, double r, double s, double dr, double ds);

struct AuxCheck {
  AuxKind kind = AuxKind::M;
  double value = 0.0;
  double bound = 0.0;
  bool size_ok = false;
  bool hessian_checked = false;
  bool hessian_ok = false;
  double hessian_margin = 0.0;  // min over directions of <-d^2 F d, d> - rhs
};

struct AuxVerdict {
  double r = 1.0;
  double s = 1.0;
  std::array<AuxCheck, 5> checks{};
  std::string skip_reason;
};

/// Size bound and 2x2 Hessian bound of the five auxiliary functions at (r, s),
/// the Hessian quantified over 16 fixed unit directions.
AuxVerdict verify_aux(double r, double s, const QContext& ctx, double h);

/// n x n grid over rs in [1 + m, Q - m] and r/s log-uniform in [1e-2, 1e2].
std::vector<std::array<double, 2>> aux_grid(const QContext& ctx, int n);

/// aux_size[Q=..] and aux_hessian[Q=..] over aux_grid(ctx, n).
std::vector<CheckRecord> run_aux_checks(const QContext& ctx, int n, double h);

/// The eps-box around the radial point stays inside the radial domain.
bool mollify_ball_inside(const RadialPoint& p, double q, double eps);

/// Monte-Carlo convolution of the radial profile with the normalized bump
/// exp(-1/(1-|u|^2)) on the unit ball of R^6 scaled by eps. Antithetic pairs,
/// so `mc` is rounded up to an even count. eps == 0 returns the point value.
double mollify_eval(const BellmanPoint& p, const QContext& ctx, double eps, int mc,
                    std::uint64_t seed);

struct QRun {
  double q = 1.0;
  std::vector<PointVerdict> verdicts;
  std::vector<CheckRecord> checks;
  Json summary = Json::object();
};

struct SuiteOutcome {
  SuiteConfig config;
  std::vector<QRun> runs;

  bool passed() const;
  /// Report with all checks; per-point verdicts are embedded on request.
  VerificationReport report(bool include_verdicts) const;
};

SuiteOutcome run_suite(const SuiteConfig& cfg);

Json to_json(const PointVerdict& v);

}  // namespace bellcert
