#pragma once

// Closed-form evaluation of the six-variable Bellman function B_Q on
//
//   D_Q = { (Z, H, zeta, eta, r, s) : zeta^2 <= Z r, <eta, eta> <= H s,
//           1 <= r s <= Q },
//
// together with its six components, the auxiliary functions M, N, K, M~, N~,
// the critical parameter a_m of the B43 optimization, and the singular set Pi
// where B_Q fails to be C^2.

#include <array>
#include <cmath>
#include <numbers>
#include <string_view>
#include <vector>

namespace bellcert {

struct QContext {
  double q = 1.0;
  int eta_dim = 1;

  /// Validated constructor: q >= 1 (finite), eta_dim >= 1.
  static QContext make(double q, int eta_dim = 1);
};

struct BellmanPoint {
  double Z = 0.0;
  double H = 0.0;
  double zeta = 0.0;
  std::vector<double> eta{0.0};
  double r = 1.0;
  double s = 1.0;

  double eta_sq() const;
  double nu() const { return std::sqrt(eta_sq()); }
};

/// The radial profile coordinates (Z, H, |zeta|, |eta|, r, s). B_Q depends on
/// a point only through these six numbers.
struct RadialPoint {
  double Z = 0.0;
  double H = 0.0;
  double zeta = 0.0;  // >= 0
  double nu = 0.0;    // >= 0
  double r = 1.0;
  double s = 1.0;
};

RadialPoint radial(const BellmanPoint& p);

/// Exact membership in D_Q (no tolerance) including eta.size() == eta_dim.
bool in_domain(const BellmanPoint& p, const QContext& ctx);
/// Throws DomainError naming the violated constraint.
void require_in_domain(const BellmanPoint& p, const QContext& ctx);

enum class AuxKind { M, N, K, Mtilde, Ntilde };
inline constexpr std::array<AuxKind, 5> kAllAux = {
    AuxKind::M, AuxKind::N, AuxKind::K, AuxKind::Mtilde, AuxKind::Ntilde};
std::string_view to_string(AuxKind kind);

/// Auxiliary function value; requires r, s > 0 and 1 <= rs <= Q.
double eval_aux(AuxKind kind, double r, double s, const QContext& ctx);
/// Upper size bound: 5Q^2 s, 5Q^2 r, Q, 5Qr, 5Qs respectively.
double aux_size_bound(AuxKind kind, double r, double s, double q);

namespace detail {
// Raw formula, defined for all r, s > 0.
double aux_formula(AuxKind kind, double r, double s, double q);
}  // namespace detail

struct CriticalA {
  enum class Kind { Zero, Finite, Infinite };
  Kind kind = Kind::Zero;
  double value = 0.0;  // meaningful for Finite only (> 0)

  static CriticalA zero() { return {Kind::Zero, 0.0}; }
  static CriticalA finite(double a) { return {Kind::Finite, a}; }
  static CriticalA infinite() { return {Kind::Infinite, 0.0}; }
  friend bool operator==(const CriticalA&, const CriticalA&) = default;
};

/// a_m = (Q r nu - K zeta) / (Q s zeta - K nu) with zeta replaced by |zeta|.
/// Throws DegeneratePointError when numerator and denominator are both <= 0.
CriticalA critical_a(const BellmanPoint& p, const QContext& ctx);
CriticalA critical_a(const RadialPoint& p, double q);

enum class Component { B1, B2, B3, B41, B42, B43 };
inline constexpr std::array<Component, 6> kAllComponents = {
    Component::B1,  Component::B2,  Component::B3,
    Component::B41, Component::B42, Component::B43};
std::string_view to_string(Component c);

inline constexpr double kC1 = 1.0;
inline constexpr double kC2 = std::numbers::sqrt2 / 3.0;
inline constexpr double kC3 = std::numbers::sqrt2 / 3.0;
inline constexpr double kC4 = 288.0 / 13.0;
/// C1 + C2 + C3 + 3 C4: each component is at most Z + H, so B_Q <= this (Z+H).
inline constexpr double kEffectiveSizeConstant = kC1 + kC2 + kC3 + 3.0 * kC4;
inline constexpr double kSizeConstant = 80.0;
inline constexpr double kUnweightedSizeConstant = 6.0;

double eval_component(Component c, const BellmanPoint& p, const QContext& ctx);
/// C1 B1 + C2 B2 + C3 B3 + C4 (B41 + B42 + B43).
double eval_bq(const BellmanPoint& p, const QContext& ctx);
/// B1 + B2 + B3 + B41 + B42 + B43, diagnostics only.
double eval_unweighted(const BellmanPoint& p, const QContext& ctx);

// Closed forms without the membership check. Every auxiliary denominator is
// still asserted strictly positive (DomainError otherwise). Used by the
// finite-difference stencils, which may step slightly off D_Q.
double eval_component_radial(Component c, const RadialPoint& p, double q);
double eval_radial(const RadialPoint& p, double q);

/// Relative distance to Pi: min over the two branches of
/// |K/Q - branch| / (K/Q). +inf when zeta == 0 or eta == 0.
double pi_distance(const BellmanPoint& p, const QContext& ctx);
double pi_distance(const RadialPoint& p, double q);

}  // namespace bellcert
