#include "bellcert/bellman.hpp"

#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "bellcert/errors.hpp"

namespace bellcert {

namespace {

double checked_denominator(double value, const char* what) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    std::ostringstream msg;
    msg << "non-positive denominator " << what << " = " << value;
    throw DomainError(msg.str());
  }
  return value;
}

void require_rs_band(double r, double s, double q) {
  if (!(r > 0.0) || !(s > 0.0)) throw DomainError("r and s must be positive");
  const double rs = r * s;
  if (rs < 1.0 || rs > q) {
    std::ostringstream msg;
    msg << "rs = " << rs << " outside [1, " << q << "]";
    throw DomainError(msg.str());
  }
}

}  // namespace

QContext QContext::make(double q, int eta_dim) {
  if (!std::isfinite(q) || q < 1.0) {
    std::ostringstream msg;
    msg << "Q must be >= 1, got " << q;
    throw DomainError(msg.str());
  }
  if (eta_dim < 1) throw DomainError("eta_dim must be >= 1");
  return QContext{q, eta_dim};
}

double BellmanPoint::eta_sq() const {
  return std::inner_product(eta.begin(), eta.end(), eta.begin(), 0.0);
}

RadialPoint radial(const BellmanPoint& p) {
  return RadialPoint{p.Z, p.H, std::abs(p.zeta), p.nu(), p.r, p.s};
}

bool in_domain(const BellmanPoint& p, const QContext& ctx) {
  if (static_cast<int>(p.eta.size()) != ctx.eta_dim) return false;
  if (!(p.Z >= 0.0) || !(p.H >= 0.0) || !(p.r > 0.0) || !(p.s > 0.0)) {
    return false;
  }
  const double rs = p.r * p.s;
  return p.zeta * p.zeta <= p.Z * p.r && p.eta_sq() <= p.H * p.s &&
         rs >= 1.0 && rs <= ctx.q;
}

void require_in_domain(const BellmanPoint& p, const QContext& ctx) {
  if (static_cast<int>(p.eta.size()) != ctx.eta_dim) {
    throw DomainError("eta has length " + std::to_string(p.eta.size()) +
                      ", expected " + std::to_string(ctx.eta_dim));
  }
  if (!(p.Z >= 0.0) || !(p.H >= 0.0)) throw DomainError("Z and H must be >= 0");
  if (p.zeta * p.zeta > p.Z * p.r) throw DomainError("zeta^2 > Z r");
  if (p.eta_sq() > p.H * p.s) throw DomainError("<eta, eta> > H s");
  require_rs_band(p.r, p.s, ctx.q);
}

std::string_view to_string(AuxKind kind) {
  switch (kind) {
    case AuxKind::M: return "M";
    case AuxKind::N: return "N";
    case AuxKind::K: return "K";
    case AuxKind::Mtilde: return "Mtilde";
    case AuxKind::Ntilde: return "Ntilde";
  }
  return "?";
}

std::string_view to_string(Component c) {
  switch (c) {
    case Component::B1: return "B1";
    case Component::B2: return "B2";
    case Component::B3: return "B3";
    case Component::B41: return "B41";
    case Component::B42: return "B42";
    case Component::B43: return "B43";
  }
  return "?";
}

namespace detail {

double aux_formula(AuxKind kind, double r, double s, double q) {
  const double q2 = q * q;
  switch (kind) {
    case AuxKind::M:
      return -4.0 * q2 / r - r * s * s + (4.0 * q2 + 1.0) * s;
    case AuxKind::N:
      return -4.0 * q2 / s - s * r * r + (4.0 * q2 + 1.0) * r;
    case AuxKind::K:
      return std::sqrt(q) * std::sqrt(r * s) - r * s / 4.0;
    case AuxKind::Mtilde:
      return -4.0 * q / s - r * r * s / (4.0 * q) + (4.0 * q + 1.0) * r;
    case AuxKind::Ntilde:
      return -4.0 * q / r - s * s * r / (4.0 * q) + (4.0 * q + 1.0) * s;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace detail

double eval_aux(AuxKind kind, double r, double s, const QContext& ctx) {
  require_rs_band(r, s, ctx.q);
  return detail::aux_formula(kind, r, s, ctx.q);
}

double aux_size_bound(AuxKind kind, double r, double s, double q) {
  switch (kind) {
    case AuxKind::M: return 5.0 * q * q * s;
    case AuxKind::N: return 5.0 * q * q * r;
    case AuxKind::K: return q;
    case AuxKind::Mtilde: return 5.0 * q * r;
    case AuxKind::Ntilde: return 5.0 * q * s;
  }
  return std::numeric_limits<double>::quiet_NaN();
}

CriticalA critical_a(const RadialPoint& p, double q) {
  const double k = detail::aux_formula(AuxKind::K, p.r, p.s, q);
  const double num = q * p.r * p.nu - k * p.zeta;
  const double den = q * p.s * p.zeta - k * p.nu;
  if (num > 0.0 && den > 0.0) return CriticalA::finite(num / den);
  if (den > 0.0) return CriticalA::zero();
  if (num > 0.0) return CriticalA::infinite();
  throw DegeneratePointError(
      "critical parameter undefined: numerator and denominator both <= 0");
}

CriticalA critical_a(const BellmanPoint& p, const QContext& ctx) {
  require_in_domain(p, ctx);
  return critical_a(radial(p), ctx.q);
}

double eval_component_radial(Component c, const RadialPoint& p, double q) {
  const double z2 = p.zeta * p.zeta;
  const double e2 = p.nu * p.nu;
  const double r = checked_denominator(p.r, "r");
  const double s = checked_denominator(p.s, "s");
  const double base = p.Z + p.H;
  switch (c) {
    case Component::B1:
      return base - z2 / r - e2 / s;
    case Component::B2: {
      const double m = detail::aux_formula(AuxKind::M, r, s, q);
      return base - z2 / r - e2 / checked_denominator(s + m / (q * q), "s + M/Q^2");
    }
    case Component::B3: {
      const double n = detail::aux_formula(AuxKind::N, r, s, q);
      return base - z2 / checked_denominator(r + n / (q * q), "r + N/Q^2") - e2 / s;
    }
    case Component::B41: {
      const double mt = detail::aux_formula(AuxKind::Mtilde, r, s, q);
      return base - z2 / checked_denominator(r + mt / q, "r + Mtilde/Q") - e2 / s;
    }
    case Component::B42: {
      const double nt = detail::aux_formula(AuxKind::Ntilde, r, s, q);
      return base - z2 / r - e2 / checked_denominator(s + nt / q, "s + Ntilde/Q");
    }
    case Component::B43: {
      // beta(a) vanishes identically when zeta = nu = 0.
      if (p.zeta == 0.0 && p.nu == 0.0) return base;
      const CriticalA am = critical_a(p, q);
      switch (am.kind) {
        case CriticalA::Kind::Zero:
          return base - z2 / r;
        case CriticalA::Kind::Infinite:
          return base - e2 / s;
        case CriticalA::Kind::Finite: {
          const double kq = detail::aux_formula(AuxKind::K, r, s, q) / q;
          const double dz = checked_denominator(r + am.value * kq, "r + a K/Q");
          const double de = checked_denominator(s + kq / am.value, "s + K/(a Q)");
          return base - z2 / dz - e2 / de;
        }
      }
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double eval_radial(const RadialPoint& p, double q) {
  const auto b = [&](Component c) { return eval_component_radial(c, p, q); };
  return kC1 * b(Component::B1) + kC2 * b(Component::B2) +
         kC3 * b(Component::B3) +
         kC4 * (b(Component::B41) + b(Component::B42) + b(Component::B43));
}

double eval_component(Component c, const BellmanPoint& p, const QContext& ctx) {
  require_in_domain(p, ctx);
  return eval_component_radial(c, radial(p), ctx.q);
}

double eval_bq(const BellmanPoint& p, const QContext& ctx) {
  require_in_domain(p, ctx);
  return eval_radial(radial(p), ctx.q);
}

double eval_unweighted(const BellmanPoint& p, const QContext& ctx) {
  require_in_domain(p, ctx);
  const RadialPoint rp = radial(p);
  double sum = 0.0;
  for (Component c : kAllComponents) sum += eval_component_radial(c, rp, ctx.q);
  return sum;
}

double pi_distance(const RadialPoint& p, double q) {
  if (p.zeta == 0.0 || p.nu == 0.0) return std::numeric_limits<double>::infinity();
  const double kq = detail::aux_formula(AuxKind::K, p.r, p.s, q) / q;
  const double first = std::abs(kq - p.zeta * p.s / p.nu) / kq;
  const double second = std::abs(kq - p.nu * p.r / p.zeta) / kq;
  return std::min(first, second);
}

double pi_distance(const BellmanPoint& p, const QContext& ctx) {
  require_in_domain(p, ctx);
  return pi_distance(radial(p), ctx.q);
}

}  // namespace bellcert
