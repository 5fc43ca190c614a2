#include "bellcert/hermite.hpp"

namespace bellcert::gauss {

double hermite_eval(int n, double x) {
  if (n < 0) throw DomainError("Hermite degree must be >= 0");
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 0; k < n; ++k) {
    const double next = x * cur - k * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double hermite_orthonormal(int n, double x) {
  if (n < 0) throw DomainError("Hermite degree must be >= 0");
  double prev = 0.0;
  double cur = 1.0;
  for (int k = 1; k <= n; ++k) {
    const double next = (x * cur - std::sqrt(k - 1.0) * prev) / std::sqrt(static_cast<double>(k));
    prev = cur;
    cur = next;
  }
  return cur;
}

void hermite_orthonormal_all(double x, std::span<double> out) {
  if (out.empty()) return;
  out[0] = 1.0;
  if (out.size() > 1) out[1] = x;
  for (std::size_t k = 1; k + 1 < out.size(); ++k) {
    const double kk = static_cast<double>(k);
    out[k + 1] = (x * out[k] - std::sqrt(kk) * out[k - 1]) / std::sqrt(kk + 1.0);
  }
}

OneForm differential(const HermiteFunction& f) {
  const int n = f.order();
  if (n == 0) return OneForm();
  std::vector<double> b(static_cast<std::size_t>(n));
  for (int m = 0; m < n; ++m) b[static_cast<std::size_t>(m)] = std::sqrt(m + 1.0) * f.coeff(m + 1);
  return OneForm(std::move(b));
}

}  // namespace bellcert::gauss
