#pragma once

// Finite expansions in the orthonormal probabilists' Hermite basis
// hhat_n = h_n / sqrt(n!) of L^2(gamma). Functions and the dx-component of
// one-forms share the representation but are distinct types.

#include <cmath>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "bellcert/errors.hpp"

namespace bellcert::gauss {

/// Probabilists' Hermite polynomial h_n(x), h_{n+1} = x h_n - n h_{n-1}.
double hermite_eval(int n, double x);
/// hhat_n(x) = h_n(x) / sqrt(n!).
double hermite_orthonormal(int n, double x);
/// out[k] = hhat_k(x) for k < out.size().
void hermite_orthonormal_all(double x, std::span<double> out);

struct FunctionTag {};
struct OneFormTag {};

template <class Tag>
class HermiteSeries {
 public:
  HermiteSeries() : coeffs_(1, 0.0) {}
  explicit HermiteSeries(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    for (double c : coeffs_) {
      if (!std::isfinite(c)) throw DomainError("Hermite coefficients must be finite");
    }
  }

  /// hhat_n as a series of order n.
  static HermiteSeries basis(int n) {
    if (n < 0) throw DomainError("basis index must be >= 0");
    std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
    c.back() = 1.0;
    return HermiteSeries(std::move(c));
  }

  /// Truncation order N (coefficients c_0..c_N).
  int order() const { return static_cast<int>(coeffs_.size()) - 1; }
  const std::vector<double>& coeffs() const { return coeffs_; }
  double coeff(int n) const {
    return n >= 0 && n <= order() ? coeffs_[static_cast<std::size_t>(n)] : 0.0;
  }

  double operator()(double x) const {
    double prev = 0.0;
    double cur = 1.0;
    double sum = coeffs_[0];
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
      const double kk = static_cast<double>(k);
      const double next = (x * cur - std::sqrt(kk - 1.0) * prev) / std::sqrt(kk);
      prev = cur;
      cur = next;
      sum += coeffs_[k] * cur;
    }
    return sum;
  }

  /// Spatial derivative, using hhat_n' = sqrt(n) hhat_{n-1}.
  double derivative(double x) const {
    double prev = 0.0;
    double cur = 1.0;  // hhat_{k-1}
    double sum = 0.0;
    for (std::size_t k = 1; k < coeffs_.size(); ++k) {
      const double kk = static_cast<double>(k);
      sum += coeffs_[k] * std::sqrt(kk) * cur;
      const double next = (x * cur - std::sqrt(kk - 1.0) * prev) / std::sqrt(kk);
      prev = cur;
      cur = next;
    }
    return sum;
  }

  /// Unweighted L^2(gamma) norm (Parseval).
  double l2_norm() const {
    double s = 0.0;
    for (double c : coeffs_) s += c * c;
    return std::sqrt(s);
  }

  bool is_zero() const {
    for (double c : coeffs_) {
      if (c != 0.0) return false;
    }
    return true;
  }

  HermiteSeries operator*(double a) const {
    HermiteSeries out = *this;
    for (double& c : out.coeffs_) c *= a;
    return out;
  }

  HermiteSeries operator+(const HermiteSeries& o) const {
    std::vector<double> c(std::max(coeffs_.size(), o.coeffs_.size()), 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      c[k] = coeff(static_cast<int>(k)) + o.coeff(static_cast<int>(k));
    }
    return HermiteSeries(std::move(c));
  }

  HermiteSeries operator-(const HermiteSeries& o) const { return *this + o * -1.0; }

  friend bool operator==(const HermiteSeries&, const HermiteSeries&) = default;

 private:
  std::vector<double> coeffs_;
};

using HermiteFunction = HermiteSeries<FunctionTag>;
using OneForm = HermiteSeries<OneFormTag>;

/// d f: slot m receives sqrt(m + 1) c_{m+1}.
OneForm differential(const HermiteFunction& f);

template <class Tag>
void to_json(nlohmann::json& j, const HermiteSeries<Tag>& s) {
  j = s.coeffs();
}

template <class Tag>
void from_json(const nlohmann::json& j, HermiteSeries<Tag>& s) {
  s = HermiteSeries<Tag>(j.get<std::vector<double>>());
}

}  // namespace bellcert::gauss
