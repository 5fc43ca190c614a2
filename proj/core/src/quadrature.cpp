#include "bellcert/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "bellcert/errors.hpp"

namespace bellcert::gauss {

namespace {

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights the
// squared first components of the eigenvectors times the total mass.
GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                       double mass) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) throw NumericalError("Golub-Welsch eigensolve failed");
  GaussRule rule;
  const auto n = diag.size();
  rule.nodes.resize(static_cast<std::size_t>(n));
  rule.weights.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes[static_cast<std::size_t>(i)] = solver.eigenvalues()(i);
    const double v0 = solver.eigenvectors()(0, i);
    rule.weights[static_cast<std::size_t>(i)] = mass * v0 * v0;
  }
  return rule;
}

GaussRule build_hermite(int order) {
  const Eigen::Index n = order;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (Eigen::Index k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  GaussRule rule = golub_welsch(diag, off, 1.0);

  // Newton polish on the orthonormal h_order, then Christoffel weights
  // 1 / sum_k h_k(x)^2, which stay accurate far into the tails.
  std::vector<double> h(static_cast<std::size_t>(order) + 1);
  const auto fill = [&](double x) {
    h[0] = 1.0;
    if (order >= 1) h[1] = x;
    for (int k = 1; k < order; ++k) {
      h[static_cast<std::size_t>(k) + 1] =
          (x * h[static_cast<std::size_t>(k)] -
           std::sqrt(static_cast<double>(k)) * h[static_cast<std::size_t>(k) - 1]) /
          std::sqrt(static_cast<double>(k) + 1.0);
    }
  };
  for (std::size_t i = 0; i < rule.size(); ++i) {
    double x = rule.nodes[i];
    for (int it = 0; it < 3; ++it) {
      fill(x);
      const double deriv = std::sqrt(static_cast<double>(order)) *
                           h[static_cast<std::size_t>(order) - 1];
      if (deriv == 0.0) break;
      x -= h[static_cast<std::size_t>(order)] / deriv;
    }
    fill(x);
    double sum = 0.0;
    for (int k = 0; k < order; ++k) sum += h[static_cast<std::size_t>(k)] * h[static_cast<std::size_t>(k)];
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / sum;
  }
  // exact symmetry about 0
  for (std::size_t i = 0, j = rule.size() - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = w;
    rule.weights[j] = w;
  }
  if (order % 2 == 1) rule.nodes[rule.size() / 2] = 0.0;
  return rule;
}

GaussRule build_legendre(int order) {
  const Eigen::Index n = order;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (Eigen::Index k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    off(k - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  return golub_welsch(diag, off, 2.0);
}

template <class Build>
const GaussRule& cached(std::map<int, std::unique_ptr<const GaussRule>>& cache, std::mutex& m,
                        int order, Build build) {
  if (order < 1) throw DomainError("quadrature order must be >= 1");
  std::lock_guard lock(m);
  auto it = cache.find(order);
  if (it == cache.end()) {
    it = cache.emplace(order, std::make_unique<const GaussRule>(build(order))).first;
  }
  return *it->second;
}

}  // namespace

const GaussRule& gauss_hermite(int order) {
  static std::map<int, std::unique_ptr<const GaussRule>> cache;
  static std::mutex m;
  return cached(cache, m, order, build_hermite);
}

const GaussRule& gauss_legendre(int order) {
  static std::map<int, std::unique_ptr<const GaussRule>> cache;
  static std::mutex m;
  return cached(cache, m, order, build_legendre);
}

GaussRule composite_legendre(double a, double b, int panels, int order) {
  if (panels < 1) throw DomainError("panel count must be >= 1");
  const GaussRule& base = gauss_legendre(order);
  GaussRule rule;
  rule.nodes.reserve(static_cast<std::size_t>(panels) * base.size());
  rule.weights.reserve(rule.nodes.capacity());
  const double width = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * width;
    for (std::size_t i = 0; i < base.size(); ++i) {
      rule.nodes.push_back(mid + 0.5 * width * base.nodes[i]);
      rule.weights.push_back(0.5 * width * base.weights[i]);
    }
  }
  return rule;
}

}  // namespace bellcert::gauss
