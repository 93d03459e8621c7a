#include "subcurv/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>

namespace subcurv {

const GaussRule& gauss_hermite(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  const auto m = static_cast<Eigen::Index>(n);
  Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index k = 1; k < m; ++k) jac(k, k - 1) = jac(k - 1, k) = std::sqrt(static_cast<double>(k));
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jac);
  GaussRule rule;
  for (Eigen::Index k = 0; k < m; ++k) {
    rule.nodes.push_back(es.eigenvalues()(k));
    double v = es.eigenvectors()(0, k);
    rule.weights.push_back(v * v);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

}  // namespace subcurv
