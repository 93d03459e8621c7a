#pragma once

#include <cstddef>
#include <vector>

namespace subcurv {

struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the standard normal density (weights sum to 1),
/// from the Jacobi matrix eigenproblem. Cached per n.
const GaussRule& gauss_hermite(std::size_t n);

}  // namespace subcurv
