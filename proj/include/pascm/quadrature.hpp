#pragma once

#include <cmath>
#include <vector>

#include <gsl/gsl_integration.h>

#include "pascm/error.hpp"

namespace pascm {

/// Fixed-order Gauss-Hermite rule: sum_k weights[k] * f(nodes[k])
/// approximates the integral of f(t) * exp(-t^2).
///
/// gz/gw are the same rule rescaled for expectations under a standard
/// normal: E[g(Z)] ~= sum_k gw[k] * g(gz[k]), with sum gw = 1.
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> gz;
  std::vector<double> gw;
  int count = 0;

  static Quadrature gauss_hermite(int n) {
    if (n < 1) throw InvalidArgument("quadrature order must be positive");
    gsl_integration_fixed_workspace* ws = gsl_integration_fixed_alloc(
        gsl_integration_fixed_hermite, static_cast<size_t>(n), 0.0, 1.0, 0.0, 0.0);
    if (!ws) throw Error("failed to build Gauss-Hermite rule");
    Quadrature q;
    q.count = n;
    q.nodes.assign(gsl_integration_fixed_nodes(ws), gsl_integration_fixed_nodes(ws) + n);
    q.weights.assign(gsl_integration_fixed_weights(ws), gsl_integration_fixed_weights(ws) + n);
    gsl_integration_fixed_free(ws);
    const double inv_sqrt_pi = 1.0 / std::sqrt(M_PI);
    q.gz.resize(static_cast<size_t>(n));
    q.gw.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      q.gz[static_cast<size_t>(k)] = std::sqrt(2.0) * q.nodes[static_cast<size_t>(k)];
      q.gw[static_cast<size_t>(k)] = q.weights[static_cast<size_t>(k)] * inv_sqrt_pi;
    }
    return q;
  }

  template <class F>
  double gaussian_expectation(F&& g) const {
    double s = 0.0;
    for (int k = 0; k < count; ++k) s += gw[static_cast<size_t>(k)] * g(gz[static_cast<size_t>(k)]);
    return s;
  }
};

inline const Quadrature& default_quadrature() {
  static const Quadrature q = Quadrature::gauss_hermite(128);
  return q;
}

}  // namespace pascm
