#pragma once

#include <cmath>
#include <numbers>
#include <vector>

namespace nozzleflow {

/// Gauss-Legendre rule on [-1, 1].
template <typename Scalar = double>
struct GaussLegendre {
  std::vector<Scalar> nodes;
  std::vector<Scalar> weights;

  explicit GaussLegendre(int n) : nodes(n), weights(n) {
    using std::abs;
    using std::cos;
    for (int i = 0; i < n; ++i) {
      // Tricomi initial guess, then Newton on P_n.
      Scalar x = cos(std::numbers::pi_v<Scalar> * (Scalar(i) + Scalar(0.75)) / (Scalar(n) + Scalar(0.5)));
      Scalar dp = 0;
      for (int iter = 0; iter < 100; ++iter) {
        Scalar p0 = 1, p1 = x;
        for (int k = 2; k <= n; ++k) {
          const Scalar p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1);
        const Scalar dx = p1 / dp;
        x -= dx;
        if (abs(dx) < Scalar(1e-16)) break;
      }
      nodes[i] = x;
      weights[i] = 2 / ((1 - x * x) * dp * dp);
    }
  }

  /// Integrates f over [a, b].
  template <typename F>
  Scalar integrate(F&& f, Scalar a, Scalar b) const {
    const Scalar half = (b - a) / 2, mid = (b + a) / 2;
    Scalar sum = 0;
    for (std::size_t i = 0; i < nodes.size(); ++i) sum += weights[i] * f(mid + half * nodes[i]);
    return sum * half;
  }
};

}  // namespace nozzleflow
