#include "pls/chebyshev.hpp"

#include <cmath>

#include "pls/errors.hpp"

namespace pls {

double chebyshev_value(int k, double x) {
  if (k < 0) throw ValidationError("chebyshev_value: negative degree");
  if (k == 0) return 1.0;
  const double ax = std::abs(x);
  double value;
  if (ax <= 1.5) {
    double prev = 1.0, cur = ax;
    for (int j = 1; j < k; ++j) {
      const double next = 2.0 * ax * cur - prev;
      prev = cur;
      cur = next;
    }
    value = cur;
  } else {
    const double s = std::sqrt(ax * ax - 1.0);
    value = 0.5 * (std::pow(ax - s, k) + std::pow(ax + s, k));
  }
  return (x < 0 && (k % 2)) ? -value : value;
}

ChebyshevEnvelope minimax_envelope(double alpha, double beta, int k) {
  if (!(0 < alpha && alpha <= beta)) {
    throw ValidationError("minimax_envelope: need 0 < alpha <= beta");
  }
  if (k < 1) throw ValidationError("minimax_envelope: k must be >= 1");
  ChebyshevEnvelope env;
  env.alpha = alpha;
  env.beta = beta;
  env.k = k;
  if (alpha == beta) {
    env.minimax_value = 0.0;  // a root at the single point is exact
    return env;
  }
  const double mid = 0.5 * (alpha + beta);
  const double x = 2.0 * (0.0 - mid) / (beta - alpha);
  env.minimax_value = 1.0 / std::abs(chebyshev_value(k, x));
  return env;
}

}  // namespace pls
