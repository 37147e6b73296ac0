#pragma once

namespace pls {

/// C_k(x), first kind. Three-term recurrence for |x| <= 1.5, the closed
/// form 0.5((x - sqrt(x^2-1))^k + (x + sqrt(x^2-1))^k) beyond; the switch
/// stays away from the branch point at |x| = 1.
double chebyshev_value(int k, double x);

/// Smallest sup-norm on [alpha, beta] over degree-k polynomials with
/// value 1 at 0: 1/|C_k(2(0 - mu)/(beta - alpha))| with mu the midpoint.
struct ChebyshevEnvelope {
  double alpha = 0.0;
  double beta = 0.0;
  int k = 0;
  double minimax_value = 0.0;
};

ChebyshevEnvelope minimax_envelope(double alpha, double beta, int k);

}  // namespace pls
