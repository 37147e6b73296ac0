#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pls {

/// Evaluates a_0 + a_1 x + ... by Horner's rule. Works for any field-like
/// scalar (double, exact rationals in tests).
template <typename Scalar>
Scalar horner(const std::vector<Scalar>& coeffs, const Scalar& x) {
  if (coeffs.empty()) return Scalar(0);
  Scalar acc = coeffs.back();
  for (std::size_t j = coeffs.size() - 1; j-- > 0;) {
    acc = acc * x + coeffs[j];
  }
  return acc;
}

/// Newton divided-difference interpolation through (xs_i, ys_i); returns
/// monomial coefficients a_0..a_{m-1}. Nodes must be pairwise distinct.
template <typename Scalar>
std::vector<Scalar> newton_interpolate(const std::vector<Scalar>& xs,
                                       const std::vector<Scalar>& ys) {
  const std::size_t m = xs.size();
  if (ys.size() != m || m == 0) throw std::invalid_argument("newton_interpolate: bad node set");
  std::vector<Scalar> dd = ys;  // dd[j] becomes f[x_0..x_j]
  for (std::size_t level = 1; level < m; ++level) {
    for (std::size_t j = m - 1; j >= level; --j) {
      dd[j] = (dd[j] - dd[j - 1]) / (xs[j] - xs[j - level]);
    }
  }
  // Expand the Newton form into monomials.
  std::vector<Scalar> coeffs(m, Scalar(0));
  std::vector<Scalar> basis(m, Scalar(0));  // prod_{l<j} (x - xs_l)
  basis[0] = Scalar(1);
  std::size_t basis_len = 1;
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t t = 0; t < basis_len; ++t) coeffs[t] += dd[j] * basis[t];
    if (j + 1 < m) {
      // basis <- basis * (x - xs_j)
      for (std::size_t t = basis_len; t-- > 0;) {
        basis[t + 1] += basis[t];
        basis[t] = basis[t] * (-xs[j]);
      }
      ++basis_len;
    }
  }
  return coeffs;
}

}  // namespace pls
