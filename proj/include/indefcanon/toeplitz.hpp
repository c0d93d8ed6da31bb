#pragma once

// Lower-triangular Toeplitz matrices represented by their first column.
// Products of such matrices are truncated convolutions, so the inverse
// square root of a unit lower-triangular Toeplitz G = I + E is the finite
// binomial series sum_k c_k E^k with E nilpotent.
//
// Templated on the scalar so tests can run the identical series in exact
// rational arithmetic.

#include <cstddef>
#include <vector>

namespace indefcanon::toeplitz {

/// (a * b) truncated to a.size() terms; both columns have the same length.
template <class Scalar>
std::vector<Scalar> multiply(const std::vector<Scalar>& a, const std::vector<Scalar>& b) {
  const std::size_t n = a.size();
  std::vector<Scalar> out(n, Scalar(0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) out[i] += a[j] * b[i - j];
  }
  return out;
}

/// First n coefficients of (1 + x)^(-1/2): 1, -1/2, 3/8, -5/16, ...
template <class Scalar>
std::vector<Scalar> inv_sqrt_coefficients(std::size_t n) {
  std::vector<Scalar> c;
  c.reserve(n);
  if (n == 0) return c;
  c.emplace_back(1);
  for (std::size_t k = 1; k < n; ++k) {
    const Scalar num(-static_cast<long>(2 * k - 1));
    const Scalar den(static_cast<long>(2 * k));
    c.push_back(c.back() * num / den);
  }
  return c;
}

/// Given the first column g of a unit lower-triangular Toeplitz G (g[0] == 1),
/// returns the first column of the unit lower-triangular Toeplitz F with
/// F * F * G = I.
template <class Scalar>
std::vector<Scalar> inv_sqrt_column(const std::vector<Scalar>& g) {
  const std::size_t n = g.size();
  std::vector<Scalar> out(n, Scalar(0));
  if (n == 0) return out;
  std::vector<Scalar> e = g;
  e[0] = Scalar(0);
  const auto coeffs = inv_sqrt_coefficients<Scalar>(n);
  std::vector<Scalar> power(n, Scalar(0));
  power[0] = Scalar(1);
  out[0] = Scalar(1);
  for (std::size_t k = 1; k < n; ++k) {
    power = multiply(power, e);
    for (std::size_t i = 0; i < n; ++i) out[i] += coeffs[k] * power[i];
  }
  return out;
}

}  // namespace indefcanon::toeplitz
