#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace polyakgrad {

// Flat parameter/gradient vector. All policies expose their parameters in
// this form and all update rules operate on it.
using ParamVector = std::vector<double>;

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: size mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    s += a[i] * b[i];
  }
  return s;
}

inline double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) {
    s += x * x;
  }
  return s;
}

// y += a * x
inline void axpy(double a, std::span<const double> x, ParamVector& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("axpy: size mismatch");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] += a * x[i];
  }
}

inline void scale(ParamVector& v, double a) {
  for (double& x : v) {
    x *= a;
  }
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      return false;
    }
  }
  return true;
}

inline double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) {
    m = std::max(m, std::abs(x));
  }
  return m;
}

}  // namespace polyakgrad
