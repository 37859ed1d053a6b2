#pragma once

// Reference integrals for the tests, computed with Boost's double-exponential
// rules. They share no code with the library quadrature.

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>

namespace oracle {

/// int_a^inf f, split at the given interior point.
template <class F>
double semi_infinite(const F& raw, double a, double split) {
  // Far out the decaying factor underflows first; 0 * inf is read as 0.
  auto f = [&raw](double x) {
    const double v = raw(x);
    return std::isfinite(v) ? v : 0.0;
  };
  double total = 0.0;
  if (split > a) {
    boost::math::quadrature::tanh_sinh<double> ts;
    total += ts.integrate(f, a, split, 1e-15);
  } else {
    split = a;
  }
  boost::math::quadrature::exp_sinh<double> es;
  total += es.integrate(f, split, std::numeric_limits<double>::infinity(), 1e-15);
  return total;
}

template <class F>
double finite(const F& f, double a, double b) {
  boost::math::quadrature::tanh_sinh<double> ts;
  return ts.integrate(f, a, b, 1e-15);
}

inline double fermi(double x) { return x > 0 ? std::exp(-x) / (1.0 + std::exp(-x)) : 1.0 / (1.0 + std::exp(x)); }
inline double fermi_prime(double x) {
  const double e = std::exp(-std::abs(x));
  return e / ((1.0 + e) * (1.0 + e));
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace oracle
