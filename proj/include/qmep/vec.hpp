#pragma once

#include <array>
#include <cmath>

namespace qmep {

/// Momentum / velocity / multiplier vectors. Two-dimensional bands leave the
/// third component at zero.
using Vec = std::array<double, 3>;

/// d x d tensors stored as 3 x 3.
using Mat = std::array<std::array<double, 3>, 3>;

inline double dot(const Vec& a, const Vec& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator*(double s, const Vec& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec operator+(const Vec& a, const Vec& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
inline Vec operator-(const Vec& a, const Vec& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }

inline Mat zero_mat() { return Mat{}; }

/// s times the d-dimensional identity.
inline Mat scaled_identity(double s, int dim) {
  Mat m{};
  for (int i = 0; i < dim; ++i) m[i][i] = s;
  return m;
}

inline Vec mat_vec(const Mat& m, const Vec& v) {
  Vec r{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i] += m[i][j] * v[j];
  return r;
}

}  // namespace qmep
