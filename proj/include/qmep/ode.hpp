#pragma once

// Dormand-Prince 5(4) embedded Runge-Kutta step with the FSAL property.

#include <array>
#include <cstddef>
#include <initializer_list>
#include <utility>
#include <vector>

namespace qmep::ode {

using State = std::vector<double>;

struct Dp45Step {
  State y;      ///< fifth-order solution at t + h
  State error;  ///< difference between the fifth- and fourth-order solutions
  State k_end;  ///< derivative at (t + h, y), reusable as the next k1
};

namespace detail {

inline constexpr double a21 = 1.0 / 5.0;
inline constexpr std::array<double, 2> a3{3.0 / 40.0, 9.0 / 40.0};
inline constexpr std::array<double, 3> a4{44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0};
inline constexpr std::array<double, 4> a5{19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0};
inline constexpr std::array<double, 5> a6{9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
                                          -5103.0 / 18656.0};
inline constexpr std::array<double, 6> b5{35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
                                          11.0 / 84.0};
inline constexpr std::array<double, 7> b4{5179.0 / 57600.0, 0.0, 7571.0 / 16695.0, 393.0 / 640.0,
                                          -92097.0 / 339200.0, 187.0 / 2100.0, 1.0 / 40.0};
inline constexpr std::array<double, 6> c{1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0};

}  // namespace detail

/// One step of size h from (t, y) with k1 = f(t, y). f(t, y) returns dy/dt
/// and may throw; the exception then propagates to the caller.
template <class F>
Dp45Step dp45_step(const F& f, double t, const State& y, const State& k1, double h) {
  using namespace detail;
  const std::size_t n = y.size();
  auto combine = [&](std::initializer_list<std::pair<double, const State*>> terms) {
    State out = y;
    for (const auto& [w, k] : terms)
      if (w != 0.0)
        for (std::size_t i = 0; i < n; ++i) out[i] += h * w * (*k)[i];
    return out;
  };
  const State k2 = f(t + c[0] * h, combine({{a21, &k1}}));
  const State k3 = f(t + c[1] * h, combine({{a3[0], &k1}, {a3[1], &k2}}));
  const State k4 = f(t + c[2] * h, combine({{a4[0], &k1}, {a4[1], &k2}, {a4[2], &k3}}));
  const State k5 = f(t + c[3] * h, combine({{a5[0], &k1}, {a5[1], &k2}, {a5[2], &k3}, {a5[3], &k4}}));
  const State k6 =
      f(t + c[4] * h, combine({{a6[0], &k1}, {a6[1], &k2}, {a6[2], &k3}, {a6[3], &k4}, {a6[4], &k5}}));
  Dp45Step step;
  step.y = combine({{b5[0], &k1}, {b5[2], &k3}, {b5[3], &k4}, {b5[4], &k5}, {b5[5], &k6}});
  step.k_end = f(t + h, step.y);
  const State y4 = combine({{b4[0], &k1},
                            {b4[2], &k3},
                            {b4[3], &k4},
                            {b4[4], &k5},
                            {b4[5], &k6},
                            {b4[6], &step.k_end}});
  step.error.resize(n);
  for (std::size_t i = 0; i < n; ++i) step.error[i] = step.y[i] - y4[i];
  return step;
}

}  // namespace qmep::ode
