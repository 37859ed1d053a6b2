#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "qmep/constants.hpp"
#include "qmep/dispersion.hpp"
#include "qmep/errors.hpp"

using namespace qmep;
using namespace qmep::constants;

namespace {


DispersionModel silicon() { return DispersionModel::kane(0.32 * m_e, 0.5 / eV, 300.0); }
DispersionModel cone(double c_over) {
  const double vF = 1e6;
  return DispersionModel::graphene(vF, c_over * k_B * 300.0 / vF, 300.0);
}

Vec random_direction(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Vec n{g(rng), g(rng), dim == 3 ? g(rng) : 0.0};
  const double r = norm(n);
  return (1.0 / r) * n;
}

// Rotation about a generic axis by Rodrigues' formula.
Vec rotate(const Vec& v, const Vec& axis, double angle) {
  const Vec k = (1.0 / norm(axis)) * axis;
  const Vec kxv{k[1] * v[2] - k[2] * v[1], k[2] * v[0] - k[0] * v[2], k[0] * v[1] - k[1] * v[0]};
  return std::cos(angle) * v + std::sin(angle) * kxv + (dot(k, v) * (1.0 - std::cos(angle))) * k;
}

}  // namespace

TEST_CASE("Kane energy at p^2/2m* = 1 eV") {
  const auto m = silicon();
  const double p = std::sqrt(2.0 * 0.32 * m_e * eV);
  const double e = m.energy({p, 0.0, 0.0}) / eV;
  CHECK(std::abs(e - (std::sqrt(3.0) - 1.0)) < 1e-12);
  CHECK(std::abs(e - 0.73205) < 1e-5);
}

TEST_CASE("parabolic and graphene energies") {
  const auto par = DispersionModel::parabolic(0.5 * m_e, 300.0);
  const Vec p{1e-25, 2e-25, -3e-25};
  CHECK(oracle::rel(par.energy(p), dot(p, p) / (2.0 * 0.5 * m_e)) < 1e-14);
  const auto g = cone(2.0);
  const Vec q{3e-27, -4e-27, 0.0};
  CHECK(oracle::rel(g.energy(q), 1e6 * std::hypot(5e-27, g.half_gap_c())) < 1e-14);
  CHECK(std::abs(g.energy({}) - g.band_minimum()) < 1e-30);
}

TEST_CASE("group velocity is the gradient of the energy") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mag(0.1, 3.0);
  for (const auto& model : {silicon(), cone(0.0), cone(1.5)}) {
    const double p_scale = model.momentum_at(model.band_minimum() + model.thermal_energy());
    for (int trial = 0; trial < 20; ++trial) {
      const Vec p = (mag(rng) * p_scale) * random_direction(rng, model.dim());
      const Vec v = model.group_velocity(p);
      const double h = 1e-5 * p_scale;
      for (int i = 0; i < model.dim(); ++i) {
        Vec a = p, b = p, c = p, d = p;
        a[i] -= 2 * h;
        b[i] -= h;
        c[i] += h;
        d[i] += 2 * h;
        const double fd =
            (model.energy(a) - 8 * model.energy(b) + 8 * model.energy(c) - model.energy(d)) / (12 * h);
        CHECK(std::abs(fd - v[i]) < 1e-8 * norm(v));
      }
    }
  }
}

TEST_CASE("velocity hessian matches finite differences of the velocity") {
  const auto model = silicon();
  const double p0 = model.momentum_at(2.0 * model.thermal_energy());
  const Vec p{0.6 * p0, -0.48 * p0, 0.64 * p0};
  const Mat H = model.velocity_hessian(p);
  const double h = 1e-5 * p0;
  for (int j = 0; j < 3; ++j) {
    Vec a = p, b = p;
    a[j] += h;
    b[j] -= h;
    const Vec dv = (1.0 / (2 * h)) * (model.group_velocity(a) - model.group_velocity(b));
    for (int i = 0; i < 3; ++i) CHECK(std::abs(H[i][j] - dv[i]) < 1e-7 * std::abs(H[0][0]) + 1e-6 * std::abs(H[i][j]));
  }
}

TEST_CASE("speed bound") {
  const auto k = silicon();
  const double bound = 1.0 / std::sqrt(2.0 * 0.32 * m_e * 0.5 / eV);
  CHECK(oracle::rel(k.speed_bound(), bound) < 1e-14);
  const double p_big = 1e3 * k.momentum_at(eV);
  CHECK(norm(k.group_velocity({p_big, 0, 0})) < bound);
  CHECK(oracle::rel(norm(k.group_velocity({p_big, 0, 0})), bound) < 1e-3);
  CHECK(std::isinf(DispersionModel::parabolic(m_e, 300.0).speed_bound()));
  CHECK(cone(0.0).speed_bound() == 1e6);
}

TEST_CASE("density-of-states weight") {
  const auto g = cone(3.0);
  const double eps = 1e6 * g.half_gap_c();
  CHECK(oracle::rel(g.dos_weight(eps), 2.0 * pi * g.half_gap_c() / 1e6) < 1e-13);
  CHECK_THROWS_AS(g.dos_weight(0.5 * eps), DomainError);

  const auto k = silicon();
  const double m = 0.32 * m_e, a = 0.5 / eV;
  for (double e : {0.01 * eV, 0.1 * eV, 1.0 * eV}) {
    const double expected = 4.0 * pi * m * (1.0 + 2.0 * a * e) * std::sqrt(2.0 * m * e * (1.0 + a * e));
    CHECK(oracle::rel(k.dos_weight(e), expected) < 1e-13);
  }
  CHECK_THROWS_AS(k.dos_weight(-1e-22), DomainError);
}

TEST_CASE("shell measure agrees with a Cartesian momentum sum") {
  // int exp(-eps(p)/kT) d^dp on a tensor grid against int exp(-eps/kT) dos(eps) deps.
  SUBCASE("Kane") {
    const auto model = silicon();
    const double kT = model.thermal_energy();
    const double P = model.momentum_at(45.0 * kT);
    const int n = 161;
    const double h = 2.0 * P / (n - 1);
    double grid = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          const Vec p{-P + i * h, -P + j * h, -P + l * h};
          grid += std::exp(-model.energy(p) / kT);
        }
    grid *= h * h * h;
    const double shell = oracle::semi_infinite(
        [&](double x) { return std::exp(-x) * model.dos_weight(x * kT) * kT; }, 0.0, 1.0);
    CHECK(oracle::rel(grid, shell) < 1e-3);
  }
  SUBCASE("gapped cone") {
    const auto model = cone(1.0);
    const double kT = model.thermal_energy();
    const double P = model.momentum_at(model.band_minimum() + 45.0 * kT);
    const int n = 1201;
    const double h = 2.0 * P / (n - 1);
    double grid = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) grid += std::exp(-model.energy({-P + i * h, -P + j * h, 0.0}) / kT);
    grid *= h * h;
    const double x0 = model.band_minimum() / kT;
    const double shell = oracle::semi_infinite(
        [&](double x) { return x <= x0 ? 0.0 : std::exp(-x) * model.dos_weight(x * kT) * kT; }, x0, x0 + 1.0);
    CHECK(oracle::rel(grid, shell) < 1e-3);
  }
}

TEST_CASE("isotropy under rotations") {
  std::mt19937_64 rng(11);
  const auto model = silicon();
  const double p0 = model.momentum_at(model.thermal_energy());
  std::uniform_real_distribution<double> ang(0.0, 2.0 * pi);
  for (int trial = 0; trial < 20; ++trial) {
    const Vec p = p0 * random_direction(rng, 3);
    const Vec axis = random_direction(rng, 3);
    const double a = ang(rng);
    const Vec rp = rotate(p, axis, a);
    CHECK(oracle::rel(model.energy(rp), model.energy(p)) < 1e-13);
    const Vec rv = rotate(model.group_velocity(p), axis, a);
    CHECK(norm(model.group_velocity(rp) - rv) < 1e-12 * norm(rv));
  }
  const auto g = cone(0.5);
  const double q0 = g.momentum_at(g.band_minimum() + g.thermal_energy());
  for (int trial = 0; trial < 20; ++trial) {
    const Vec p = q0 * random_direction(rng, 2);
    const Vec rp = rotate(p, {0.0, 0.0, 1.0}, ang(rng));
    CHECK(oracle::rel(g.energy(rp), g.energy(p)) < 1e-13);
  }
}

TEST_CASE("momentum_at inverts the energy") {
  for (const auto& model : {silicon(), cone(0.0), cone(2.0)}) {
    for (double x : {0.5, 3.0, 20.0}) {
      const double e = model.band_minimum() + x * model.thermal_energy();
      CHECK(oracle::rel(model.energy({model.momentum_at(e), 0.0, 0.0}), e) < 1e-13);
    }
  }
}

TEST_CASE("invalid parameters") {
  CHECK_THROWS_AS(DispersionModel::kane(-1.0, 0.5 / eV, 300.0), DomainError);
  CHECK_THROWS_AS(DispersionModel::kane(m_e, -0.5 / eV, 300.0), DomainError);
  CHECK_THROWS_AS(DispersionModel::graphene(0.0, 0.0, 300.0), DomainError);
  CHECK_THROWS_AS(DispersionModel::parabolic(m_e, 0.0), DomainError);
}
