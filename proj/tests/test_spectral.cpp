#include <doctest.h>

#include <cmath>
#include <random>

#include "fraclap/fft.hpp"
#include "fraclap/spectral.hpp"

using namespace fraclap;

namespace {

Field random_field(const GridSpec& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  Field u = make_field(g);
  for (auto& v : u.values) v = dist(rng);
  return u;
}

double dot(const Field& a, const Field& b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i)
    acc += a.values[i] * b.values[i];
  return acc * std::pow(a.grid.h(), a.grid.n);
}

}  // namespace

TEST_CASE("transform round trip and Parseval") {
  for (auto g : {make_grid(1, 64, 2.0), make_grid(2, 16, 1.5)}) {
    Field u = random_field(g, 7);
    SpectralField hat = transform(u);
    Field back = inverse_transform(hat);
    double phys = 0.0, spec = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      CHECK(back.values[i] == doctest::Approx(u.values[i]).epsilon(1e-12));
      phys += u.values[i] * u.values[i];
    }
    phys *= std::pow(g.h(), g.n);
    for (auto& c : hat.coeff) spec += std::norm(c);
    CHECK(spec == doctest::Approx(phys).epsilon(1e-12));
  }
}

TEST_CASE("apply_fraclap is diagonal on Fourier modes") {
  GridSpec g = make_grid(1, 64, 2.0);
  double k1 = g.k(3);
  Field u = make_field(g);
  for (int i = 0; i < g.N; ++i) u.values[i] = std::cos(k1 * g.x(i));
  for (double a : {0.25, 0.5, 1.0, 1.3}) {
    Field v = apply_fraclap(u, a);
    double mul = std::pow(k1 * k1, a);
    for (int i = 0; i < g.N; ++i)
      CHECK(v.values[i] == doctest::Approx(mul * u.values[i]).epsilon(1e-10));
  }
}

TEST_CASE("order zero is the identity, positive order kills constants") {
  GridSpec g = make_grid(2, 16, 1.0);
  Field u = random_field(g, 11);
  Field v = apply_fraclap(u, 0.0);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    CHECK(v.values[i] == doctest::Approx(u.values[i]).epsilon(1e-12));

  Field c = make_field(g);
  for (auto& x : c.values) x = 3.7;
  Field w = apply_fraclap(c, 0.8);
  for (double x : w.values) CHECK(std::abs(x) < 1e-10);
  CHECK(seminorm_sq(c, 0.8) == doctest::Approx(0.0));
  // At order zero the seminorm is the plain squared L2 norm, constants included.
  CHECK(seminorm_sq(c, 0.0) ==
        doctest::Approx(3.7 * 3.7 * std::pow(2.0 * g.L, g.n)).epsilon(1e-12));
}

TEST_CASE("semigroup, self-adjointness and quadratic form identity") {
  GridSpec g = make_grid(1, 128, 3.0);
  Field u = random_field(g, 3);
  Field v = random_field(g, 4);

  Field ab = apply_fraclap(apply_fraclap(u, 0.3), 0.45);
  Field apb = apply_fraclap(u, 0.75);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    CHECK(ab.values[i] == doctest::Approx(apb.values[i]).epsilon(1e-10));

  Field Au = apply_fraclap(u, 0.6);
  Field Av = apply_fraclap(v, 0.6);
  CHECK(dot(Au, v) == doctest::Approx(dot(u, Av)).epsilon(1e-10));

  double half = lp_norm(apply_fraclap(u, 0.3), 2.0);
  CHECK(seminorm_sq(u, 0.6) == doctest::Approx(half * half).epsilon(1e-10));
}

TEST_CASE("quad_form matches seminorm_sq through the multiplier path") {
  GridSpec g = make_grid(2, 16, 1.0);
  Field u = random_field(g, 19);
  for (double a : {0.0, 0.4, 1.0}) {
    auto mult = fraclap_multiplier(g, a);
    CHECK(quad_form(u, mult) ==
          doctest::Approx(seminorm_sq(u, a)).epsilon(1e-12));
    Field direct = apply_fraclap(u, a);
    Field via = apply_multiplier(u, mult);
    for (std::size_t i = 0; i < u.values.size(); ++i)
      CHECK(via.values[i] == doctest::Approx(direct.values[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(fraclap_multiplier(g, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(apply_fraclap(u, -0.1), std::invalid_argument);
  CHECK_THROWS_AS(seminorm_sq(u, -0.1), std::invalid_argument);
}

TEST_CASE("lp_norm closed forms") {
  GridSpec g = make_grid(1, 32, 2.0);
  Field c = make_field(g);
  for (auto& x : c.values) x = 2.0;
  // Constant field: ||c||_p = |c| * (2L)^{1/p}.
  CHECK(lp_norm(c, 2.0) == doctest::Approx(2.0 * std::sqrt(4.0)).epsilon(1e-13));
  CHECK(lp_norm(c, 4.0) == doctest::Approx(2.0 * std::pow(4.0, 0.25)).epsilon(1e-13));
  CHECK_THROWS_AS(lp_norm(c, 0.5), std::invalid_argument);
}

TEST_CASE("dilate samples u(Rx) on the node lattice") {
  GridSpec g = make_grid(1, 64, 2.0);
  Field u = random_field(g, 23);
  for (int R : {2, 4}) {
    Field d = dilate(u, R);
    for (int i = 0; i < g.N; ++i) {
      long j = static_cast<long>(g.N) * (1 - R) / 2 + static_cast<long>(R) * i;
      if (j >= 0 && j < g.N)
        CHECK(d.values[i] == u.values[static_cast<std::size_t>(j)]);
      else
        CHECK(d.values[i] == 0.0);
    }
  }
  CHECK_THROWS_AS(dilate(u, 1), std::invalid_argument);
  CHECK_THROWS_AS(dilate(u, 3), std::invalid_argument);  // 3 does not divide 64
}

TEST_CASE("dilation scaling laws on a resolved bump") {
  GridSpec g = make_grid(1, 1 << 12, 4.0);
  // Smooth compactly supported bump, support well inside the box.
  Field u = make_field(g);
  for (int i = 0; i < g.N; ++i) {
    double x = g.x(i);
    u.values[i] = std::abs(x) < 1.0 ? std::exp(-1.0 / (1.0 - x * x)) : 0.0;
  }
  int R = 2;
  Field uR = dilate(u, R);
  double m = 0.35, p = 4.0;
  // [u]_m^2 / [u(R.)]_m^2 = R^{n-2m};  ||u||_p^p / ||u(R.)||_p^p = R^n.
  CHECK(seminorm_sq(u, m) / seminorm_sq(uR, m) ==
        doctest::Approx(std::pow(R, g.n - 2.0 * m)).epsilon(0.05));
  CHECK(std::pow(lp_norm(u, p) / lp_norm(uR, p), p) ==
        doctest::Approx(static_cast<double>(R)).epsilon(5e-3));
}
