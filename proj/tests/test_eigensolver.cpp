#include <doctest.h>

#include <cmath>
#include <random>

#include "fraclap/eigensolver.hpp"
#include "fraclap/spectral.hpp"

using namespace fraclap;

// Golden values: dense generalized eigensolves of the explicitly assembled
// operator restricted to the mask (independent oracle, frozen).

TEST_CASE("lambda1 matches the dense oracle, spectral variant") {
  GridSpec g = make_grid(1, 1 << 9, 4.0);
  EigenResult r = poincare_lambda1(g, make_ball_mask(g, 1.0), 0.45, 0.0,
                                   Variant::spectral);
  CHECK(r.converged);
  CHECK(r.lambda1 == doctest::Approx(1.0553488335).epsilon(1e-7));
  CHECK(r.residual <= 1e-8 * r.lambda1);  // residual certificate

  EigenResult r2 = poincare_lambda1(g, make_ball_mask(g, 2.0), 0.45, 0.0,
                                    Variant::spectral);
  CHECK(r2.lambda1 == doctest::Approx(0.5103534936).epsilon(1e-7));
  // Domain monotonicity: the larger ball has the smaller first eigenvalue.
  CHECK(r2.lambda1 < r.lambda1);

  EigenResult r3 = poincare_lambda1(g, make_ball_mask(g, 0.8, {0.9}), 0.45,
                                    0.0, Variant::spectral);
  CHECK(r3.lambda1 == doctest::Approx(1.3196267149).epsilon(1e-7));

  EigenResult r4 = poincare_lambda1(g, make_ball_mask(g, 1.0), 0.45, 0.15,
                                    Variant::spectral);
  CHECK(r4.lambda1 == doctest::Approx(1.2632572868).epsilon(1e-7));

  GridSpec g10 = make_grid(1, 1 << 10, 4.0);
  EigenResult r5 = poincare_lambda1(g10, make_ball_mask(g10, 2.0), 0.3, 0.1,
                                    Variant::spectral);
  CHECK(r5.lambda1 == doctest::Approx(0.9585101682).epsilon(1e-7));
}

TEST_CASE("lambda1 matches the dense oracle, hardy variant") {
  GridSpec g = make_grid(1, 1 << 10, 4.0);
  EigenResult r = poincare_lambda1(g, make_ball_mask(g, 2.0), 0.35, 0.25,
                                   Variant::hardy);
  CHECK(r.converged);
  CHECK(r.lambda1 == doctest::Approx(0.2365042171).epsilon(1e-7));
  CHECK(r.lambda1 > 0.0);
}

TEST_CASE("eigenfield is supported in the mask with unit D-norm") {
  GridSpec g = make_grid(1, 1 << 9, 4.0);
  DomainMask mask = make_ball_mask(g, 1.0);
  double m = 0.45, s = 0.15;
  EigenResult r = poincare_lambda1(g, mask, m, s, Variant::spectral);
  for (std::size_t i = 0; i < r.eigenfield.values.size(); ++i)
    if (!mask.inside[i]) CHECK(r.eigenfield.values[i] == 0.0);
  CHECK(seminorm_sq(r.eigenfield, s) == doctest::Approx(1.0).epsilon(1e-8));
  // The quotient of the eigenfield reproduces lambda1.
  CHECK(seminorm_sq(r.eigenfield, m) == doctest::Approx(r.lambda1).epsilon(1e-8));
}

TEST_CASE("lambda1 is a lower bound for the quotient of admissible fields") {
  GridSpec g = make_grid(1, 1 << 9, 4.0);
  DomainMask mask = make_ball_mask(g, 1.0);
  double m = 0.45, s = 0.0;
  EigenResult r = poincare_lambda1(g, mask, m, s, Variant::spectral);
  std::mt19937 rng(13);
  std::normal_distribution<double> dist;
  for (int trial = 0; trial < 10; ++trial) {
    Field u = make_field(g);
    for (std::size_t i = 0; i < u.values.size(); ++i)
      if (mask.inside[i]) u.values[i] = dist(rng);
    double q = seminorm_sq(u, m) / seminorm_sq(u, s);
    CHECK(q >= r.lambda1 * (1.0 - 1e-9));
  }
}

TEST_CASE("eigensolver input guards") {
  GridSpec g = make_grid(1, 256, 4.0);
  DomainMask mask = make_ball_mask(g, 1.0);
  CHECK_THROWS_AS(poincare_lambda1(g, mask, 0.2, 0.3, Variant::spectral),
                  std::invalid_argument);  // s > m
  CHECK_THROWS_AS(poincare_lambda1(g, mask, 0.6, 0.0, Variant::spectral),
                  std::invalid_argument);  // m >= n/2
  CHECK_THROWS_AS(poincare_lambda1(g, mask, 0.3, -0.1, Variant::spectral),
                  std::invalid_argument);
  CHECK_THROWS_AS(poincare_lambda1(g, mask, 0.3, 0.1, Variant::spectral, 0.0),
                  std::invalid_argument);  // tol
  DomainMask ann = make_annulus_mask(g, 0.3, 1.0);
  CHECK_THROWS_AS(poincare_lambda1(g, ann, 0.3, 0.1, Variant::hardy),
                  std::invalid_argument);  // origin not in the domain
  GridSpec g2 = make_grid(1, 512, 4.0);
  CHECK_THROWS_AS(poincare_lambda1(g2, mask, 0.3, 0.1, Variant::spectral),
                  std::invalid_argument);  // grid/mask mismatch
}

TEST_CASE("EigenResult serializes with grid metadata") {
  GridSpec g = make_grid(1, 256, 4.0);
  EigenResult r =
      poincare_lambda1(g, make_ball_mask(g, 1.0), 0.3, 0.1, Variant::spectral);
  nlohmann::json j = to_json(r);
  CHECK(j.at("lambda1").get<double>() == r.lambda1);
  CHECK(j.at("converged").get<bool>());
  CHECK(j.at("grid").at("N").get<int>() == 256);
  CHECK(j.at("grid").at("h").get<double>() == doctest::Approx(g.h()));
}
