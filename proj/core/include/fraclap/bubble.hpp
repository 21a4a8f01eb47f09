#pragma once

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraclap/geometry.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

// phi(x) = (1 + |x|^2)^{(2m-n)/2}, the Sobolev extremal profile.
Field talenti_bubble(const GridSpec& g, double m);

// Radial bump: 1 for r <= delta, 0 for r >= 2*delta, transition
// exp(1 - 1/(1-t^2)) with t = (r - delta)/delta in between.
Field cutoff_bump(const GridSpec& g, double delta);

struct BubbleParams {
  double m = 0.0;
  double eps = 0.0;
  double delta = 0.0;
};

// u_eps(x) = cutoff(x) * (eps^2 + |x|^2)^{(2m-n)/2}. Requires eps >= 4h
// (resolvable) and eps <= delta/4.
Field test_bubble(const GridSpec& g, const BubbleParams& p);

struct Lemma31Row {
  double eps = 0.0;
  double A_m = 0.0;       // seminorm_sq(u_eps, m)
  double A_s = 0.0;       // seminorm_sq(u_eps, s)
  double A_s_tilde = 0.0; // weighted L2 norm against |x|^{-2s}
  double B = 0.0;         // sum |u_eps|^{2*_m} h^n
};

Lemma31Row lemma31_quantities(const GridSpec& g, const DomainMask& mask,
                              double m, double s, double eps, double delta);

// OLS fit of log(value) against log(eps); returns (slope, r^2).
std::pair<double, double> fit_exponent(
    const std::vector<std::pair<double, double>>& pairs);

struct BubbleReport {
  double m = 0.0, s = 0.0, delta = 0.0;
  std::vector<Lemma31Row> rows;  // eps strictly decreasing
  double slope_A_m = 0.0, slope_A_s = 0.0, slope_A_s_tilde = 0.0,
         slope_B = 0.0;
  double r2_A_m = 0.0, r2_A_s = 0.0, r2_A_s_tilde = 0.0, r2_B = 0.0;
  double pred_A_m = 0.0, pred_A_s_tilde = 0.0, pred_B = 0.0;
  bool log_law_regime = false;  // s == 2m - n/2
  bool log_law_flag = false;    // linear-in-|log eps| fit beats the power fit
};

// Evaluates the ladder (parallel across eps), fits exponents, and flags the
// borderline logarithmic growth regime.
BubbleReport verify_lemma31(const GridSpec& g, const DomainMask& mask,
                            double m, double s,
                            const std::vector<double>& eps_ladder,
                            double delta);

std::string to_csv(const BubbleReport& r);
nlohmann::json to_json(const BubbleReport& r);

}  // namespace fraclap
