#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraclap/eigensolver.hpp"
#include "fraclap/functionals.hpp"

namespace fraclap {

struct MinimizationResult {
  double S_value = 0.0;
  Field field;
  bool converged = false;
  bool concentrated = false;  // r_eff < 3h
  double r_eff = 0.0;
  int iterations = 0;  // total over all starts
};

// Second moment radius of u^2 about its barycenter.
double effective_radius(const Field& u);

// Thrown when no start converges; carries the best iterate found.
struct MinimizationError : std::runtime_error {
  MinimizationError(const std::string& what, MinimizationResult best_result)
      : std::runtime_error(what), best(std::move(best_result)) {}
  MinimizationResult best;
};

struct MinimizeOptions {
  double tol = 1e-9;
  int max_iter = 20000;
  bool bubble_seeds = true;      // Talenti bubbles over a geometric eps ladder
  bool eigenfield_seed = true;   // first eigenfield of the (m,s) pair
  std::vector<Field> extra_seeds;  // e.g. warm starts from a coarser grid
};

// Ground state of the perturbed quotient: normalized projected gradient flow
// on J(u) = seminorm_sq(u,m) - lambda*D(u) under lp_norm(u, 2*_m) = 1, with
// preconditioner (1+|k|^{2m})^{-1}, support projection each step, and Armijo
// backtracking from tau0 = 1 (sufficient decrease 1e-4). Multi-start over the
// seed set; best quotient wins. Requires lambda < Lambda_1 (checked against
// the quotient being bounded below; callers pass lambda inside the admissible
// range). The constants argument is recorded in serialized output only.
MinimizationResult groundstate(const GridSpec& g, const DomainMask& mask,
                               const ProblemParams& params,
                               const PinnedConstants* constants = nullptr,
                               const MinimizeOptions& opts = {});

// Per-lambda ground states, warm-starting each lambda from the previous
// minimizer. Per-lambda failures are recorded, the curve is still produced.
std::vector<std::pair<double, MinimizationResult>> s_curve(
    const GridSpec& g, const DomainMask& mask, const ProblemParams& base,
    const std::vector<double>& lambdas,
    const PinnedConstants* constants = nullptr,
    const MinimizeOptions& opts = {});

struct ThresholdResult {
  double lambda_star = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  double lambda1 = 0.0;
  std::vector<std::pair<double, double>> S_curve;  // sampled (lambda, S)
};

// Bisection for the smallest lambda with
//   S_value < S_m_hat * (1 - margin)  and  not concentrated
// over [0, Lambda_1*(1-1e-3)]. Throws "no dip detected" if the predicate
// fails at the top of the bracket.
ThresholdResult lambda_star(const GridSpec& g, const DomainMask& mask,
                            const ProblemParams& base,
                            const PinnedConstants& constants,
                            double tol_lambda = 0.01, double margin = 0.02,
                            const MinimizeOptions& opts = {});

nlohmann::json to_json(const MinimizationResult& r);
nlohmann::json to_json(const ThresholdResult& r);

}  // namespace fraclap
