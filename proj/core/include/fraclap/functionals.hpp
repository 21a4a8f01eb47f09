#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fraclap/geometry.hpp"
#include "fraclap/grid.hpp"

namespace fraclap {

enum class Variant { spectral, hardy };

std::string to_string(Variant v);
Variant variant_from_string(const std::string& s);

struct ProblemParams {
  int n = 0;
  double m = 0.0;
  double s = 0.0;
  double lambda = 0.0;
  Variant variant = Variant::spectral;
};

// Enforces 0 <= s < m < n/2 and, for the hardy variant, that the origin lies
// inside the domain. Throws std::invalid_argument naming the violation.
void validate(const ProblemParams& p);
void validate(const ProblemParams& p, const DomainMask& mask);

// 2*_m = 2n/(n - 2m)
double critical_exponent(int n, double m);

// (seminorm_sq(u,m) - lambda * D(u)) / lp_norm(u, 2*_m)^2 where D is the
// s-seminorm (spectral) or the |x|^{-2s}-weighted L2 norm (hardy). The field
// is support-projected first; weight may be null unless variant == hardy.
double rayleigh(const Field& u, const ProblemParams& p, const DomainMask& mask,
                const HardyWeight* weight = nullptr);

struct LadderLevel {
  int N = 0;
  double L = 0.0;
  double raw = 0.0;
};

struct SobolevPin {
  double S_m_hat = 0.0;
  double M_hat = 0.0;  // seminorm_sq(phi, m) on the finest level
  double spread = 0.0; // relative gap between the two sliding extrapolations
  bool monotone = true;
  std::vector<LadderLevel> levels;
  double expo1 = 0.0, expo2 = 0.0;  // tail exponents used for extrapolation
};

// Evaluates the Talenti quotient on each grid of the ladder and removes the
// box-truncation tail by a two-power fit in 1/L with exponents n-2m and
// min(2(n-2m), n). Needs >= 3 levels; spread requires >= 4.
SobolevPin pin_sobolev_constant(int n, double m,
                                const std::vector<GridSpec>& ladder);

struct HardyPin {
  double H_m_hat = 0.0;
  double spread = 0.0;  // relative gap between the two finest levels
  std::vector<LadderLevel> levels;
  double ball_radius = 0.0;
};

// Smallest generalized Rayleigh value of the m-form against the |x|^{-2m}
// weight on a centered ball, per ladder level (finest value reported).
HardyPin pin_hardy_constant(int n, double m, const std::vector<GridSpec>& ladder,
                            double ball_radius);

struct PinnedConstants {
  int n = 0;
  double m = 0.0;
  SobolevPin sobolev;
  std::optional<HardyPin> hardy;
};

nlohmann::json to_json(const PinnedConstants& c);
PinnedConstants constants_from_json(const nlohmann::json& j);

}  // namespace fraclap
