#include "fraclap/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fraclap/bubble.hpp"
#include "fraclap/eigensolver.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

std::string to_string(Variant v) {
  return v == Variant::spectral ? "spectral" : "hardy";
}

Variant variant_from_string(const std::string& s) {
  if (s == "spectral") return Variant::spectral;
  if (s == "hardy") return Variant::hardy;
  throw std::invalid_argument("unknown variant '" + s + "' (spectral|hardy)");
}

void validate(const ProblemParams& p) {
  if (p.n < 1 || p.n > 4)
    throw std::invalid_argument("params: n must be in {1,2,3,4}");
  if (!(p.s >= 0.0))
    throw std::invalid_argument("params: requires s >= 0");
  if (!(p.s < p.m))
    throw std::invalid_argument("params: requires s < m");
  if (!(p.m < p.n / 2.0))
    throw std::invalid_argument("params: requires m < n/2");
}

void validate(const ProblemParams& p, const DomainMask& mask) {
  validate(p);
  if (p.n != mask.grid.n)
    throw std::invalid_argument("params/mask dimension mismatch");
  if (p.variant == Variant::hardy && !mask.origin_inside)
    throw std::invalid_argument("hardy variant: origin not in the domain");
}

double critical_exponent(int n, double m) {
  if (!(m < n / 2.0))
    throw std::invalid_argument("critical_exponent: requires m < n/2");
  return 2.0 * n / (n - 2.0 * m);
}

double rayleigh(const Field& u, const ProblemParams& p, const DomainMask& mask,
                const HardyWeight* weight) {
  validate(p, mask);
  Field v = project_support(u, mask);
  double den = lp_norm(v, critical_exponent(p.n, p.m));
  if (!(den > 0.0))
    throw std::invalid_argument("rayleigh: field vanishes after support projection");
  double num = seminorm_sq(v, p.m);
  if (p.lambda != 0.0) {
    if (p.variant == Variant::spectral) {
      num -= p.lambda * seminorm_sq(v, p.s);
    } else {
      HardyWeight local;
      if (!weight) {
        local = hardy_weight(u.grid, p.s);
        weight = &local;
      }
      num -= p.lambda * weighted_norm_sq(v, *weight);
    }
  }
  double r = num / (den * den);
  if (!std::isfinite(r)) throw std::runtime_error("rayleigh: non-finite quotient");
  return r;
}

namespace {

// Solve v(L) = v_inf + a L^{-p1} + b L^{-p2} through three (L, v) samples.
double two_power_extrapolate(const double* Ls, const double* vs, double p1,
                             double p2) {
  double A[3][4];
  for (int i = 0; i < 3; ++i) {
    A[i][0] = 1.0;
    A[i][1] = std::pow(Ls[i], -p1);
    A[i][2] = std::pow(Ls[i], -p2);
    A[i][3] = vs[i];
  }
  for (int c = 0; c < 3; ++c) {
    int piv = c;
    for (int r = c + 1; r < 3; ++r)
      if (std::abs(A[r][c]) > std::abs(A[piv][c])) piv = r;
    std::swap(A[c], A[piv]);
    for (int r = 0; r < 3; ++r) {
      if (r == c) continue;
      double f = A[r][c] / A[c][c];
      for (int j = c; j < 4; ++j) A[r][j] -= f * A[c][j];
    }
  }
  return A[0][3] / A[0][0];
}

}  // namespace

SobolevPin pin_sobolev_constant(int n, double m,
                                const std::vector<GridSpec>& ladder) {
  if (ladder.size() < 3)
    throw std::invalid_argument("pin_sobolev_constant: need >= 3 ladder levels");
  SobolevPin pin;
  pin.expo1 = n - 2.0 * m;
  pin.expo2 = std::min(2.0 * (n - 2.0 * m), static_cast<double>(n));
  double p = critical_exponent(n, m);
  for (auto& g : ladder) {
    if (g.n != n) throw std::invalid_argument("pin_sobolev_constant: ladder dimension mismatch");
    Field phi = talenti_bubble(g, m);
    double num = seminorm_sq(phi, m);
    double den = lp_norm(phi, p);
    pin.levels.push_back({g.N, g.L, num / (den * den)});
    if (&g == &ladder.back()) pin.M_hat = num;
  }
  for (std::size_t i = 0; i + 1 < pin.levels.size(); ++i) {
    if (!(pin.levels[i + 1].L > pin.levels[i].L))
      throw std::invalid_argument("pin_sobolev_constant: ladder must increase in L");
    if (!(pin.levels[i + 1].raw > pin.levels[i].raw)) pin.monotone = false;
  }
  if (!pin.monotone)
    throw std::runtime_error(
        "pin_sobolev_constant: non-monotone ladder convergence, no value emitted");

  auto extrap_window = [&](std::size_t start) {
    double Ls[3], vs[3];
    for (int i = 0; i < 3; ++i) {
      Ls[i] = pin.levels[start + i].L;
      vs[i] = pin.levels[start + i].raw;
    }
    return two_power_extrapolate(Ls, vs, pin.expo1, pin.expo2);
  };
  std::size_t last = pin.levels.size() - 3;
  pin.S_m_hat = extrap_window(last);
  if (pin.levels.size() >= 4) {
    double prev = extrap_window(last - 1);
    pin.spread = std::abs(pin.S_m_hat - prev) / std::abs(pin.S_m_hat);
  }
  return pin;
}

HardyPin pin_hardy_constant(int n, double m, const std::vector<GridSpec>& ladder,
                            double ball_radius) {
  if (ladder.empty())
    throw std::invalid_argument("pin_hardy_constant: empty ladder");
  HardyPin pin;
  pin.ball_radius = ball_radius;
  for (auto& g : ladder) {
    if (g.n != n) throw std::invalid_argument("pin_hardy_constant: ladder dimension mismatch");
    DomainMask mask = make_ball_mask(g, ball_radius);
    if (!mask.origin_inside)
      throw std::invalid_argument("pin_hardy_constant: origin not in the ball mask");
    // Hardy variant with s = m: quotient of the m-form against |x|^{-2m}.
    EigenResult er = poincare_lambda1(g, mask, m, m, Variant::hardy, 1e-7);
    if (!er.converged)
      throw std::runtime_error("pin_hardy_constant: eigensolver did not converge");
    pin.levels.push_back({g.N, g.L, er.lambda1});
  }
  pin.H_m_hat = pin.levels.back().raw;
  if (pin.levels.size() >= 2) {
    double prev = pin.levels[pin.levels.size() - 2].raw;
    pin.spread = std::abs(pin.H_m_hat - prev) / std::abs(pin.H_m_hat);
  }
  return pin;
}

nlohmann::json to_json(const PinnedConstants& c) {
  auto levels_json = [](const std::vector<LadderLevel>& levels) {
    nlohmann::json a = nlohmann::json::array();
    for (auto& l : levels) a.push_back({{"N", l.N}, {"L", l.L}, {"raw", l.raw}});
    return a;
  };
  nlohmann::json j{{"n", c.n},
                   {"m", c.m},
                   {"sobolev",
                    {{"S_m_hat", c.sobolev.S_m_hat},
                     {"M_hat", c.sobolev.M_hat},
                     {"spread", c.sobolev.spread},
                     {"monotone", c.sobolev.monotone},
                     {"levels", levels_json(c.sobolev.levels)},
                     {"tail_exponents", {c.sobolev.expo1, c.sobolev.expo2}}}}};
  if (c.hardy) {
    j["hardy"] = {{"H_m_hat", c.hardy->H_m_hat},
                  {"spread", c.hardy->spread},
                  {"ball_radius", c.hardy->ball_radius},
                  {"levels", levels_json(c.hardy->levels)}};
  }
  return j;
}

PinnedConstants constants_from_json(const nlohmann::json& j) {
  PinnedConstants c;
  c.n = j.at("n").get<int>();
  c.m = j.at("m").get<double>();
  auto read_levels = [](const nlohmann::json& a) {
    std::vector<LadderLevel> out;
    for (auto& l : a)
      out.push_back({l.at("N").get<int>(), l.at("L").get<double>(),
                     l.at("raw").get<double>()});
    return out;
  };
  const auto& s = j.at("sobolev");
  c.sobolev.S_m_hat = s.at("S_m_hat").get<double>();
  c.sobolev.M_hat = s.at("M_hat").get<double>();
  c.sobolev.spread = s.at("spread").get<double>();
  c.sobolev.monotone = s.at("monotone").get<bool>();
  c.sobolev.levels = read_levels(s.at("levels"));
  c.sobolev.expo1 = s.at("tail_exponents")[0].get<double>();
  c.sobolev.expo2 = s.at("tail_exponents")[1].get<double>();
  if (j.contains("hardy")) {
    HardyPin h;
    const auto& hj = j.at("hardy");
    h.H_m_hat = hj.at("H_m_hat").get<double>();
    h.spread = hj.at("spread").get<double>();
    h.ball_radius = hj.at("ball_radius").get<double>();
    h.levels = read_levels(hj.at("levels"));
    c.hardy = h;
  }
  return c;
}

}  // namespace fraclap
