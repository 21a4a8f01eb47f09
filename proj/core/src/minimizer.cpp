#include "fraclap/minimizer.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "fraclap/bubble.hpp"
#include "fraclap/fft.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

double effective_radius(const Field& u) {
  const GridSpec& g = u.grid;
  double tot = 0.0;
  double xbar[4] = {0, 0, 0, 0};
  int idx[4];
  for (std::size_t f = 0; f < u.values.size(); ++f) {
    double w2 = u.values[f] * u.values[f];
    if (w2 == 0.0) continue;
    unravel(g, f, idx);
    tot += w2;
    for (int d = 0; d < g.n; ++d) xbar[d] += w2 * g.x(idx[d]);
  }
  if (!(tot > 0.0)) return 0.0;
  for (int d = 0; d < g.n; ++d) xbar[d] /= tot;
  double acc = 0.0;
  for (std::size_t f = 0; f < u.values.size(); ++f) {
    double w2 = u.values[f] * u.values[f];
    if (w2 == 0.0) continue;
    unravel(g, f, idx);
    double d2 = 0.0;
    for (int d = 0; d < g.n; ++d) {
      double dx = g.x(idx[d]) - xbar[d];
      d2 += dx * dx;
    }
    acc += w2 * d2;
  }
  return std::sqrt(acc / tot);
}

namespace {

struct Machinery {
  GridSpec g;
  const DomainMask* mask;
  ProblemParams params;
  double p;        // critical exponent
  double scale2;   // (h/N)^n, Parseval factor for spectral sums
  double hn;       // h^n
  std::vector<double> Lm, Ls, P;
  HardyWeight w;   // hardy variant only

  // J and the real-space operator images, sharing one forward transform.
  void images(const Field& u, Field& Au, Field& Bu, double& J) const {
    std::vector<std::complex<double>> hat(u.values.begin(), u.values.end());
    dft_forward(g, hat);
    std::vector<std::complex<double>> tmp(hat.size());
    for (std::size_t i = 0; i < hat.size(); ++i) tmp[i] = hat[i] * Lm[i];
    dft_backward(g, tmp);
    Au.grid = g;
    Au.values.resize(tmp.size());
    for (std::size_t i = 0; i < tmp.size(); ++i) Au.values[i] = tmp[i].real();
    Bu.grid = g;
    Bu.values.resize(u.values.size());
    if (params.variant == Variant::spectral) {
      if (params.s > 0.0) {
        for (std::size_t i = 0; i < hat.size(); ++i) tmp[i] = hat[i] * Ls[i];
        dft_backward(g, tmp);
        for (std::size_t i = 0; i < tmp.size(); ++i) Bu.values[i] = tmp[i].real();
      } else {
        Bu.values = u.values;
      }
    } else {
      for (std::size_t i = 0; i < u.values.size(); ++i)
        Bu.values[i] = w.values[i] * u.values[i];
    }
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      num += Au.values[i] * u.values[i];
      den += Bu.values[i] * u.values[i];
    }
    J = (num - params.lambda * den) * hn;
  }

  // J alone (one forward transform; used by the line search).
  double J_only(const Field& u) const {
    std::vector<std::complex<double>> hat(u.values.begin(), u.values.end());
    dft_forward(g, hat);
    double num = 0.0, dnum = 0.0;
    if (params.variant == Variant::spectral) {
      bool with_s = params.lambda != 0.0 && params.s > 0.0;
      for (std::size_t i = 0; i < hat.size(); ++i) {
        double a = std::norm(hat[i]);
        num += Lm[i] * a;
        if (with_s) dnum += Ls[i] * a;
      }
      double Jv = (num - (with_s ? params.lambda * dnum : 0.0)) * scale2;
      if (params.lambda != 0.0 && params.s == 0.0) {
        double l2 = 0.0;
        for (double v : u.values) l2 += v * v;
        Jv -= params.lambda * l2 * hn;
      }
      return Jv;
    }
    for (std::size_t i = 0; i < hat.size(); ++i) num += Lm[i] * std::norm(hat[i]);
    double wterm = 0.0;
    for (std::size_t i = 0; i < u.values.size(); ++i)
      wterm += w.values[i] * u.values[i] * u.values[i];
    return num * scale2 - params.lambda * wterm * hn;
  }
};

void mask_in_place(Field& u, const DomainMask& mask) {
  for (std::size_t i = 0; i < u.values.size(); ++i)
    if (!mask.inside[i]) u.values[i] = 0.0;
}

bool lp_normalize(Field& u, double p) {
  double nrm = lp_norm(u, p);
  if (!(nrm > 0.0)) return false;
  double inv = 1.0 / nrm;
  for (auto& v : u.values) v *= inv;
  return true;
}

// A bubble profile used purely as a starting point; unlike test_bubble it is
// not subject to the resolvability precondition.
Field seed_bubble(const GridSpec& g, double m, double eps, double delta) {
  Field f = cutoff_bump(g, delta);
  auto r = radius_table(g);
  double e = (2.0 * m - g.n) / 2.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    f.values[i] *= std::pow(eps * eps + r[i] * r[i], e);
  return f;
}

struct DescentOutcome {
  Field u;
  double J = 0.0;
  int iterations = 0;
  bool converged = false;
};

DescentOutcome descend(const Machinery& M, Field u, double tol, int max_iter) {
  const DomainMask& mask = *M.mask;
  DescentOutcome out;
  mask_in_place(u, mask);
  if (!lp_normalize(u, M.p)) return out;  // seed vanished under projection

  Field Au, Bu;
  double Ju;
  M.images(u, Au, Bu, Ju);
  int stable = 0;
  int it = 0;
  for (; it < max_iter; ++it) {
    if (Ju < -1e-10 * (std::abs(Ju) + 1.0))
      throw std::invalid_argument(
          "groundstate: indefinite form (lambda >= Lambda_1 rejected)");
    // Constrained gradient of J on the lp sphere, projected onto the mask.
    Field grad{M.g, std::vector<double>(u.values.size())};
    for (std::size_t i = 0; i < u.values.size(); ++i) {
      if (!mask.inside[i]) continue;
      double v = u.values[i];
      double pen = Ju * std::pow(std::abs(v), M.p - 2.0) * v;
      grad.values[i] =
          2.0 * (Au.values[i] - M.params.lambda * Bu.values[i] - pen);
    }
    Field dir = apply_multiplier(grad, M.P);
    mask_in_place(dir, mask);
    double gs = 0.0;
    for (std::size_t i = 0; i < grad.values.size(); ++i)
      gs += grad.values[i] * dir.values[i];
    gs *= M.hn;

    // Backtracking from tau = 1, sufficient decrease 1e-4.
    double tau = 1.0;
    bool accepted = false;
    Field v;
    double Jv = Ju;
    while (tau >= 1e-12) {
      v = u;
      for (std::size_t i = 0; i < v.values.size(); ++i)
        v.values[i] -= tau * dir.values[i];
      if (lp_normalize(v, M.p)) {
        Jv = M.J_only(v);
        if (Jv <= Ju - 1e-4 * tau * gs) {
          accepted = true;
          break;
        }
      }
      tau *= 0.5;
    }
    if (accepted) {
      double dJ = std::abs(Jv - Ju);
      u = std::move(v);
      M.images(u, Au, Bu, Ju);
      stable = (dJ < tol * std::abs(Ju)) ? stable + 1 : 0;
    } else {
      // No descent at any step length: numerically stationary.
      ++stable;
    }
    if (stable >= 5) {
      out.converged = true;
      ++it;
      break;
    }
  }
  out.u = std::move(u);
  out.J = Ju;
  out.iterations = it;
  return out;
}

}  // namespace

MinimizationResult groundstate(const GridSpec& g, const DomainMask& mask,
                               const ProblemParams& params,
                               const PinnedConstants* /*constants*/,
                               const MinimizeOptions& opts) {
  validate(params, mask);
  if (!(g == mask.grid)) throw std::invalid_argument("groundstate: grid/mask mismatch");

  Machinery M;
  M.g = g;
  M.mask = &mask;
  M.params = params;
  M.p = critical_exponent(params.n, params.m);
  M.scale2 = std::pow(g.h() / g.N, g.n);
  M.hn = std::pow(g.h(), g.n);
  M.Lm = fraclap_multiplier(g, params.m);
  if (params.variant == Variant::spectral && params.s > 0.0)
    M.Ls = fraclap_multiplier(g, params.s);
  if (params.variant == Variant::hardy) M.w = hardy_weight(g, params.s);
  M.P.resize(M.Lm.size());
  for (std::size_t i = 0; i < M.P.size(); ++i) M.P[i] = 1.0 / (1.0 + M.Lm[i]);

  std::vector<Field> seeds;
  if (opts.bubble_seeds) {
    double delta = mask.inradius / 4.0;
    for (double eps = delta / 2.0; eps >= std::max(g.h(), delta / 64.0); eps /= 2.0)
      seeds.push_back(seed_bubble(g, params.m, eps, delta));
    if (seeds.empty())
      seeds.push_back(seed_bubble(g, params.m, delta / 2.0, delta));
  }
  if (opts.eigenfield_seed) {
    EigenResult er = poincare_lambda1(g, mask, params.m, params.s,
                                      params.variant, 1e-6, 4000);
    if (params.lambda >= er.lambda1)
      throw std::invalid_argument(
          "groundstate: lambda >= Lambda_1 rejected (indefinite form)");
    seeds.push_back(std::move(er.eigenfield));
  }
  for (auto& f : opts.extra_seeds) {
    if (!(f.grid == g)) throw std::invalid_argument("groundstate: seed grid mismatch");
    seeds.push_back(f);
  }
  if (seeds.empty()) throw std::invalid_argument("groundstate: empty seed set");

  std::optional<DescentOutcome> best;
  int total_iters = 0;
  for (auto& seed : seeds) {
    DescentOutcome o = descend(M, seed, opts.tol, opts.max_iter);
    total_iters += o.iterations;
    if (o.u.values.empty()) continue;  // degenerate seed
    if (!best || o.J < best->J) best = std::move(o);
  }
  if (!best) throw std::invalid_argument("groundstate: all seeds vanish on the mask");

  MinimizationResult result;
  result.field = std::move(best->u);
  result.S_value = rayleigh(result.field, params, mask,
                            params.variant == Variant::hardy ? &M.w : nullptr);
  result.converged = best->converged;
  result.iterations = total_iters;
  result.r_eff = effective_radius(result.field);
  result.concentrated = result.r_eff < 3.0 * g.h();
  if (!result.converged)
    throw MinimizationError("groundstate: no start converged within the iteration cap",
                            std::move(result));
  return result;
}

std::vector<std::pair<double, MinimizationResult>> s_curve(
    const GridSpec& g, const DomainMask& mask, const ProblemParams& base,
    const std::vector<double>& lambdas, const PinnedConstants* constants,
    const MinimizeOptions& opts) {
  std::vector<std::pair<double, MinimizationResult>> out;
  std::optional<Field> warm;
  for (double lam : lambdas) {
    ProblemParams p = base;
    p.lambda = lam;
    MinimizeOptions o = opts;
    if (warm) {
      // Warm-start from the previous minimizer; keep the full seed set only
      // on the first lambda.
      o.bubble_seeds = false;
      o.eigenfield_seed = false;
      o.extra_seeds.push_back(*warm);
    }
    try {
      MinimizationResult r = groundstate(g, mask, p, constants, o);
      warm = r.field;
      out.emplace_back(lam, std::move(r));
    } catch (const MinimizationError& e) {
      warm = e.best.field;
      out.emplace_back(lam, e.best);
    }
  }
  return out;
}

ThresholdResult lambda_star(const GridSpec& g, const DomainMask& mask,
                            const ProblemParams& base,
                            const PinnedConstants& constants,
                            double tol_lambda, double margin,
                            const MinimizeOptions& opts) {
  ProblemParams probe = base;
  probe.lambda = 0.0;
  validate(probe, mask);
  EigenResult er =
      poincare_lambda1(g, mask, base.m, base.s, base.variant, 1e-8);
  double lam1 = er.lambda1;
  double S_hat = constants.sobolev.S_m_hat;
  double cut = S_hat * (1.0 - margin);

  ThresholdResult res;
  res.lambda1 = lam1;
  std::optional<Field> warm;
  auto predicate = [&](double lam) {
    ProblemParams p = base;
    p.lambda = lam;
    MinimizeOptions o = opts;
    if (warm) o.extra_seeds.push_back(*warm);
    MinimizationResult r = [&] {
      try {
        return groundstate(g, mask, p, &constants, o);
      } catch (const MinimizationError& e) {
        return e.best;
      }
    }();
    warm = r.field;
    res.S_curve.emplace_back(lam, r.S_value);
    return r.S_value < cut && !r.concentrated;
  };

  double hi = lam1 * (1.0 - 1e-3);
  if (predicate(0.0)) {
    // Dip already present at lambda = 0+: non-critical case.
    res.lambda_star = 0.0;
    res.bracket = {0.0, 0.0};
  } else if (!predicate(hi)) {
    throw std::runtime_error(
        "lambda_star: no dip detected at the top of the bracket (lambda = " +
        std::to_string(hi) + ", Lambda_1 = " + std::to_string(lam1) + ")");
  } else {
    double lo = 0.0;
    while (hi - lo > tol_lambda * lam1) {
      double mid = 0.5 * (lo + hi);
      if (predicate(mid))
        hi = mid;
      else
        lo = mid;
    }
    res.lambda_star = hi;
    res.bracket = {lo, hi};
  }
  std::sort(res.S_curve.begin(), res.S_curve.end());
  return res;
}

nlohmann::json to_json(const MinimizationResult& r) {
  return {{"S_value", r.S_value},
          {"converged", r.converged},
          {"concentrated", r.concentrated},
          {"r_eff", r.r_eff},
          {"iterations", r.iterations},
          {"grid", {{"n", r.field.grid.n},
                    {"N", r.field.grid.N},
                    {"L", r.field.grid.L},
                    {"h", r.field.grid.h()}}}};
}

nlohmann::json to_json(const ThresholdResult& r) {
  nlohmann::json curve = nlohmann::json::array();
  for (auto& [lam, S] : r.S_curve) curve.push_back({{"lambda", lam}, {"S_value", S}});
  return {{"lambda_star", r.lambda_star},
          {"bracket", {r.bracket.first, r.bracket.second}},
          {"lambda1", r.lambda1},
          {"S_curve", curve}};
}

}  // namespace fraclap
