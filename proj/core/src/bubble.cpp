#include "fraclap/bubble.hpp"

#include <cmath>
#include <future>
#include <sstream>
#include <stdexcept>

#include "fraclap/functionals.hpp"
#include "fraclap/io.hpp"
#include "fraclap/spectral.hpp"

namespace fraclap {

Field talenti_bubble(const GridSpec& g, double m) {
  if (!(m > 0.0 && m < g.n / 2.0))
    throw std::invalid_argument("talenti_bubble: requires 0 < m < n/2");
  auto r = radius_table(g);
  Field out{g, std::vector<double>(g.size())};
  double e = (2.0 * m - g.n) / 2.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    out.values[i] = std::pow(1.0 + r[i] * r[i], e);
  return out;
}

Field cutoff_bump(const GridSpec& g, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("cutoff_bump: delta must be > 0");
  if (2.0 * delta > g.L / 2.0)
    throw std::invalid_argument("cutoff_bump: support 2*delta exceeds the box margin");
  auto r = radius_table(g);
  Field out{g, std::vector<double>(g.size(), 0.0)};
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (r[i] <= delta) {
      out.values[i] = 1.0;
    } else if (r[i] < 2.0 * delta) {
      double t = (r[i] - delta) / delta;
      out.values[i] = std::exp(1.0 - 1.0 / (1.0 - t * t));
    }
  }
  return out;
}

Field test_bubble(const GridSpec& g, const BubbleParams& p) {
  if (!(p.eps > 0.0)) throw std::invalid_argument("test_bubble: eps must be > 0");
  if (p.eps < 4.0 * g.h())
    throw std::invalid_argument(
        "test_bubble: eps = " + format_double(p.eps) +
        " is unresolvable on h = " + format_double(g.h()) + " (need eps >= 4h)");
  if (p.eps > p.delta / 4.0 + 1e-15)
    throw std::invalid_argument("test_bubble: requires eps <= delta/4");
  Field cut = cutoff_bump(g, p.delta);
  auto r = radius_table(g);
  double e = (2.0 * p.m - g.n) / 2.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    cut.values[i] *= std::pow(p.eps * p.eps + r[i] * r[i], e);
  return cut;
}

Lemma31Row lemma31_quantities(const GridSpec& g, const DomainMask& mask,
                              double m, double s, double eps, double delta) {
  if (!(s >= 0.0 && s < m && m < g.n / 2.0))
    throw std::invalid_argument("lemma31_quantities: requires 0 <= s < m < n/2");
  if (2.0 * delta > mask.inradius + 1e-12)
    throw std::invalid_argument("lemma31_quantities: bubble support exceeds the domain");
  Field u = project_support(test_bubble(g, BubbleParams{m, eps, delta}), mask);
  Lemma31Row row;
  row.eps = eps;
  row.A_m = seminorm_sq(u, m);
  row.A_s = seminorm_sq(u, s);
  if (s == 0.0) {
    row.A_s_tilde = seminorm_sq(u, 0.0);
  } else {
    row.A_s_tilde = weighted_norm_sq(u, hardy_weight(g, s));
  }
  double p = critical_exponent(g.n, m);
  double hn = std::pow(g.h(), g.n);
  double acc = 0.0;
  for (double v : u.values) acc += std::pow(std::abs(v), p);
  row.B = acc * hn;
  return row;
}

std::pair<double, double> fit_exponent(
    const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 4)
    throw std::invalid_argument("fit_exponent: need at least 4 (eps, value) pairs");
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!(pairs[i].second > 0.0))
      throw std::invalid_argument("fit_exponent: values must be positive");
    if (i > 0 && !(pairs[i].first < pairs[i - 1].first))
      throw std::invalid_argument("fit_exponent: eps must be strictly decreasing");
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  double nn = static_cast<double>(pairs.size());
  for (auto& [e, v] : pairs) {
    double x = std::log(e), y = std::log(v);
    sx += x; sy += y; sxx += x * x; sxy += x * y; syy += y * y;
  }
  double vxx = sxx - sx * sx / nn;
  double vxy = sxy - sx * sy / nn;
  double vyy = syy - sy * sy / nn;
  double slope = vxy / vxx;
  double r2 = vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
  return {slope, r2};
}

namespace {

// r^2 of the best linear fit of y against x.
double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
  double nn = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i]; sy += y[i]; sxx += x[i] * x[i];
    sxy += x[i] * y[i]; syy += y[i] * y[i];
  }
  double vxx = sxx - sx * sx / nn;
  double vxy = sxy - sx * sy / nn;
  double vyy = syy - sy * sy / nn;
  return vyy > 0 ? (vxy * vxy) / (vxx * vyy) : 1.0;
}

}  // namespace

BubbleReport verify_lemma31(const GridSpec& g, const DomainMask& mask,
                            double m, double s,
                            const std::vector<double>& eps_ladder,
                            double delta) {
  if (eps_ladder.size() < 4)
    throw std::invalid_argument("verify_lemma31: ladder too short (need >= 4 eps)");
  BubbleReport rep;
  rep.m = m;
  rep.s = s;
  rep.delta = delta;

  std::vector<std::future<Lemma31Row>> jobs;
  jobs.reserve(eps_ladder.size());
  for (double eps : eps_ladder)
    jobs.push_back(std::async(std::launch::async, [&, eps] {
      return lemma31_quantities(g, mask, m, s, eps, delta);
    }));
  for (auto& j : jobs) rep.rows.push_back(j.get());

  auto series = [&](auto member) {
    std::vector<std::pair<double, double>> p;
    for (auto& r : rep.rows) p.emplace_back(r.eps, r.*member);
    return p;
  };
  std::tie(rep.slope_A_m, rep.r2_A_m) = fit_exponent(series(&Lemma31Row::A_m));
  std::tie(rep.slope_A_s, rep.r2_A_s) = fit_exponent(series(&Lemma31Row::A_s));
  std::tie(rep.slope_A_s_tilde, rep.r2_A_s_tilde) =
      fit_exponent(series(&Lemma31Row::A_s_tilde));
  std::tie(rep.slope_B, rep.r2_B) = fit_exponent(series(&Lemma31Row::B));

  rep.pred_A_m = 2.0 * m - g.n;
  rep.pred_A_s_tilde = 4.0 * m - g.n - 2.0 * s;
  rep.pred_B = -static_cast<double>(g.n);

  // Borderline regime s = 2m - n/2: growth is logarithmic, so a linear fit
  // of A_s_tilde against |log eps| should beat the log-log power fit.
  rep.log_law_regime = std::abs(s - (2.0 * m - g.n / 2.0)) < 1e-12;
  std::vector<double> xs, ys;
  for (auto& r : rep.rows) {
    xs.push_back(std::abs(std::log(r.eps)));
    ys.push_back(r.A_s_tilde);
  }
  rep.log_law_flag = linear_r2(xs, ys) > rep.r2_A_s_tilde;
  return rep;
}

std::string to_csv(const BubbleReport& r) {
  std::ostringstream os;
  os << "# fraclap-csv v1 lemma31 eps,A_m,A_s,A_s_tilde,B\n";
  os << "eps,A_m,A_s,A_s_tilde,B\n";
  for (auto& row : r.rows)
    os << format_double(row.eps) << ',' << format_double(row.A_m) << ','
       << format_double(row.A_s) << ',' << format_double(row.A_s_tilde) << ','
       << format_double(row.B) << '\n';
  return os.str();
}

nlohmann::json to_json(const BubbleReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (auto& row : r.rows)
    rows.push_back({{"eps", row.eps},
                    {"A_m", row.A_m},
                    {"A_s", row.A_s},
                    {"A_s_tilde", row.A_s_tilde},
                    {"B", row.B}});
  return {{"m", r.m},
          {"s", r.s},
          {"delta", r.delta},
          {"rows", rows},
          {"slopes",
           {{"A_m", r.slope_A_m},
            {"A_s", r.slope_A_s},
            {"A_s_tilde", r.slope_A_s_tilde},
            {"B", r.slope_B}}},
          {"r2",
           {{"A_m", r.r2_A_m},
            {"A_s", r.r2_A_s},
            {"A_s_tilde", r.r2_A_s_tilde},
            {"B", r.r2_B}}},
          {"predicted",
           {{"A_m", r.pred_A_m},
            {"A_s_tilde", r.pred_A_s_tilde},
            {"B", r.pred_B}}},
          {"log_law_regime", r.log_law_regime},
          {"log_law_flag", r.log_law_flag}};
}

}  // namespace fraclap
