#include "fraclap/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "fraclap/bubble.hpp"
#include "fraclap/eigensolver.hpp"
#include "fraclap/functionals.hpp"
#include "fraclap/io.hpp"
#include "fraclap/minimizer.hpp"

namespace fraclap {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json load_json_file(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file " + path.string());
  return json::parse(in);
}

GridSpec grid_from_json(const json& j) {
  return make_grid(j.at("n").get<int>(), j.at("N").get<int>(),
                   j.at("L").get<double>());
}

DomainMask mask_from_json(const json& j, const GridSpec& g) {
  std::string shape = j.at("shape").get<std::string>();
  std::vector<double> center;
  if (j.contains("center")) center = j.at("center").get<std::vector<double>>();
  if (shape == "ball")
    return make_ball_mask(g, j.at("radius").get<double>(), center);
  if (shape == "cube")
    return make_cube_mask(g, j.at("half_width").get<double>(), center);
  if (shape == "annulus")
    return make_annulus_mask(g, j.at("r_inner").get<double>(),
                             j.at("r_outer").get<double>(), center);
  throw std::invalid_argument("unknown domain shape '" + shape +
                              "' (ball|cube|annulus)");
}

ProblemParams params_from_json(const json& j, int n) {
  ProblemParams p;
  p.n = n;
  p.m = j.at("m").get<double>();
  p.s = j.at("s").get<double>();
  p.lambda = j.value("lambda", 0.0);
  p.variant = variant_from_string(j.value("variant", std::string("spectral")));
  validate(p);
  return p;
}

std::vector<GridSpec> ladder_from_json(const json& j, int n) {
  std::vector<GridSpec> out;
  for (auto& level : j)
    out.push_back(make_grid(n, level.at("N").get<int>(), level.at("L").get<double>()));
  return out;
}

fs::path resolve_output_dir(const json& config) {
  if (const char* env = std::getenv("FRACLAP_OUTPUT_DIR"); env && *env)
    return fs::path(env);
  return fs::path(config.value("output_dir", std::string("out")));
}

MinimizeOptions minopts_from_json(const json& config) {
  MinimizeOptions o;
  if (config.contains("tolerances")) {
    const auto& t = config.at("tolerances");
    o.tol = t.value("minimize", o.tol);
    o.max_iter = t.value("max_iter", o.max_iter);
  }
  return o;
}

double eigen_tol(const json& config) {
  if (config.contains("tolerances"))
    return config.at("tolerances").value("eigen", 1e-8);
  return 1e-8;
}

// Sobolev pins are reused across sweep cells; cache per (n, m, ladder).
const SobolevPin& cached_sobolev_pin(int n, double m,
                                     const std::vector<GridSpec>& ladder) {
  static std::map<std::string, SobolevPin> cache;
  static std::mutex mu;
  std::ostringstream key;
  key << n << '|' << format_double(m);
  for (auto& g : ladder) key << '|' << g.N << ':' << format_double(g.L);
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key.str());
  if (it == cache.end())
    it = cache.emplace(key.str(), pin_sobolev_constant(n, m, ladder)).first;
  return it->second;
}

PinnedConstants resolve_constants(const json& config, int n, double m) {
  if (config.contains("constants_file")) {
    auto c = constants_from_json(
        load_json_file(config.at("constants_file").get<std::string>()));
    if (c.n != n || std::abs(c.m - m) > 1e-12)
      throw std::invalid_argument("constants_file was pinned for different (n, m)");
    return c;
  }
  if (!config.contains("pin_ladder"))
    throw std::invalid_argument(
        "need 'constants_file' or 'pin_ladder' to obtain the pinned constants");
  PinnedConstants c;
  c.n = n;
  c.m = m;
  c.sobolev = cached_sobolev_pin(n, m, ladder_from_json(config.at("pin_ladder"), n));
  return c;
}

std::vector<double> lambda_list(const json& config, const GridSpec& g,
                                const DomainMask& mask, const ProblemParams& p,
                                double eig_tol) {
  if (config.contains("lambdas"))
    return config.at("lambdas").get<std::vector<double>>();
  if (config.contains("lambda_fracs")) {
    EigenResult er = poincare_lambda1(g, mask, p.m, p.s, p.variant, eig_tol);
    std::vector<double> out;
    for (double f : config.at("lambda_fracs").get<std::vector<double>>())
      out.push_back(f * er.lambda1);
    return out;
  }
  throw std::invalid_argument("scurve: need 'lambdas' or 'lambda_fracs'");
}

void maybe_dump(const json& config, const fs::path& dir, const std::string& name,
                const Field& f) {
  if (config.value("dump_field", false)) dump_field(dir / name, f);
}

// ---- commands -------------------------------------------------------------

int cmd_constants(const json& config, const fs::path& dir) {
  const auto& pj = config.at("params");
  int n = config.at("grid").at("n").get<int>();
  double m = pj.at("m").get<double>();
  ProblemParams check;
  check.n = n;
  check.m = m;
  check.s = pj.value("s", 0.0);
  validate(check);
  PinnedConstants c;
  c.n = n;
  c.m = m;
  c.sobolev = pin_sobolev_constant(n, m, ladder_from_json(config.at("ladder"), n));
  if (config.contains("hardy_ladder"))
    c.hardy = pin_hardy_constant(n, m, ladder_from_json(config.at("hardy_ladder"), n),
                                 config.value("hardy_radius", 2.0));
  atomic_write(dir / "constants.json", to_json(c).dump(2) + "\n");
  std::cout << "S_m_hat = " << format_double(c.sobolev.S_m_hat)
            << " (spread " << format_double(c.sobolev.spread) << ")\n";
  if (c.hardy)
    std::cout << "H_m_hat = " << format_double(c.hardy->H_m_hat) << " (spread "
              << format_double(c.hardy->spread) << ")\n";
  return kExitOk;
}

int cmd_lemma31(const json& config, const fs::path& dir) {
  GridSpec g = grid_from_json(config.at("grid"));
  DomainMask mask = mask_from_json(config.at("domain"), g);
  ProblemParams p = params_from_json(config.at("params"), g.n);
  double delta = mask.inradius / 4.0;
  std::vector<double> ladder;
  if (config.contains("bubble")) {
    delta = config.at("bubble").value("delta", delta);
    if (config.at("bubble").contains("eps_ladder"))
      ladder = config.at("bubble").at("eps_ladder").get<std::vector<double>>();
  }
  if (ladder.empty())
    for (int i = 2; i <= 5; ++i) ladder.push_back(delta / (1 << i));
  BubbleReport rep = verify_lemma31(g, mask, p.m, p.s, ladder, delta);
  atomic_write(dir / "lemma31.csv", to_csv(rep));
  atomic_write(dir / "lemma31.json", to_json(rep).dump(2) + "\n");
  auto verdict = [](const std::string& name, double got, double want) {
    bool ok = std::abs(got - want) <= 0.15;
    std::cout << (ok ? "PASS" : "FAIL") << " slope " << name << ": fitted "
              << format_double(got) << " predicted " << format_double(want) << "\n";
  };
  verdict("A_m", rep.slope_A_m, rep.pred_A_m);
  verdict("B", rep.slope_B, rep.pred_B);
  if (rep.log_law_regime)
    std::cout << (rep.log_law_flag ? "PASS" : "FAIL")
              << " log-law flag (s = 2m - n/2 regime)\n";
  else
    verdict("A_s_tilde", rep.slope_A_s_tilde, rep.pred_A_s_tilde);
  return kExitOk;
}

int cmd_eigen(const json& config, const fs::path& dir) {
  GridSpec g = grid_from_json(config.at("grid"));
  DomainMask mask = mask_from_json(config.at("domain"), g);
  ProblemParams p = params_from_json(config.at("params"), g.n);
  validate(p, mask);
  EigenResult er = poincare_lambda1(g, mask, p.m, p.s, p.variant, eigen_tol(config));
  atomic_write(dir / "eigen.json", to_json(er).dump(2) + "\n");
  maybe_dump(config, dir, "eigenfield.bin", er.eigenfield);
  std::cout << "lambda1 = " << format_double(er.lambda1) << " (residual "
            << format_double(er.residual) << ", " << er.iterations << " iterations)\n";
  return er.converged ? kExitOk : kExitPartialFailure;
}

int cmd_groundstate(const json& config, const fs::path& dir) {
  GridSpec g = grid_from_json(config.at("grid"));
  DomainMask mask = mask_from_json(config.at("domain"), g);
  ProblemParams p = params_from_json(config.at("params"), g.n);
  validate(p, mask);
  PinnedConstants c = resolve_constants(config, g.n, p.m);
  MinimizationResult r = groundstate(g, mask, p, &c, minopts_from_json(config));
  atomic_write(dir / "groundstate.json", to_json(r).dump(2) + "\n");
  maybe_dump(config, dir, "groundstate.bin", r.field);
  std::cout << "S = " << format_double(r.S_value)
            << (r.concentrated ? " (concentrated)" : "") << "\n";
  return kExitOk;
}

int cmd_scurve(const json& config, const fs::path& dir) {
  GridSpec g = grid_from_json(config.at("grid"));
  DomainMask mask = mask_from_json(config.at("domain"), g);
  ProblemParams p = params_from_json(config.at("params"), g.n);
  validate(p, mask);
  PinnedConstants c = resolve_constants(config, g.n, p.m);
  auto lambdas = lambda_list(config, g, mask, p, eigen_tol(config));
  auto curve = s_curve(g, mask, p, lambdas, &c, minopts_from_json(config));
  std::ostringstream os;
  os << "# fraclap-csv v1 scurve lambda,S_value,converged,concentrated,r_eff,iterations\n";
  os << "lambda,S_value,converged,concentrated,r_eff,iterations\n";
  for (auto& [lam, r] : curve)
    os << format_double(lam) << ',' << format_double(r.S_value) << ','
       << (r.converged ? 1 : 0) << ',' << (r.concentrated ? 1 : 0) << ','
       << format_double(r.r_eff) << ',' << r.iterations << '\n';
  atomic_write(dir / "scurve.csv", os.str());
  bool all_ok = std::all_of(curve.begin(), curve.end(),
                            [](auto& e) { return e.second.converged; });
  return all_ok ? kExitOk : kExitPartialFailure;
}

int cmd_lambdastar(const json& config, const fs::path& dir) {
  GridSpec g = grid_from_json(config.at("grid"));
  DomainMask mask = mask_from_json(config.at("domain"), g);
  ProblemParams p = params_from_json(config.at("params"), g.n);
  validate(p, mask);
  PinnedConstants c = resolve_constants(config, g.n, p.m);
  double tol_lambda = 0.01, margin = 0.02;
  if (config.contains("tolerances")) {
    tol_lambda = config.at("tolerances").value("lambda", tol_lambda);
    margin = config.at("tolerances").value("margin", margin);
  }
  ThresholdResult r =
      lambda_star(g, mask, p, c, tol_lambda, margin, minopts_from_json(config));
  atomic_write(dir / "lambdastar.json", to_json(r).dump(2) + "\n");
  std::cout << "lambda_star = " << format_double(r.lambda_star) << " (Lambda_1 = "
            << format_double(r.lambda1) << ")\n";
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepCell {
  std::string key;
  double m = 0.0, s = 0.0, lambda = 0.0;
  bool has_lambda = false;
};

json run_cell(const json& config, const std::string& task, const SweepCell& cell) {
  GridSpec g = grid_from_json(config.at("grid"));
  DomainMask mask = mask_from_json(config.at("domain"), g);
  ProblemParams p;
  p.n = g.n;
  p.m = cell.m;
  p.s = cell.s;
  p.lambda = cell.has_lambda ? cell.lambda : 0.0;
  p.variant = variant_from_string(
      config.contains("params")
          ? config.at("params").value("variant", std::string("spectral"))
          : std::string("spectral"));
  validate(p, mask);

  json payload{{"m", cell.m}, {"s", cell.s}};
  if (cell.has_lambda) payload["lambda"] = cell.lambda;
  if (task == "eigen") {
    EigenResult er = poincare_lambda1(g, mask, p.m, p.s, p.variant, eigen_tol(config));
    payload["lambda1"] = er.lambda1;
    payload["residual"] = er.residual;
    payload["iterations"] = er.iterations;
    payload["converged"] = er.converged;
  } else if (task == "groundstate") {
    PinnedConstants c = resolve_constants(config, g.n, p.m);
    MinimizationResult r = groundstate(g, mask, p, &c, minopts_from_json(config));
    payload["S_value"] = r.S_value;
    payload["converged"] = r.converged;
    payload["concentrated"] = r.concentrated;
    payload["r_eff"] = r.r_eff;
    payload["iterations"] = r.iterations;
  } else if (task == "lambdastar") {
    PinnedConstants c = resolve_constants(config, g.n, p.m);
    double tol_lambda = 0.01, margin = 0.02;
    if (config.contains("tolerances")) {
      tol_lambda = config.at("tolerances").value("lambda", tol_lambda);
      margin = config.at("tolerances").value("margin", margin);
    }
    ThresholdResult r =
        lambda_star(g, mask, p, c, tol_lambda, margin, minopts_from_json(config));
    payload["lambda1"] = r.lambda1;
    payload["lambda_star"] = r.lambda_star;
    payload["bracket_lo"] = r.bracket.first;
    payload["bracket_hi"] = r.bracket.second;
    json curve = json::array();
    for (auto& [lam, S] : r.S_curve)
      curve.push_back({{"lambda", lam}, {"S_value", S}});
    payload["S_curve"] = curve;
  } else if (task == "lemma31") {
    double delta = mask.inradius / 4.0;
    if (config.contains("bubble")) delta = config.at("bubble").value("delta", delta);
    std::vector<double> ladder;
    for (int i = 2; i <= 5; ++i) ladder.push_back(delta / (1 << i));
    BubbleReport rep = verify_lemma31(g, mask, p.m, p.s, ladder, delta);
    payload["slope_A_m"] = rep.slope_A_m;
    payload["slope_A_s_tilde"] = rep.slope_A_s_tilde;
    payload["slope_B"] = rep.slope_B;
    payload["log_law_flag"] = rep.log_law_flag;
  } else {
    throw std::invalid_argument("unknown sweep task '" + task + "'");
  }
  return payload;
}

}  // namespace

std::vector<SweepOutcome> run_sweep(
    const json& config, int workers,
    const std::optional<fs::path>& resume_checkpoint,
    const fs::path& checkpoint_out) {
  const auto& sw = config.at("sweep");
  std::string task = sw.at("task").get<std::string>();
  auto ms = sw.at("m").get<std::vector<double>>();
  auto ss = sw.at("s").get<std::vector<double>>();
  std::vector<double> ls;
  bool has_lambda = sw.contains("lambda");
  if (has_lambda) ls = sw.at("lambda").get<std::vector<double>>();
  if (ms.empty() || ss.empty() || (has_lambda && ls.empty()))
    throw std::invalid_argument("sweep: empty parameter range");

  std::vector<SweepCell> cells;
  for (double m : ms)
    for (double s : ss) {
      if (!has_lambda) {
        std::string key = "m=" + format_double(m) + ";s=" + format_double(s);
        cells.push_back({key, m, s, 0.0, false});
        continue;
      }
      for (double l : ls) {
        std::string key = "m=" + format_double(m) + ";s=" + format_double(s) +
                          ";lambda=" + format_double(l);
        cells.push_back({key, m, s, l, true});
      }
    }

  // Resume: done cells are taken from the checkpoint, never recomputed.
  std::map<std::string, SweepOutcome> done;
  if (resume_checkpoint) {
    std::ifstream in(*resume_checkpoint);
    if (!in)
      throw std::invalid_argument("cannot read checkpoint " +
                                  resume_checkpoint->string());
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      json rec = json::parse(line);
      SweepOutcome o{rec.at("key").get<std::string>(),
                     rec.at("status").get<std::string>(),
                     rec.value("payload", json::object())};
      if (o.status == "done") done[o.key] = std::move(o);
    }
  }

  if (!checkpoint_out.parent_path().empty())
    fs::create_directories(checkpoint_out.parent_path());
  bool same_file = resume_checkpoint && fs::exists(checkpoint_out) &&
                   fs::exists(*resume_checkpoint) &&
                   fs::equivalent(*resume_checkpoint, checkpoint_out);
  std::ofstream ckpt;
  if (same_file) {
    ckpt.open(checkpoint_out, std::ios::app);
  } else {
    ckpt.open(checkpoint_out, std::ios::trunc);
    for (auto& [k, o] : done)
      ckpt << json{{"key", o.key}, {"status", o.status}, {"payload", o.payload}}
                  .dump()
           << "\n";
    ckpt.flush();
  }
  if (!ckpt) throw std::runtime_error("cannot open checkpoint " + checkpoint_out.string());
  std::mutex ckpt_mu;

  std::vector<SweepOutcome> results(cells.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t i = next.fetch_add(1);
      if (i >= cells.size()) return;
      const SweepCell& cell = cells[i];
      if (auto it = done.find(cell.key); it != done.end()) {
        results[i] = it->second;
        continue;
      }
      SweepOutcome o;
      o.key = cell.key;
      try {
        o.payload = run_cell(config, task, cell);
        o.status = "done";
      } catch (const std::exception& e) {
        o.status = "failed";
        o.payload = json{{"error", e.what()}};
      }
      {
        std::lock_guard<std::mutex> lock(ckpt_mu);
        ckpt << json{{"key", o.key}, {"status", o.status}, {"payload", o.payload}}
                    .dump()
             << "\n";
        ckpt.flush();
      }
      results[i] = std::move(o);
    }
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < workers; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  std::sort(results.begin(), results.end(),
            [](const SweepOutcome& a, const SweepOutcome& b) { return a.key < b.key; });
  return results;
}

std::string sweep_csv(const std::string& task,
                      const std::vector<SweepOutcome>& outcomes) {
  std::vector<std::string> cols;
  if (task == "eigen")
    cols = {"lambda1", "residual", "iterations", "converged"};
  else if (task == "groundstate")
    cols = {"lambda", "S_value", "converged", "concentrated", "r_eff", "iterations"};
  else if (task == "lambdastar")
    cols = {"lambda1", "lambda_star", "bracket_lo", "bracket_hi"};
  else if (task == "lemma31")
    cols = {"slope_A_m", "slope_A_s_tilde", "slope_B", "log_law_flag"};
  else
    throw std::invalid_argument("unknown sweep task '" + task + "'");

  std::ostringstream os;
  os << "# fraclap-csv v1 sweep-" << task << " key,status,m,s";
  for (auto& c : cols) os << ',' << c;
  os << "\nkey,status,m,s";
  for (auto& c : cols) os << ',' << c;
  os << '\n';
  auto cellstr = [](const json& payload, const std::string& col) -> std::string {
    if (!payload.contains(col)) return "";
    const auto& v = payload.at(col);
    if (v.is_boolean()) return v.get<bool>() ? "1" : "0";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number_float()) return format_double(v.get<double>());
    return v.dump();
  };
  for (auto& o : outcomes) {
    os << o.key << ',' << o.status << ',' << cellstr(o.payload, "m") << ','
       << cellstr(o.payload, "s");
    for (auto& c : cols) os << ',' << cellstr(o.payload, c);
    os << '\n';
  }
  return os.str();
}

int run_command(const RunOptions& opts) {
  try {
    json config = load_json_file(opts.config_path);
    if (config.contains("command") &&
        config.at("command").get<std::string>() != opts.command)
      throw std::invalid_argument("config 'command' field does not match CLI command");
    fs::path dir = resolve_output_dir(config);
    fs::create_directories(dir);

    if (opts.command == "constants") return cmd_constants(config, dir);
    if (opts.command == "lemma31") return cmd_lemma31(config, dir);
    if (opts.command == "eigen") return cmd_eigen(config, dir);
    if (opts.command == "groundstate") return cmd_groundstate(config, dir);
    if (opts.command == "scurve") return cmd_scurve(config, dir);
    if (opts.command == "lambdastar") return cmd_lambdastar(config, dir);
    if (opts.command == "sweep") {
      fs::path ckpt = opts.resume ? *opts.resume : dir / "sweep.checkpoint.jsonl";
      auto outcomes = run_sweep(config, opts.workers, opts.resume, ckpt);
      std::string task = config.at("sweep").at("task").get<std::string>();
      atomic_write(dir / "sweep.csv", sweep_csv(task, outcomes));
      bool any_failed = std::any_of(outcomes.begin(), outcomes.end(),
                                    [](auto& o) { return o.status == "failed"; });
      return any_failed ? kExitPartialFailure : kExitOk;
    }
    throw std::invalid_argument("unknown command '" + opts.command + "'");
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitPartialFailure;
  }
}

}  // namespace fraclap
