#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <sys/wait.h>
#include <unistd.h>

#include "fraclap/io.hpp"
#include "fraclap/runner.hpp"

using namespace fraclap;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("fraclap-test-" + std::to_string(::getpid()) + "-" +
            std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

// Runs the installed CLI binary (path from the FRACLAP_BIN environment
// variable set by CTest) and returns its exit code.
int run_cli(const std::string& args, const fs::path& out_dir,
            const fs::path& log) {
  const char* bin = std::getenv("FRACLAP_BIN");
  REQUIRE(bin != nullptr);
  std::string cmd = "FRACLAP_OUTPUT_DIR='" + out_dir.string() + "' '" +
                    std::string(bin) + "' " + args + " > '" + log.string() +
                    "' 2>&1";
  int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

nlohmann::json sweep_config() {
  return nlohmann::json{
      {"grid", {{"n", 1}, {"N", 256}, {"L", 4.0}}},
      {"domain", {{"shape", "ball"}, {"radius", 2.0}}},
      {"sweep",
       {{"task", "eigen"},
        {"m", {0.35, 0.45}},
        {"s", {0.0, 0.1}}}}};
}

}  // namespace

TEST_CASE("format_double is deterministic and round-trips") {
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(2.0) == "2");
  CHECK(format_double(-0.25) == "-0.25");
  for (double v : {1.0 / 3.0, 1e-17, 3.14159265358979, 5.0e300}) {
    std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
    CHECK(format_double(v) == s);
  }
}

TEST_CASE("atomic_write creates and replaces files completely") {
  TempDir tmp;
  fs::path f = tmp.path / "sub" / "a.txt";
  atomic_write(f, "hello\n");
  CHECK(slurp(f) == "hello\n");
  atomic_write(f, "rewritten\n");
  CHECK(slurp(f) == "rewritten\n");
  // No temp files left behind.
  int entries = 0;
  for (auto& e : fs::directory_iterator(f.parent_path())) {
    (void)e;
    ++entries;
  }
  CHECK(entries == 1);
}

TEST_CASE("field dump round-trips with its sidecar") {
  TempDir tmp;
  GridSpec g = make_grid(2, 16, 1.5);
  Field u = make_field(g);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    u.values[i] = 0.37 * static_cast<double>(i) - 11.0;
  fs::path f = tmp.path / "field.bin";
  dump_field(f, u);
  CHECK(fs::exists(tmp.path / "field.bin.json"));
  Field back = load_field_dump(f);
  CHECK(back.grid == g);
  for (std::size_t i = 0; i < u.values.size(); ++i)
    CHECK(back.values[i] == u.values[i]);

  nlohmann::json header = nlohmann::json::parse(slurp(tmp.path / "field.bin.json"));
  CHECK(header.at("dtype") == "float64");
  CHECK(header.at("byte_order") == "little");
  CHECK(header.at("order") == "row-major");
  CHECK(header.at("shape") == nlohmann::json({16, 16}));

  CHECK_THROWS_AS(load_field_dump(tmp.path / "missing.bin"), std::runtime_error);
}

TEST_CASE("run_sweep: worker-count determinism, checkpointing and resume") {
  TempDir tmp;
  nlohmann::json cfg = sweep_config();
  fs::path ck1 = tmp.path / "c1.jsonl";
  auto r1 = run_sweep(cfg, 1, std::nullopt, ck1);
  REQUIRE(r1.size() == 4);
  for (auto& o : r1) CHECK(o.status == "done");
  // Keys are sorted canonically.
  for (std::size_t i = 1; i < r1.size(); ++i) CHECK(r1[i - 1].key < r1[i].key);
  CHECK(r1[0].key == "m=0.35;s=0");

  fs::path ck4 = tmp.path / "c4.jsonl";
  auto r4 = run_sweep(cfg, 4, std::nullopt, ck4);
  CHECK(sweep_csv("eigen", r1) == sweep_csv("eigen", r4));

  // Truncate the checkpoint to simulate a kill after two cells, then resume.
  std::vector<std::string> lines;
  {
    std::ifstream in(ck1);
    std::string line;
    while (std::getline(in, line))
      if (!line.empty()) lines.push_back(line);
  }
  REQUIRE(lines.size() == 4);
  {
    std::ofstream out(ck1, std::ios::trunc);
    out << lines[0] << "\n" << lines[1] << "\n";
  }
  auto resumed = run_sweep(cfg, 2, ck1, ck1);
  CHECK(sweep_csv("eigen", resumed) == sweep_csv("eigen", r1));
  // The resumed checkpoint holds all four records again.
  int count = 0;
  {
    std::ifstream in(ck1);
    std::string line;
    while (std::getline(in, line)) count += !line.empty();
  }
  CHECK(count == 4);

  nlohmann::json bad = cfg;
  bad["sweep"]["m"] = nlohmann::json::array();
  CHECK_THROWS_AS(run_sweep(bad, 1, std::nullopt, tmp.path / "c5.jsonl"),
                  std::invalid_argument);
}

TEST_CASE("sweep_csv schema") {
  SweepOutcome ok{"m=0.35;s=0", "done",
                  {{"m", 0.35}, {"s", 0.0}, {"lambda1", 1.25},
                   {"residual", 1e-9}, {"iterations", 20}, {"converged", true}}};
  SweepOutcome bad{"m=0.45;s=0.5", "failed", {{"error", "requires s < m"}}};
  std::string csv = sweep_csv("eigen", {ok, bad});
  std::istringstream is(csv);
  std::string l0, l1, l2, l3;
  std::getline(is, l0);
  std::getline(is, l1);
  std::getline(is, l2);
  std::getline(is, l3);
  CHECK(l0 == "# fraclap-csv v1 sweep-eigen key,status,m,s,lambda1,residual,iterations,converged");
  CHECK(l1 == "key,status,m,s,lambda1,residual,iterations,converged");
  CHECK(l2 == "m=0.35;s=0,done,0.35,0,1.25,1e-09,20,1");
  CHECK(l3 == "m=0.45;s=0.5,failed,,,,,,");
  CHECK_THROWS_AS(sweep_csv("unknown", {}), std::invalid_argument);
}

TEST_CASE("CLI: invalid parameters exit 1 naming the invariant") {
  TempDir tmp;
  fs::path cfg = tmp.path / "bad.json";
  atomic_write(cfg, nlohmann::json{
                        {"grid", {{"n", 1}, {"N", 256}, {"L", 4.0}}},
                        {"domain", {{"shape", "ball"}, {"radius", 2.0}}},
                        {"params", {{"m", 0.6}, {"s", 0.0}}}}
                        .dump());
  fs::path log = tmp.path / "log.txt";
  int rc = run_cli("eigen --config '" + cfg.string() + "'", tmp.path / "out", log);
  CHECK(rc == 1);
  CHECK(slurp(log).find("requires m < n/2") != std::string::npos);

  int rc2 = run_cli("eigen --config '" + (tmp.path / "missing.json").string() + "'",
                    tmp.path / "out", log);
  CHECK(rc2 == 1);
}

TEST_CASE("CLI: eigen run writes results under FRACLAP_OUTPUT_DIR") {
  TempDir tmp;
  fs::path cfg = tmp.path / "eigen.json";
  atomic_write(cfg, nlohmann::json{
                        {"grid", {{"n", 1}, {"N", 512}, {"L", 4.0}}},
                        {"domain", {{"shape", "ball"}, {"radius", 1.0}}},
                        {"params", {{"m", 0.45}, {"s", 0.0}}},
                        {"output_dir", (tmp.path / "ignored").string()},
                        {"dump_field", true}}
                        .dump());
  fs::path out = tmp.path / "out";
  fs::path log = tmp.path / "log.txt";
  int rc = run_cli("eigen --config '" + cfg.string() + "'", out, log);
  CHECK(rc == 0);
  CHECK(!fs::exists(tmp.path / "ignored"));  // env var wins over config
  nlohmann::json j = nlohmann::json::parse(slurp(out / "eigen.json"));
  CHECK(j.at("lambda1").get<double>() == doctest::Approx(1.0553488335).epsilon(1e-7));
  CHECK(fs::exists(out / "eigenfield.bin"));
  Field ef = load_field_dump(out / "eigenfield.bin");
  CHECK(ef.grid.N == 512);

  // Command/config mismatch is a config error.
  fs::path cfg2 = tmp.path / "cmd.json";
  nlohmann::json j2 = nlohmann::json::parse(slurp(cfg));
  j2["command"] = "sweep";
  atomic_write(cfg2, j2.dump());
  CHECK(run_cli("eigen --config '" + cfg2.string() + "'", out, log) == 1);
}
