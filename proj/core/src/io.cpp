#include "fraclap/io.hpp"

#include <atomic>
#include <bit>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <unistd.h>

namespace fraclap {

static_assert(std::endian::native == std::endian::little,
              "field dumps assume a little-endian host");

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
  }
  return std::string(buf, ptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& content) {
  static std::atomic<unsigned> counter{0};
  auto parent = path.parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  auto tmp = path;
  tmp += ".tmp-" + std::to_string(::getpid()) + "-" +
         std::to_string(counter.fetch_add(1));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("atomic_write: cannot open " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("atomic_write: short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void dump_field(const std::filesystem::path& path, const Field& u) {
  std::string raw(reinterpret_cast<const char*>(u.values.data()),
                  u.values.size() * sizeof(double));
  atomic_write(path, raw);
  nlohmann::json header{
      {"dtype", "float64"},
      {"byte_order", "little"},
      {"order", "row-major"},
      {"shape", std::vector<int>(u.grid.n, u.grid.N)},
      {"n", u.grid.n},
      {"N", u.grid.N},
      {"L", u.grid.L},
      {"h", u.grid.h()}};
  auto sidecar = path;
  sidecar += ".json";
  atomic_write(sidecar, header.dump(2) + "\n");
}

Field load_field_dump(const std::filesystem::path& path) {
  auto sidecar = path;
  sidecar += ".json";
  std::ifstream hs(sidecar);
  if (!hs) throw std::runtime_error("load_field_dump: missing sidecar " + sidecar.string());
  nlohmann::json header = nlohmann::json::parse(hs);
  GridSpec g = make_grid(header.at("n").get<int>(), header.at("N").get<int>(),
                         header.at("L").get<double>());
  Field u = make_field(g);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_field_dump: cannot open " + path.string());
  in.read(reinterpret_cast<char*>(u.values.data()),
          static_cast<std::streamsize>(u.values.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != u.values.size() * sizeof(double))
    throw std::runtime_error("load_field_dump: truncated dump " + path.string());
  return u;
}

}  // namespace fraclap
