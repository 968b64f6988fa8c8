#pragma once

#include <openssl/evp.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "huntkit/criteria.hpp"
#include "huntkit/detail/format.hpp"
#include "huntkit/json_io.hpp"

namespace huntkit::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitDivergence = 3;
inline constexpr int kExitUsage = 64;

// Usage mistakes detected after parsing (bad grid strings and the like).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Grid {
  double lo = 0.0;
  double hi = 0.0;
  bool log = true;
  std::size_t count = 0;

  std::vector<double> points() const {
    if (log) return log_grid(lo, hi, count);
    std::vector<double> g(count);
    for (std::size_t i = 0; i < count; ++i)
      g[i] = count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1);
    if (count > 1) g.back() = hi;
    return g;
  }
  Window window() const {
    if (!log) throw UsageError("criterion windows must be log grids");
    return {lo, hi, count};
  }
};

// lo:hi:log|lin:count
inline Grid parse_grid(const std::string& s) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 4) throw UsageError("grid must be lo:hi:log|lin:count, got '" + s + "'");
  Grid g;
  try {
    std::size_t used = 0;
    g.lo = std::stod(parts[0], &used);
    if (used != parts[0].size()) throw UsageError("bad grid lower bound");
    g.hi = std::stod(parts[1], &used);
    if (used != parts[1].size()) throw UsageError("bad grid upper bound");
    const long n = std::stol(parts[3], &used);
    if (used != parts[3].size() || n < 1) throw UsageError("grid count must be a positive integer");
    g.count = static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw UsageError("grid must be lo:hi:log|lin:count, got '" + s + "'");
  }
  if (parts[2] == "log") g.log = true;
  else if (parts[2] == "lin") g.log = false;
  else throw UsageError("grid spacing must be log or lin");
  if (!(g.hi >= g.lo) || (g.log && !(g.lo > 0.0))) throw UsageError("grid needs lo <= hi (and lo > 0 for log)");
  return g;
}

// Comma-separated reals.
inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  for (std::string p; std::getline(ss, p, ',');) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(p, &used));
      if (used != p.size()) throw UsageError("bad number '" + p + "'");
    } catch (const std::logic_error&) {
      throw UsageError("bad number '" + p + "'");
    }
  }
  if (out.empty()) throw UsageError("empty number list");
  return out;
}

inline std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", md[i]);
    hex += buf;
  }
  return hex;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StructuralError("cannot read '" + path + "'");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Collects inputs and outputs of one run and writes manifest.json last.
class Run {
 public:
  Run(std::filesystem::path out_dir, std::vector<std::string> argv, std::uint64_t seed)
      : dir_(std::move(out_dir)), argv_(std::move(argv)), seed_(seed) {}

  Json load_json(const std::string& path) {
    const std::string text = read_file(path);
    inputs_.push_back({{"path", path}, {"sha256", sha256_hex(text)}});
    try {
      return Json::parse(text);
    } catch (const Json::parse_error& e) {
      throw StructuralError("'" + path + "' is not valid JSON: " + e.what());
    }
  }

  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(dir_);
    std::ofstream out(dir_ / name, std::ios::binary);
    if (!out) throw StructuralError("cannot write '" + (dir_ / name).string() + "'");
    out << content;
    outputs_.push_back({{"path", name}, {"sha256", sha256_hex(content)}});
  }

  void finish() {
    Json m = {{"tool", "huntkit"},
              {"version", HUNTKIT_VERSION},
              {"argv", argv_},
              {"seed", seed_},
              {"inputs", inputs_},
              {"outputs", outputs_}};
    std::filesystem::create_directories(dir_);
    std::ofstream(dir_ / "manifest.json", std::ios::binary) << m.dump(2) << '\n';
  }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> argv_;
  std::uint64_t seed_;
  Json inputs_ = Json::array();
  Json outputs_ = Json::array();
};

inline std::string samples_csv(const std::vector<std::pair<double, double>>& rows, const char* header) {
  std::string s = std::string(header) + "\n";
  for (const auto& [a, b] : rows) s += detail::g17(a) + "," + detail::g17(b) + "\n";
  return s;
}

}  // namespace huntkit::cli
