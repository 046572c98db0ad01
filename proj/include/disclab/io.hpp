#pragma once

// Persistence: CSV and point-set files, SHA-256 digests, the ray-spectrum
// cache and the run manifest. Numbers are written with 17 significant digits.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include "json.hpp"

#include "disclab/fourier.hpp"
#include "disclab/geometry.hpp"
#include "disclab/pointsets.hpp"

namespace disclab {

inline constexpr const char* kToolVersion = "0.1.0";

using Json = nlohmann::ordered_json;

/// 17 significant digits: parses back to the same double.
inline std::string fmt(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// ---------------------------------------------------------------------------
// Digests.

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("sha256: digest failed");
  }
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_file(path)); }

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// ---------------------------------------------------------------------------
// Point-set CSV: `# generator=...` and `# seed=...` comments, header `x,y`.

inline std::string points_csv(const PointSet& P) {
  std::ostringstream os;
  os << "# generator=" << P.generator() << "\n";
  os << "# seed=" << (P.seed() ? std::to_string(*P.seed()) : "none") << "\n";
  os << "x,y\n";
  for (const Vec2& p : P.points()) os << fmt(p.x) << "," << fmt(p.y) << "\n";
  return os.str();
}

inline PointSet parse_points_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line, generator = "csv";
  std::optional<std::uint64_t> seed;
  std::vector<Vec2> pts;
  bool header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# generator=", 0) == 0) generator = line.substr(12);
      if (line.rfind("# seed=", 0) == 0 && line.substr(7) != "none") seed = std::stoull(line.substr(7));
      continue;
    }
    if (!header) {
      if (line != "x,y") throw std::invalid_argument("points csv: expected header 'x,y'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw std::invalid_argument("points csv line " + std::to_string(lineno) + ": expected x,y");
    }
    try {
      const double x = std::stod(line.substr(0, comma));
      const double y = std::stod(line.substr(comma + 1));
      pts.push_back({x, y});
    } catch (const std::logic_error&) {
      throw std::invalid_argument("points csv line " + std::to_string(lineno) + ": bad number");
    }
  }
  if (!header) throw std::invalid_argument("points csv: missing header");
  return PointSet(std::move(pts), std::nullopt, seed, generator);
}

// ---------------------------------------------------------------------------
// Ray-spectrum cache: columnar (rho, re, im) text with a header carrying the
// digest of everything the samples depend on.

struct SpectrumKey {
  std::string body;  // canonical body spec
  double theta = 0.0;
  double rho_max = 0.0;
  std::size_t oversample = 8;
  std::size_t nodes = kProfileNodes;

  std::string text() const {
    std::ostringstream os;
    os << "body=" << body << ";theta=" << fmt(theta) << ";rho_max=" << fmt(rho_max)
       << ";oversample=" << oversample << ";nodes=" << nodes << ";version=" << kToolVersion;
    return os.str();
  }
  std::string digest() const { return sha256_hex(text()); }
};

inline std::string spectrum_csv(const RaySpectrum& sp, const SpectrumKey& key) {
  std::ostringstream os;
  os << "# disclab-spectrum\n";
  os << "# key=" << key.text() << "\n";
  os << "# digest=" << key.digest() << "\n";
  os << "# method=" << to_string(sp.method) << "\n";
  os << "# delta_rho=" << fmt(sp.delta_rho) << "\n";
  os << "rho,re,im\n";
  for (std::size_t k = 0; k < sp.rho.size(); ++k) {
    os << fmt(sp.rho[k]) << "," << fmt(sp.ft[k].real()) << "," << fmt(sp.ft[k].imag()) << "\n";
  }
  return os.str();
}

/// The cached spectrum, or nullopt when the file is absent, unreadable, or
/// its digest differs from `key`.
inline std::optional<RaySpectrum> load_spectrum(const std::filesystem::path& path, const SpectrumKey& key) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  RaySpectrum sp;
  sp.direction = Direction(key.theta);
  std::string line, digest;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.rfind("# digest=", 0) == 0) digest = line.substr(9);
    if (line.rfind("# delta_rho=", 0) == 0) sp.delta_rho = std::stod(line.substr(12));
    if (line.rfind("# method=", 0) == 0) {
      const std::string m = line.substr(9);
      for (auto c : {SpectrumMethod::closed_form, SpectrumMethod::quadrature, SpectrumMethod::fft_of_profile}) {
        if (to_string(c) == m) sp.method = c;
      }
    }
    if (line == "rho,re,im") {
      header = true;
      break;
    }
  }
  if (!header || digest != key.digest()) return std::nullopt;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(','), c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos) return std::nullopt;
    sp.rho.push_back(std::stod(line.substr(0, c1)));
    sp.ft.emplace_back(std::stod(line.substr(c1 + 1, c2 - c1 - 1)), std::stod(line.substr(c2 + 1)));
  }
  if (sp.rho.empty()) return std::nullopt;
  return sp;
}

struct CachedSpectrum {
  RaySpectrum spectrum;
  bool hit = false;
  std::filesystem::path path;
};

/// Loads χ̂_C(ρΘ) from `dir` when a file with a matching digest exists;
/// otherwise computes it, warns on a stale file, and writes the cache entry.
inline CachedSpectrum cache_spectrum(const ConvexBody& body, Direction dir, double rho_max,
                                     const std::filesystem::path& cache_dir, std::size_t oversample = 8,
                                     std::size_t nodes = kProfileNodes) {
  const SpectrumKey key{to_string(body.spec()), dir.theta(), rho_max, oversample, nodes};
  std::ostringstream name;
  name << "spectrum_" << sha256_hex(to_string(body.spec())).substr(0, 16) << "_" << key.digest().substr(0, 16)
       << ".csv";
  CachedSpectrum out;
  out.path = cache_dir / name.str();
  if (auto sp = load_spectrum(out.path, key)) {
    out.spectrum = std::move(*sp);
    out.hit = true;
    return out;
  }
  if (std::filesystem::exists(out.path)) {
    std::cerr << "warning: spectrum cache " << out.path.string() << " is stale; recomputing\n";
  }
  out.spectrum = ray_spectrum(body, dir, rho_max, oversample, nodes);
  write_file(out.path, spectrum_csv(out.spectrum, key));
  return out;
}

// ---------------------------------------------------------------------------
// Run manifest.

inline std::string utc_timestamp(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class RunManifest {
 public:
  RunManifest(std::string command, Json config)
      : command_(std::move(command)), config_(std::move(config)), start_(std::chrono::system_clock::now()) {}

  void set_seed(std::optional<std::uint64_t> seed) { seed_ = seed; }
  void note(const std::string& key, Json value) { notes_[key] = std::move(value); }

  /// Records a written file with its digest.
  void add_output(const std::filesystem::path& path) { outputs_.push_back(path); }

  Json to_json() const {
    const auto end = std::chrono::system_clock::now();
    Json j;
    j["tool"] = "disclab";
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["config"] = config_;
    j["seed"] = seed_ ? Json(*seed_) : Json(nullptr);
    j["started"] = utc_timestamp(start_);
    j["finished"] = utc_timestamp(end);
    j["elapsed_seconds"] = std::chrono::duration<double>(end - start_).count();
    Json outs = Json::array();
    for (const auto& p : outputs_) {
      outs.push_back({{"path", p.string()},
                      {"bytes", std::filesystem::file_size(p)},
                      {"sha256", sha256_file(p)}});
    }
    j["outputs"] = outs;
    if (!notes_.empty()) j["notes"] = notes_;
    return j;
  }

  void write(const std::filesystem::path& path) const { write_file(path, to_json().dump(2) + "\n"); }

 private:
  std::string command_;
  Json config_;
  std::chrono::system_clock::time_point start_;
  std::optional<std::uint64_t> seed_;
  std::vector<std::filesystem::path> outputs_;
  Json notes_ = Json::object();
};

}  // namespace disclab
