#pragma once

#include <bit>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>

#include "seaice/config.hpp"

namespace seaice {

// Snapshot layout: a directory holding one raw little-endian float64 file per field
// (x fastest, then y, then z) and a sidecar "meta.txt" of "key = value" lines.

inline constexpr const char* kSnapshotVersion = "1";

struct SnapshotMeta {
  std::string format_version = kSnapshotVersion;
  int nx = 0, ny = 0, nz_atm = 0, nz_ocn = 0;
  double lx = 0, ly = 0;
  double atm_lo = 0, atm_hi = 0, ocn_lo = 0, ocn_hi = 0;
  double time = 0;
  std::string config_hash;
};

struct SnapshotRead {
  State state;
  SnapshotMeta meta;
  std::vector<std::string> warnings;
};

namespace detail {

inline void write_raw(const std::filesystem::path& p, std::span<const double> v) {
  std::vector<unsigned char> bytes(v.size() * 8);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto u = std::bit_cast<std::uint64_t>(v[i]);
    for (int b = 0; b < 8; ++b) bytes[8 * i + b] = static_cast<unsigned char>(u >> (8 * b));
  }
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw FormatError("cannot write " + p.string());
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw FormatError("short write to " + p.string());
}

inline void read_raw(const std::filesystem::path& p, std::span<double> v) {
  std::ifstream f(p, std::ios::binary | std::ios::ate);
  if (!f) throw FormatError("cannot open " + p.string());
  const auto size = static_cast<std::size_t>(f.tellg());
  if (size != v.size() * 8)
    throw DimensionError(p.filename().string() + ": expected " + std::to_string(v.size() * 8) +
                         " bytes, found " + std::to_string(size));
  f.seekg(0);
  std::vector<unsigned char> bytes(size);
  f.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::uint64_t u = 0;
    for (int b = 0; b < 8; ++b) u |= static_cast<std::uint64_t>(bytes[8 * i + b]) << (8 * b);
    v[i] = std::bit_cast<double>(u);
  }
}

inline std::string write_meta(const SnapshotMeta& m) {
  std::ostringstream os;
  os << "format_version = " << m.format_version << "\n"
     << "nx = " << m.nx << "\nny = " << m.ny << "\nnz_atm = " << m.nz_atm << "\nnz_ocn = " << m.nz_ocn << "\n"
     << "lx = " << format_double(m.lx) << "\nly = " << format_double(m.ly) << "\n"
     << "atm_z = " << format_double(m.atm_lo) << " " << format_double(m.atm_hi) << "\n"
     << "ocn_z = " << format_double(m.ocn_lo) << " " << format_double(m.ocn_hi) << "\n"
     << "time = " << format_double(m.time) << "\n"
     << "config_hash = " << m.config_hash << "\n";
  return os.str();
}

inline SnapshotMeta read_meta(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw FormatError("missing snapshot metadata " + p.string());
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(f, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) continue;
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  auto need = [&](const std::string& k) -> const std::string& {
    const auto it = kv.find(k);
    if (it == kv.end()) throw FormatError("snapshot metadata lacks '" + k + "'");
    return it->second;
  };
  SnapshotMeta m;
  m.format_version = need("format_version");
  if (m.format_version != kSnapshotVersion)
    throw FormatError("unsupported snapshot format version '" + m.format_version + "' (expected " +
                      kSnapshotVersion + ")");
  try {
    m.nx = parse_int<int>(need("nx"));
    m.ny = parse_int<int>(need("ny"));
    m.nz_atm = parse_int<int>(need("nz_atm"));
    m.nz_ocn = parse_int<int>(need("nz_ocn"));
    m.lx = parse_double(need("lx"));
    m.ly = parse_double(need("ly"));
    std::istringstream a(need("atm_z")), o(need("ocn_z"));
    std::string lo, hi;
    a >> lo >> hi;
    m.atm_lo = parse_double(lo);
    m.atm_hi = parse_double(hi);
    o >> lo >> hi;
    m.ocn_lo = parse_double(lo);
    m.ocn_hi = parse_double(hi);
    m.time = parse_double(need("time"));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("snapshot metadata: ") + e.what());
  }
  m.config_hash = need("config_hash");
  return m;
}

}  // namespace detail

/// Writes the state into directory dir (created if needed).
inline void write_snapshot(const State& s, const Model& m, const std::filesystem::path& dir,
                           const std::string& config_hash) {
  std::filesystem::create_directories(dir);
  detail::write_raw(dir / "v_atm_x.bin", s.v_atm.x.values());
  detail::write_raw(dir / "v_atm_y.bin", s.v_atm.y.values());
  detail::write_raw(dir / "v_ocn_x.bin", s.v_ocn.x.values());
  detail::write_raw(dir / "v_ocn_y.bin", s.v_ocn.y.values());
  detail::write_raw(dir / "u_ice_x.bin", s.u_ice.x.values());
  detail::write_raw(dir / "u_ice_y.bin", s.u_ice.y.values());
  detail::write_raw(dir / "h.bin", s.h.values());
  detail::write_raw(dir / "a.bin", s.a.values());
  SnapshotMeta meta;
  meta.nx = m.plane().nx;
  meta.ny = m.plane().ny;
  meta.nz_atm = m.atm.nz;
  meta.nz_ocn = m.ocn.nz;
  meta.lx = m.plane().lx;
  meta.ly = m.plane().ly;
  meta.atm_lo = m.atm.z_lo;
  meta.atm_hi = m.atm.z_hi;
  meta.ocn_lo = m.ocn.z_lo;
  meta.ocn_hi = m.ocn.z_hi;
  meta.time = s.t;
  meta.config_hash = config_hash;
  std::ofstream f(dir / "meta.txt", std::ios::trunc);
  f << detail::write_meta(meta);
  if (!f) throw FormatError("cannot write snapshot metadata in " + dir.string());
}

/// Reads a snapshot written for model m. A differing config hash is reported as a warning.
inline SnapshotRead read_snapshot(const std::filesystem::path& dir, const Model& m,
                                  const std::string& expected_hash = {}) {
  SnapshotRead r;
  r.meta = detail::read_meta(dir / "meta.txt");
  const SnapshotMeta& mt = r.meta;
  if (mt.nx != m.plane().nx || mt.ny != m.plane().ny || mt.nz_atm != m.atm.nz || mt.nz_ocn != m.ocn.nz)
    throw DimensionError("snapshot dimensions " + std::to_string(mt.nx) + "x" + std::to_string(mt.ny) +
                         " (nz " + std::to_string(mt.nz_atm) + ", " + std::to_string(mt.nz_ocn) +
                         ") do not match the configured grid");
  if (!expected_hash.empty() && mt.config_hash != expected_hash)
    r.warnings.push_back("snapshot config hash " + mt.config_hash + " differs from " + expected_hash);
  r.state = State::zeros(m);
  State& s = r.state;
  detail::read_raw(dir / "v_atm_x.bin", s.v_atm.x.values());
  detail::read_raw(dir / "v_atm_y.bin", s.v_atm.y.values());
  detail::read_raw(dir / "v_ocn_x.bin", s.v_ocn.x.values());
  detail::read_raw(dir / "v_ocn_y.bin", s.v_ocn.y.values());
  detail::read_raw(dir / "u_ice_x.bin", s.u_ice.x.values());
  detail::read_raw(dir / "u_ice_y.bin", s.u_ice.y.values());
  detail::read_raw(dir / "h.bin", s.h.values());
  detail::read_raw(dir / "a.bin", s.a.values());
  s.t = mt.time;
  return r;
}

}  // namespace seaice
