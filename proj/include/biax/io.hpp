#pragma once

// Binary snapshots and the time-series CSV.
//
// Snapshot layout (little-endian): "BXFH", u32 version, u32 nx, u32 ny,
// f64 lx, f64 ly, f64 t, then 11 fields of nx*ny f64 in the order
// n1.x n1.y n1.z n2.x .. n3.z v.x v.y, each row-major (index j*nx + i).

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "biax/diagnostics.hpp"
#include "biax/errors.hpp"
#include "biax/integrator.hpp"

namespace biax {

inline constexpr char kSnapshotMagic[4] = {'B', 'X', 'F', 'H'};
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 40;
inline constexpr int kSnapshotFields = 11;

namespace io_detail {

template <class T>
T to_le(T x) {
  if constexpr (std::endian::native == std::endian::little) {
    return x;
  } else {
    unsigned char b[sizeof(T)];
    std::memcpy(b, &x, sizeof(T));
    for (std::size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(b[i], b[sizeof(T) - 1 - i]);
    std::memcpy(&x, b, sizeof(T));
    return x;
  }
}

template <class T>
void put(std::vector<unsigned char>& buf, T x) {
  x = to_le(x);
  const auto* p = reinterpret_cast<const unsigned char*>(&x);
  buf.insert(buf.end(), p, p + sizeof(T));
}

template <class T>
T get(const unsigned char* p) {
  T x;
  std::memcpy(&x, p, sizeof(T));
  return to_le(x);
}

}  // namespace io_detail

inline std::vector<unsigned char> encode_snapshot(const SimState& s) {
  const Grid2D& g = *s.p.grid;
  std::vector<unsigned char> buf;
  buf.reserve(kSnapshotHeaderBytes + kSnapshotFields * g.size() * 8);
  buf.insert(buf.end(), kSnapshotMagic, kSnapshotMagic + 4);
  io_detail::put<std::uint32_t>(buf, kSnapshotVersion);
  io_detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.nx()));
  io_detail::put<std::uint32_t>(buf, static_cast<std::uint32_t>(g.ny()));
  io_detail::put<double>(buf, g.lx());
  io_detail::put<double>(buf, g.ly());
  io_detail::put<double>(buf, s.t);
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a)
      for (double x : s.p.n[i].c[a]) io_detail::put<double>(buf, x);
  for (int a = 0; a < 2; ++a)
    for (double x : s.v.c[a]) io_detail::put<double>(buf, x);
  return buf;
}

struct SnapshotHeader {
  std::uint32_t version = 0;
  int nx = 0;
  int ny = 0;
  double lx = 0.0;
  double ly = 0.0;
  double t = 0.0;
};

inline SnapshotHeader decode_snapshot_header(const std::vector<unsigned char>& buf) {
  if (buf.size() < kSnapshotHeaderBytes) throw IoError("snapshot truncated: header incomplete");
  if (std::memcmp(buf.data(), kSnapshotMagic, 4) != 0) throw IoError("not a snapshot: bad magic");
  SnapshotHeader h;
  h.version = io_detail::get<std::uint32_t>(buf.data() + 4);
  if (h.version != kSnapshotVersion) throw IoError("unsupported snapshot version " + std::to_string(h.version));
  h.nx = static_cast<int>(io_detail::get<std::uint32_t>(buf.data() + 8));
  h.ny = static_cast<int>(io_detail::get<std::uint32_t>(buf.data() + 12));
  h.lx = io_detail::get<double>(buf.data() + 16);
  h.ly = io_detail::get<double>(buf.data() + 24);
  h.t = io_detail::get<double>(buf.data() + 32);
  return h;
}

/// Rebuilds the state on a fresh grid (default dealias fraction unless given).
inline SimState decode_snapshot(const std::vector<unsigned char>& buf, double dealias_fraction = 2.0 / 3.0) {
  const SnapshotHeader h = decode_snapshot_header(buf);
  const std::size_t n = static_cast<std::size_t>(h.nx) * static_cast<std::size_t>(h.ny);
  if (buf.size() != kSnapshotHeaderBytes + kSnapshotFields * n * 8)
    throw IoError("snapshot payload length " + std::to_string(buf.size() - kSnapshotHeaderBytes) + " does not match " +
                  std::to_string(kSnapshotFields * n * 8));
  SimState s;
  const GridPtr g = make_grid(h.nx, h.ny, h.lx, h.ly, dealias_fraction);
  s.t = h.t;
  s.p = FrameField(g);
  s.v = VelocityField(g);
  const unsigned char* p = buf.data() + kSnapshotHeaderBytes;
  for (int i = 0; i < 3; ++i)
    for (int a = 0; a < 3; ++a)
      for (std::size_t k = 0; k < n; ++k, p += 8) s.p.n[i].c[a][k] = io_detail::get<double>(p);
  for (int a = 0; a < 2; ++a)
    for (std::size_t k = 0; k < n; ++k, p += 8) s.v.c[a][k] = io_detail::get<double>(p);
  return s;
}

inline void write_snapshot(const std::string& path, const SimState& s) {
  const auto buf = encode_snapshot(s);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path + "'");
  f.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!f) throw IoError("write failed for '" + path + "'");
}

inline std::vector<unsigned char> read_binary_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "'");
  return std::vector<unsigned char>(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

inline SimState read_snapshot(const std::string& path, double dealias_fraction = 2.0 / 3.0) {
  return decode_snapshot(read_binary_file(path), dealias_fraction);
}

/// Coefficient-free summary of a snapshot.
struct SnapshotSummary {
  SnapshotHeader header;
  double ortho_defect = 0.0;
  double v_max = 0.0;
  double kinetic_energy = 0.0;
  double divergence_max = 0.0;
  double dirichlet_energy = 0.0;  // 1/2 sum_i int |grad n_i|^2
  bool finite = true;
};

inline SnapshotSummary summarize_snapshot(const std::string& path) {
  const auto buf = read_binary_file(path);
  SnapshotSummary out;
  out.header = decode_snapshot_header(buf);
  const SimState s = decode_snapshot(buf);
  out.finite = all_finite(s.p) && all_finite(s.v.c[0]) && all_finite(s.v.c[1]);
  out.ortho_defect = max_orthonormality_defect(s.p);
  out.v_max = std::max(max_abs(s.v.c[0]), max_abs(s.v.c[1]));
  out.kinetic_energy = 0.5 * inner(s.v, s.v);
  out.divergence_max = max_abs(divergence(s.v).values);
  out.dirichlet_energy = elastic_energy_unchecked(s.p, one_constant_coefficients());
  return out;
}

// ---------------------------------------------------------------------------

inline const char* csv_header() {
  return "t,E_total,E_kin,E_elastic,D_total,D_visc,D_rot,D_beta,residual,blowup_integrand,blowup_integral,"
         "ortho_defect,local_energy_max";
}

inline std::string csv_number(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

/// D_beta collects the beta block and the three anisotropic strain terms.
inline std::string csv_row(const DiagnosticsRecord& r) {
  const auto& d = r.dissipation;
  const double cols[] = {r.t,
                         r.energy.total,
                         r.energy.kinetic,
                         r.energy.elastic,
                         d.total,
                         d.viscous,
                         d.rotational_sum(),
                         d.beta_block + d.anisotropic_sum(),
                         r.energy_residual,
                         r.blowup_integrand,
                         r.blowup_integral,
                         r.ortho_defect_max,
                         r.local_energy_max};
  std::string s;
  for (std::size_t i = 0; i < std::size(cols); ++i) {
    if (i) s += ',';
    s += csv_number(cols[i]);
  }
  return s;
}

}  // namespace biax
