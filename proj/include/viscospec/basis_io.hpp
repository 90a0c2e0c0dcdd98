#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "viscospec/neumann_basis.hpp"
#include "viscospec/snapshot.hpp"

namespace viscospec {

namespace io_detail {
constexpr char kBasisMagic[8] = {'V', 'S', 'P', 'E', 'C', 'E', 'I', 'G'};
}

/// Per-eigenpair records: lambda then the four component grids, node-major.
inline void save_basis(const std::string& path, const RectGrid& g,
                       const std::vector<EigenPair>& basis) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("basis: cannot open " + path);
  os.write(io_detail::kBasisMagic, sizeof io_detail::kBasisMagic);
  io_detail::put(os, io_detail::kVersion);
  io_detail::put(os, static_cast<std::uint32_t>(g.nx));
  io_detail::put(os, static_cast<std::uint32_t>(g.ny));
  io_detail::put(os, static_cast<std::uint32_t>(basis.size()));
  io_detail::put(os, g.lx);
  io_detail::put(os, g.ly);
  for (const auto& ep : basis) {
    io_detail::put(os, ep.lambda);
    for (const auto& comp : ep.phi)
      os.write(reinterpret_cast<const char*>(comp.data()),
               static_cast<std::streamsize>(sizeof(double) * comp.size()));
  }
  if (!os) throw std::runtime_error("basis: write failed for " + path);
}

inline std::vector<EigenPair> load_basis(const std::string& path, RectGrid& g_out) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("basis: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, io_detail::kBasisMagic, sizeof magic) != 0)
    throw BadMagic("basis: bad magic in " + path);
  auto version = io_detail::get<std::uint32_t>(is);
  if (version != io_detail::kVersion)
    throw VersionUnsupported("basis: version " + std::to_string(version));
  int nx = static_cast<int>(io_detail::get<std::uint32_t>(is));
  int ny = static_cast<int>(io_detail::get<std::uint32_t>(is));
  int count = static_cast<int>(io_detail::get<std::uint32_t>(is));
  double lx = io_detail::get<double>(is);
  double ly = io_detail::get<double>(is);
  g_out = RectGrid(nx, ny, lx, ly);
  std::vector<EigenPair> basis(count);
  for (auto& ep : basis) {
    ep.lambda = io_detail::get<double>(is);
    ep.phi.assign(4, Eigen::VectorXd(g_out.nodes()));
    for (auto& comp : ep.phi) {
      is.read(reinterpret_cast<char*>(comp.data()),
              static_cast<std::streamsize>(sizeof(double) * comp.size()));
      if (!is) throw TruncatedPayload("basis: unexpected end of file");
    }
  }
  return basis;
}

}  // namespace viscospec
