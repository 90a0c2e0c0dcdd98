#pragma once

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "viscospec/dynamics.hpp"

namespace viscospec {

struct BadMagic : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VersionUnsupported : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct TruncatedPayload : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace io_detail {

constexpr char kMagic[8] = {'V', 'S', 'P', 'E', 'C', 'F', 'L', 'D'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte swap not implemented");

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v;
  is.read(reinterpret_cast<char*>(&v), sizeof v);
  if (!is) throw TruncatedPayload("snapshot: unexpected end of file");
  return v;
}

inline void put_spec(std::ostream& os, const std::vector<cdouble>& spec) {
  for (const auto& c : spec) {
    put(os, c.real());
    put(os, c.imag());
  }
}

inline std::vector<cdouble> get_spec(std::istream& is, std::size_t count) {
  std::vector<cdouble> spec(count);
  for (auto& c : spec) {
    double re = get<double>(is);
    double im = get<double>(is);
    c = cdouble(re, im);
  }
  return spec;
}

}  // namespace io_detail

/// Header: magic, version, d, n, length, t, eps. Payload: spectral
/// coefficients as little-endian f64 pairs, components u_1..u_d then
/// F_11..F_dd, modes in row-major flat order.
inline void save_snapshot(const std::string& path, const SimState& s) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("snapshot: cannot open " + path);
  const Grid& g = s.grid();
  os.write(io_detail::kMagic, sizeof io_detail::kMagic);
  io_detail::put(os, io_detail::kVersion);
  io_detail::put(os, static_cast<std::uint32_t>(g.d));
  io_detail::put(os, static_cast<std::uint32_t>(g.n));
  io_detail::put(os, std::uint32_t{0});  // pad to 8-byte alignment
  io_detail::put(os, g.length);
  io_detail::put(os, s.t);
  io_detail::put(os, s.eps);
  for (int i = 0; i < g.d; ++i) io_detail::put_spec(os, s.u[i].spec());
  for (int i = 0; i < g.d; ++i)
    for (int j = 0; j < g.d; ++j) io_detail::put_spec(os, s.F(i, j).spec());
  if (!os) throw std::runtime_error("snapshot: write failed for " + path);
}

inline SimState load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("snapshot: cannot open " + path);
  char magic[8];
  is.read(magic, sizeof magic);
  if (!is || std::memcmp(magic, io_detail::kMagic, sizeof magic) != 0)
    throw BadMagic("snapshot: bad magic in " + path);
  auto version = io_detail::get<std::uint32_t>(is);
  if (version != io_detail::kVersion)
    throw VersionUnsupported("snapshot: version " + std::to_string(version));
  int d = static_cast<int>(io_detail::get<std::uint32_t>(is));
  int n = static_cast<int>(io_detail::get<std::uint32_t>(is));
  io_detail::get<std::uint32_t>(is);  // pad
  double length = io_detail::get<double>(is);
  SimState s;
  s.t = io_detail::get<double>(is);
  s.eps = io_detail::get<double>(is);
  Grid g(d, n, length);

  std::vector<ScalarField> ucomp, fcomp;
  for (int i = 0; i < d; ++i)
    ucomp.push_back(ScalarField::from_spec(g, io_detail::get_spec(is, g.size())));
  for (int i = 0; i < d * d; ++i)
    fcomp.push_back(ScalarField::from_spec(g, io_detail::get_spec(is, g.size())));
  s.u = VectorField(g, std::move(ucomp));
  s.F = TensorField(g, std::move(fcomp));
  return s;
}

// ---------------------------------------------------------------------------
// CSV

/// 17 significant digits (round-trippable), locale independent.
inline std::string fmt_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v,
                           std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns)
      : os_(path, std::ios::trunc), ncols_(columns.size()) {
    if (!os_) throw std::runtime_error("csv: cannot open " + path);
    for (std::size_t i = 0; i < columns.size(); ++i) {
      if (i) os_ << ',';
      os_ << columns[i];
    }
    os_ << '\n';
  }

  void row(const std::vector<double>& values) {
    if (values.size() != ncols_) throw std::logic_error("csv: column count");
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) os_ << ',';
      os_ << fmt_double(values[i]);
    }
    os_ << '\n';
  }

 private:
  std::ofstream os_;
  std::size_t ncols_;
};

}  // namespace viscospec
