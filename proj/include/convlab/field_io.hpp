#pragma once

// Field serialization.
//
// CVLF binary, all little-endian:
//   bytes 0..3   magic "CVLF"
//   u32          format version (1)
//   u32          dimension d
//   u32          points per axis M
//   f64          extent L
//   f64 * M^d    values, row-major
//
// CSV (d = 1 only): header "x,value", one node per line.

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "convlab/errors.hpp"
#include "convlab/field.hpp"

namespace convlab {

inline constexpr std::uint32_t cvlf_version = 1;

namespace detail {

template <class U>
void put_le(std::ostream& out, U value) {
  std::array<char, sizeof(U)> bytes{};
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFF);
  out.write(bytes.data(), bytes.size());
}

template <class U>
U get_le(std::istream& in) {
  std::array<unsigned char, sizeof(U)> bytes{};
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorCode::io_error, "truncated CVLF stream");
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace detail

inline void write_cvlf(std::ostream& out, const Field& f) {
  const Grid& g = f.grid();
  out.write("CVLF", 4);
  detail::put_le<std::uint32_t>(out, cvlf_version);
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.dim()));
  detail::put_le<std::uint32_t>(out, static_cast<std::uint32_t>(g.points()));
  detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(g.extent()));
  for (double v : f.values()) detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(v));
  if (!out) throw Error(ErrorCode::io_error, "failed writing CVLF stream");
}

inline Field read_cvlf(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), 4);
  if (!in || std::string(magic.data(), 4) != "CVLF") throw Error(ErrorCode::io_error, "bad CVLF magic");
  const auto version = detail::get_le<std::uint32_t>(in);
  if (version != cvlf_version) throw Error(ErrorCode::io_error, "unsupported CVLF version " + std::to_string(version));
  const auto dim = detail::get_le<std::uint32_t>(in);
  const auto points = detail::get_le<std::uint32_t>(in);
  const double extent = std::bit_cast<double>(detail::get_le<std::uint64_t>(in));
  const Grid grid(static_cast<int>(dim), extent, points);
  std::vector<double> values(grid.size());
  for (auto& v : values) v = std::bit_cast<double>(detail::get_le<std::uint64_t>(in));
  return Field(grid, std::move(values));
}

inline void write_csv(std::ostream& out, const Field& f) {
  if (f.grid().dim() != 1) throw Error(ErrorCode::invalid_argument, "CSV export is 1-d only");
  out << "x,value\n" << std::setprecision(17);
  for (std::size_t k = 0; k < f.size(); ++k) out << f.grid().coordinate(k) << ',' << f[k] << '\n';
  if (!out) throw Error(ErrorCode::io_error, "failed writing CSV stream");
}

/// Writes through `<path>.tmp` and renames, so `path` never holds a partial file.
template <class Writer>
void write_atomic(const std::filesystem::path& path, Writer&& writer) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::io_error, "cannot open " + tmp.string());
    try {
      writer(out);
    } catch (...) {
      out.close();
      std::filesystem::remove(tmp);
      throw;
    }
    out.flush();
    if (!out) {
      out.close();
      std::filesystem::remove(tmp);
      throw Error(ErrorCode::io_error, "failed writing " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline void save_field(const std::filesystem::path& path, const Field& f) {
  if (path.extension() == ".csv") {
    write_atomic(path, [&](std::ostream& out) { write_csv(out, f); });
  } else {
    write_atomic(path, [&](std::ostream& out) { write_cvlf(out, f); });
  }
}

inline Field load_field(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::io_error, "cannot open " + path.string());
  return read_cvlf(in);
}

}  // namespace convlab
