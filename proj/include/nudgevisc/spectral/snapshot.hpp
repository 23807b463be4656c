#pragma once

#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/format.hpp"
#include "nudgevisc/spectral/field.hpp"

namespace nudgevisc {

// Field snapshot, text format (docs/formats.md):
//
//   field <n> <count>
//   <k1> <k2> <re u1> <im u1> <re u2> <im u2>     (count lines)
//
// Lines list every lattice point whose four numbers are not all +0.0, in
// storage order.  Numbers use the shortest round-trip decimal form, so a
// write/read cycle reproduces every coefficient bit for bit (signed zeros
// included).

namespace detail {
inline bool positive_zero(double x) noexcept { return x == 0.0 && !std::signbit(x); }
}  // namespace detail

inline void write_field(std::ostream& os, const SpectralField& v) {
  const GridSpec& g = v.grid();
  auto a = v.component(0), b = v.component(1);
  std::size_t count = 0;
  auto keep = [&](std::size_t i) {
    return !(detail::positive_zero(a[i].real()) && detail::positive_zero(a[i].imag()) &&
             detail::positive_zero(b[i].real()) && detail::positive_zero(b[i].imag()));
  };
  for (std::size_t i = 0; i < g.size(); ++i) count += keep(i) ? 1 : 0;
  os << "field " << g.n << ' ' << count << '\n';
  for_each_mode(g, [&](int k1, int k2, std::size_t i) {
    if (!keep(i)) return;
    os << k1 << ' ' << k2 << ' ' << format_double(a[i].real()) << ' '
       << format_double(a[i].imag()) << ' ' << format_double(b[i].real()) << ' '
       << format_double(b[i].imag()) << '\n';
  });
}

/// Reads one field block.  Throws nudgevisc::error on malformed input.
inline SpectralField read_field(std::istream& is) {
  std::string tag;
  int n = 0;
  std::size_t count = 0;
  if (!(is >> tag >> n >> count) || tag != "field") {
    throw error("snapshot: expected 'field <n> <count>' header");
  }
  SpectralField v(grid_create(n));
  const GridSpec& g = v.grid();
  for (std::size_t line = 0; line < count; ++line) {
    int k1 = 0, k2 = 0;
    std::string s[4];
    if (!(is >> k1 >> k2 >> s[0] >> s[1] >> s[2] >> s[3])) {
      throw error("snapshot: truncated mode list at entry " + std::to_string(line));
    }
    if (!g.on_lattice(k1, k2)) {
      throw error("snapshot: wavenumber (" + std::to_string(k1) + "," + std::to_string(k2) +
                  ") is off the lattice");
    }
    double x[4];
    for (int j = 0; j < 4; ++j) {
      auto p = parse_double(s[j]);
      if (!p) throw error("snapshot: bad number '" + s[j] + "'");
      x[j] = *p;
    }
    v.at(0, k1, k2) = {x[0], x[1]};
    v.at(1, k1, k2) = {x[2], x[3]};
  }
  return v;
}

inline std::string field_to_string(const SpectralField& v) {
  std::ostringstream os;
  write_field(os, v);
  return os.str();
}

}  // namespace nudgevisc
