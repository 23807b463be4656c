#pragma once

#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "nudgevisc/errors.hpp"
#include "nudgevisc/flow/params.hpp"
#include "nudgevisc/format.hpp"
#include "nudgevisc/spectral/snapshot.hpp"

namespace nudgevisc {

// Checkpoint text format (docs/formats.md):
//
//   nudgevisc-checkpoint 1
//   t <t>
//   nu <nu>  nu_tilde <nu~>  mu <mu>  n_obs <N>  dt <dt>
//   forcing <kind> <amplitude> <k1> <k2> <band_min> <band_max> <phase>
//   constants <count>
//   <name> <value>                  (count lines)
//   <field block of u>
//   <field block of w = u~ - u>

inline void write_checkpoint(std::ostream& os, const SystemParams& p, const PairState& s) {
  auto f = [](double x) { return format_double(x); };
  os << "nudgevisc-checkpoint 1\n";
  os << "t " << f(s.t) << '\n';
  os << "nu " << f(p.nu) << " nu_tilde " << f(p.nu_tilde) << " mu " << f(p.mu) << " n_obs "
     << p.n_obs << " dt " << f(p.dt) << '\n';
  const ForcingSpec& fs = p.forcing;
  os << "forcing " << (fs.kind == ForcingKind::band ? "band" : "single_mode") << ' '
     << f(fs.amplitude) << ' ' << fs.k1 << ' ' << fs.k2 << ' ' << f(fs.band_min) << ' '
     << f(fs.band_max) << ' ' << f(fs.phase) << '\n';
  os << "constants " << p.constants.overrides().size() << '\n';
  for (const auto& [name, value] : p.constants.overrides()) os << name << ' ' << f(value) << '\n';
  write_field(os, s.u);
  write_field(os, s.w);
}

struct Checkpoint {
  SystemParams params;
  PairState state;
};

inline Checkpoint read_checkpoint(std::istream& is) {
  auto fail = [](const std::string& what) { throw error("checkpoint: " + what); };
  auto num = [&](const std::string& s) {
    auto v = parse_double(s);
    if (!v) fail("bad number '" + s + "'");
    return *v;
  };
  std::string tag, a, b, c, d, e, g, h;
  int version = 0;
  if (!(is >> tag >> version) || tag != "nudgevisc-checkpoint" || version != 1)
    fail("missing or unsupported header");
  Checkpoint cp;
  if (!(is >> tag >> a) || tag != "t") fail("expected t");
  cp.state.t = num(a);
  std::string k1, k2, k3, k4, k5;
  if (!(is >> k1 >> a >> k2 >> b >> k3 >> c >> k4 >> d >> k5 >> e) || k1 != "nu" ||
      k2 != "nu_tilde" || k3 != "mu" || k4 != "n_obs" || k5 != "dt")
    fail("malformed parameter line");
  cp.params.nu = num(a);
  cp.params.nu_tilde = num(b);
  cp.params.mu = num(c);
  cp.params.n_obs = static_cast<int>(num(d));
  cp.params.dt = num(e);
  std::string kind;
  int fk1 = 0, fk2 = 0;
  if (!(is >> tag >> kind >> a >> fk1 >> fk2 >> b >> c >> d) || tag != "forcing")
    fail("malformed forcing line");
  if (kind != "band" && kind != "single_mode") fail("unknown forcing kind '" + kind + "'");
  cp.params.forcing.kind = kind == "band" ? ForcingKind::band : ForcingKind::single_mode;
  cp.params.forcing.amplitude = num(a);
  cp.params.forcing.k1 = fk1;
  cp.params.forcing.k2 = fk2;
  cp.params.forcing.band_min = num(b);
  cp.params.forcing.band_max = num(c);
  cp.params.forcing.phase = num(d);
  std::size_t count = 0;
  if (!(is >> tag >> count) || tag != "constants") fail("expected constants");
  for (std::size_t i = 0; i < count; ++i) {
    if (!(is >> g >> h)) fail("truncated constants");
    cp.params.constants.set(g, num(h));
  }
  cp.state.u = read_field(is);
  cp.state.w = read_field(is);
  if (!(cp.state.u.grid() == cp.state.w.grid())) fail("u and w grids differ");
  return cp;
}

inline void save_checkpoint(const std::string& path, const SystemParams& p, const PairState& s) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw io_error(path, "cannot open for writing");
  write_checkpoint(os, p, s);
  if (!os) throw io_error(path, "write failed");
}

inline Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw io_error(path, "cannot open for reading");
  return read_checkpoint(is);
}

}  // namespace nudgevisc
