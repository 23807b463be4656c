#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "nudgevisc/diagnostics/bounds.hpp"
#include "nudgevisc/diagnostics/force_stats.hpp"
#include "nudgevisc/diagnostics/record.hpp"
#include "nudgevisc/errors.hpp"
#include "nudgevisc/estimator/estimator.hpp"
#include "nudgevisc/format.hpp"

namespace nudgevisc {

using json = nlohmann::ordered_json;

inline constexpr const char* kTimeseriesVersion = "nudgevisc-timeseries v1";
inline constexpr const char* kPlotDataVersion = "nudgevisc-plot v1";
inline constexpr int kJsonSchemaVersion = 1;

/// Column names of the timeseries CSV, in output order.
inline std::vector<std::string> timeseries_columns() {
  std::vector<std::string> c = {"t",           "segment",     "nu_tilde",     "E",
                                "E_N",         "Z",           "Z_N",          "P",
                                "P_N",         "Edot_N",      "Edot_N_fd",    "Zdot_N",
                                "Zdot_N_fd",   "J1",          "J2",           "D",
                                "trilinear_B", "trilinear_DB", "denominator", "nondegen_margin"};
  for (const char* f : {"u", "u_tilde", "w"})
    for (int s = 0; s < 4; ++s) c.push_back(std::string("norm_") + f + "_h" + std::to_string(s));
  for (const char* id : condition_ids()) c.push_back(std::string("margin_") + id);
  return c;
}

namespace detail {

inline std::ofstream open_out(const std::string& path) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw io_error(path, "cannot open for writing");
  return os;
}

inline void close_out(std::ofstream& os, const std::string& path) {
  os.flush();
  if (!os) throw io_error(path, "write failed");
}

/// JSON value of a double: null for NaN, strings for infinities.
inline json jnum(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

}  // namespace detail

inline void write_timeseries(std::ostream& os, std::span<const DiagnosticsRecord> recs) {
  os << "# " << kTimeseriesVersion << '\n';
  const auto cols = timeseries_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) os << (i ? "," : "") << cols[i];
  os << '\n';
  for (const auto& r : recs) {
    auto f = [&](double x) { os << ',' << format_double(x); };
    os << format_double(r.t) << ',' << r.segment;
    for (double x : {r.nu_tilde, r.E, r.E_N, r.Z, r.Z_N, r.P, r.P_N, r.Edot_N, r.Edot_N_fd,
                     r.Zdot_N, r.Zdot_N_fd, r.J1, r.J2, r.D, r.trilinear_B, r.trilinear_DB,
                     r.denominator, r.nondegen_margin})
      f(x);
    for (const auto& a : r.norms)
      for (double x : a) f(x);
    for (double x : r.condition_margins) f(x);
    os << '\n';
  }
}

inline void write_timeseries(std::span<const DiagnosticsRecord> recs, const std::string& path) {
  auto os = detail::open_out(path);
  write_timeseries(os, recs);
  detail::close_out(os, path);
}

inline json force_stats_json(const ForceStats& s) {
  json j;
  j["g_norm"] = detail::jnum(s.g_norm);
  j["G"] = detail::jnum(s.G);
  j["G_tilde"] = detail::jnum(s.G_tilde);
  json sig = json::object();
  for (const auto& [l, v] : s.sigma) sig[std::to_string(l)] = detail::jnum(v);
  j["sigma"] = sig;
  json R = json::object();
  for (const auto& [k, v] : s.R) R[std::to_string(k)] = detail::jnum(v);
  j["R"] = R;
  j["K0"] = detail::jnum(s.K0);
  j["K1"] = detail::jnum(s.K1);
  j["K2"] = detail::jnum(s.K2);
  return j;
}

inline json condition_report_json(const ConditionReport& r) {
  json j;
  json checks = json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"id", c.id},
                      {"relation", c.relation},
                      {"lhs", detail::jnum(c.lhs)},
                      {"rhs", detail::jnum(c.rhs)},
                      {"margin", detail::jnum(c.margin)},
                      {"satisfied", c.satisfied}});
  }
  j["checks"] = checks;
  json consts = json::object();
  for (const auto& [k, v] : r.constants) consts[k] = detail::jnum(v);
  j["constants"] = consts;
  j["advisory"] = true;
  return j;
}

inline json bound_report_json(const BoundReport& r) {
  json arr = json::array();
  for (const auto& b : r.bounds) {
    arr.push_back({{"id", b.id},
                   {"samples", b.samples},
                   {"violations", b.violations},
                   {"worst_margin", detail::jnum(b.worst_margin)},
                   {"worst_t", detail::jnum(b.worst_t)}});
  }
  return json{{"total_violations", r.total_violations()}, {"bounds", arr}};
}

inline json trace_json(const EstimationTrace& tr) {
  json j;
  j["schema_version"] = kJsonSchemaVersion;
  j["nu0"] = detail::jnum(tr.nu0);
  j["nu_true"] = tr.nu_true ? detail::jnum(*tr.nu_true) : json(nullptr);
  j["final_nu"] = detail::jnum(tr.final_nu);
  j["accepted"] = tr.accepted;
  json beta = json::array();
  for (double b : tr.beta) beta.push_back(detail::jnum(b));
  j["beta"] = beta;
  json ups = json::array();
  for (const auto& u : tr.updates) {
    const auto& d = u.decomposition;
    ups.push_back({{"m", u.m},
                   {"t", detail::jnum(u.t)},
                   {"nu_before", detail::jnum(u.nu_before)},
                   {"nu_after", detail::jnum(u.nu_after)},
                   {"accepted", u.accepted},
                   {"skip_reason", u.skip_reason.empty() ? json(nullptr) : json(u.skip_reason)},
                   {"denominator", detail::jnum(u.denominator)},
                   {"E_N", detail::jnum(u.E_N)},
                   {"threshold", detail::jnum(u.threshold)},
                   {"beta", detail::jnum(u.beta)},
                   {"nondegenerate_true_nu", u.nondegenerate_true_nu},
                   {"Edot_N", detail::jnum(u.Edot_N)},
                   {"Edot_N_fd", detail::jnum(u.Edot_N_fd)},
                   {"balance_residual", detail::jnum(u.balance_residual)},
                   {"delta_nu_reconstructed", detail::jnum(u.delta_nu_reconstructed)},
                   {"delta_nu_reconstructed_fd", detail::jnum(u.delta_nu_reconstructed_fd)},
                   {"decomposition",
                    {{"edot", detail::jnum(d.edot)},
                     {"viscous", detail::jnum(d.viscous)},
                     {"trilinear_B", detail::jnum(d.trilinear_B)},
                     {"trilinear_DB", detail::jnum(d.trilinear_DB)},
                     {"sum", detail::jnum(d.sum)},
                     {"denominator", detail::jnum(d.denominator)},
                     {"budget", detail::jnum(d.budget)},
                     {"degenerate", d.degenerate}}}});
  }
  j["updates"] = ups;
  return j;
}

inline void write_json(const json& j, const std::string& path) {
  auto os = detail::open_out(path);
  os << j.dump(2) << '\n';
  detail::close_out(os, path);
}

/// Long-format plot table x,quantity,value:
///   log10_nu_error  x = m    log10 |nu_m - nu| per accepted update (twin)
///   nu_estimate     x = t_m  accepted estimate
///   log10_w_l2      x = t    log10 |w|
///   log10_Aw_sq     x = t    log10 |Aw|^2
/// Values are copied from the records and trace as they are.
inline void emit_plot_data(const EstimationTrace* trace, std::span<const DiagnosticsRecord> recs,
                           std::ostream& os) {
  os << "# " << kPlotDataVersion << '\n';
  os << "x,quantity,value\n";
  auto row = [&](double x, const char* q, double v) {
    os << format_double(x) << ',' << q << ',' << format_double(v) << '\n';
  };
  if (trace) {
    for (const auto& u : trace->updates) {
      if (!u.accepted) continue;
      if (trace->nu_true) row(u.m, "log10_nu_error", std::log10(std::abs(u.nu_after - *trace->nu_true)));
    }
    for (const auto& u : trace->updates)
      if (u.accepted) row(u.t, "nu_estimate", u.nu_after);
  }
  for (const auto& r : recs) row(r.t, "log10_w_l2", std::log10(r.norms[2][0]));
  for (const auto& r : recs) row(r.t, "log10_Aw_sq", std::log10(r.norms[2][2] * r.norms[2][2]));
}

inline void emit_plot_data(const EstimationTrace* trace, std::span<const DiagnosticsRecord> recs,
                           const std::string& path) {
  auto os = detail::open_out(path);
  emit_plot_data(trace, recs, os);
  detail::close_out(os, path);
}

}  // namespace nudgevisc
