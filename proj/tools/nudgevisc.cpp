// Command-line driver: run, verify, stats and echo on a configuration file.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "nudgevisc/nudgevisc.hpp"

namespace {

enum Exit : int { ok = 0, other = 1, bad_config = 2, blew_up = 3, invariant = 4 };

std::string fmt(double x) { return nudgevisc::format_double(x); }

int report_run(const nudgevisc::RunSummary& s) {
  using nudgevisc::RunMode;
  std::cout << "mode " << nudgevisc::to_string(s.mode) << " status " << s.status << '\n';
  if (s.trace) {
    const auto& tr = *s.trace;
    std::cout << "accepted updates " << tr.accepted << ", final nu_tilde " << fmt(tr.final_nu);
    if (s.nu_rel_error) std::cout << ", relative error " << fmt(*s.nu_rel_error);
    std::cout << '\n';
    for (const auto* u : tr.accepted_updates())
      std::cout << "  m=" << u->m << " t=" << fmt(u->t) << " nu=" << fmt(u->nu_after)
                << " beta=" << fmt(u->beta) << '\n';
  }
  if (s.decay)
    std::cout << "error decay rate " << fmt(s.decay->rate) << " over " << fmt(s.decay->orders)
              << " decades\n";
  int code = Exit::ok;
  if (s.verify) {
    for (const auto& c : s.verify->checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.suite << '.' << c.name << ' ' << fmt(c.value)
                << " <= " << fmt(c.tolerance) << '\n';
    std::cout << s.verify->failures() << " of " << s.verify->checks.size() << " checks failed\n";
    if (!s.verify->passed()) code = Exit::invariant;
  }
  if (s.bounds) {
    for (const auto& b : s.bounds->bounds)
      if (b.violations)
        std::cout << "bound " << b.id << ": " << b.violations << " of " << b.samples
                  << " samples violated (worst margin " << fmt(b.worst_margin) << " at t="
                  << fmt(b.worst_t) << ")\n";
    if (s.bounds->total_violations() > 0) code = Exit::invariant;
  }
  if (s.conditions && !s.conditions->all_satisfied())
    std::cout << "note: sufficient conditions on mu not met (advisory)\n";
  std::cout << "wall time " << fmt(s.wall_seconds) << " s\n";
  std::cout << "artifacts in " << s.output_dir << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Viscosity estimation by nudging for 2D periodic Navier-Stokes"};
  app.require_subcommand(1);
  std::string path;
  auto* run = app.add_subcommand("run", "Run the experiment selected by run.mode");
  run->add_option("config", path, "Configuration file")->required();
  auto* verify = app.add_subcommand("verify", "Run the invariant self-test suites");
  verify->add_option("config", path, "Configuration file")->required();
  auto* stats = app.add_subcommand("stats", "Print force statistics and the condition report");
  stats->add_option("config", path, "Configuration file")->required();
  auto* echo = app.add_subcommand("echo", "Print every configuration key with its effective value");
  echo->add_option("config", path, "Configuration file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? Exit::ok : Exit::bad_config;
  }

  nudgevisc::ExperimentConfig cfg;
  try {
    cfg = nudgevisc::apply_environment(nudgevisc::load_config(path));
  } catch (const nudgevisc::config_error& e) {
    for (const auto& m : e.messages()) std::cerr << path << ": " << m << '\n';
    return Exit::bad_config;
  } catch (const nudgevisc::io_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::bad_config;
  }

  try {
    if (*echo) {
      std::cout << nudgevisc::echo_config(cfg);
      return Exit::ok;
    }
    if (*stats) {
      auto [st, cr] = nudgevisc::config_stats(cfg);
      nudgevisc::json j;
      j["force_stats"] = nudgevisc::force_stats_json(st);
      j["conditions"] = nudgevisc::condition_report_json(cr);
      std::cout << j.dump(2) << '\n';
      return Exit::ok;
    }
    if (*verify) cfg.run.mode = nudgevisc::RunMode::verify;
    return report_run(nudgevisc::run_experiment(cfg));
  } catch (const nudgevisc::blow_up& e) {
    std::cerr << "blow-up: " << e.what() << '\n';
    return Exit::blew_up;
  } catch (const nudgevisc::error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::other;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return Exit::other;
  }
}
