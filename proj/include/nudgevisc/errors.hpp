#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nudgevisc {

/// Base class for every error raised by the library.
class error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class invalid_grid : public error {
 public:
  using error::error;
};

class incompatible_grids : public error {
 public:
  using error::error;
};

class invalid_cutoff : public error {
 public:
  using error::error;
};

/// A documented precondition on an argument did not hold.
class contract_violation : public error {
 public:
  using error::error;
};

class invalid_parameter : public error {
 public:
  using error::error;
};

/// Non-finite coefficients or a runaway H1 norm during time stepping.
class blow_up : public error {
 public:
  blow_up(double t, const std::string& what)
      : error("blow-up at t=" + std::to_string(t) + ": " + what), time_(t) {}
  double time() const noexcept { return time_; }

 private:
  double time_;
};

/// The viscosity update denominator <A u~_N, w_N> vanished or fell below threshold.
class degenerate_denominator : public error {
 public:
  degenerate_denominator(double value, const std::string& what)
      : error(what), value_(value) {}
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// Parse or validation failure. Carries every message, not just the first.
class config_error : public error {
 public:
  explicit config_error(std::vector<std::string> messages)
      : error(join(messages)), messages_(std::move(messages)) {}
  const std::vector<std::string>& messages() const noexcept { return messages_; }

 private:
  static std::string join(const std::vector<std::string>& m) {
    std::string out;
    for (const auto& s : m) {
      if (!out.empty()) out += "\n";
      out += s;
    }
    return out;
  }
  std::vector<std::string> messages_;
};

class io_error : public error {
 public:
  io_error(const std::string& path, const std::string& what)
      : error(path + ": " + what), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

}  // namespace nudgevisc
