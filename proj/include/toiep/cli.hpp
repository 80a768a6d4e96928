#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace toiep::cli {

// Config or I/O problem; exit code 1.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum ExitCode { kOk = 0, kConfigError = 1, kNotConverged = 2, kAmbiguous = 3 };

// Flat key = value file with dotted namespaces and '#' comments. Every key
// must be known; values are range-checked when set.
class RunConfig {
 public:
  RunConfig();
  static RunConfig parse(const std::string& text, const std::string& source = "config");
  static RunConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value, const std::string& where = "override");
  // "key=value"
  void set_assignment(const std::string& kv, const std::string& where = "override");

  const std::string& str(const std::string& key) const;
  double num(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::uint64_t u64(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::vector<double> nums(const std::string& key) const;

  // FNV-1a over sorted key=value lines
  std::uint64_t hash() const;
  std::string hash_hex() const;
  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

std::vector<std::string> known_keys();

struct RunOptions {
  std::string out_dir = "out";
  bool long_run = false;
};

int cmd_simulate(const RunConfig& cfg, const RunOptions& opt);
int cmd_reconstruct(const RunConfig& cfg, const RunOptions& opt);
int cmd_calibrate(const RunConfig& cfg, const RunOptions& opt);
int cmd_sweep(const RunConfig& cfg, const RunOptions& opt);
int cmd_spectrum(const RunConfig& cfg, const RunOptions& opt);

int run_command(const std::string& name, const RunConfig& cfg, const RunOptions& opt);

}  // namespace toiep::cli
