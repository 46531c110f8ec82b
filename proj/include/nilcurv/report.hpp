#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

namespace nilcurv {

/// FNV-1a 64-bit hash; reports embed it so a verdict can be tied to the exact
/// input bytes (or canonical flag string) that produced it.
std::uint64_t fnv1a64(std::string_view bytes);
std::string hash_hex(std::uint64_t h);

/// One named check. `verdict` is "pass"/"fail" for assertions, "error" when
/// the check could not run, and a descriptive word (for example "ricci_flat"
/// or "not_einstein") for classifications, which never count as failures.
struct CheckRecord {
  std::string name;
  std::string verdict;
  std::optional<double> residual;
  std::optional<double> lambda;
  std::string details;
};

/// Machine- and human-readable result of one command. All numeric fields are
/// rendered with shortest round-trip formatting, so identical inputs give
/// byte-identical reports.
struct Report {
  std::string command;
  std::string input_hash;
  std::vector<CheckRecord> checks;

  CheckRecord& add(std::string name, std::string verdict) {
    checks.push_back(CheckRecord{std::move(name), std::move(verdict), std::nullopt, std::nullopt, ""});
    return checks.back();
  }

  /// Number of checks with verdict "fail" or "error".
  int failed() const;

  std::string to_json() const;
  void write_human(std::ostream& os) const;
};

} // namespace nilcurv
