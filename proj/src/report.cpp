#include "nilcurv/report.hpp"

#include <json.hpp>

#include "nilcurv/scalar.hpp"
#include "nilcurv/version.hpp"

namespace nilcurv {

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[static_cast<std::size_t>(i)] = digits[h & 0xf];
    h >>= 4;
  }
  return s;
}

int Report::failed() const {
  int n = 0;
  for (const auto& c : checks)
    if (c.verdict == "fail" || c.verdict == "error") ++n;
  return n;
}

std::string Report::to_json() const {
  nlohmann::ordered_json out;
  out["tool"] = "nilcurv";
  out["version"] = kVersion;
  out["command"] = command;
  out["input_hash"] = input_hash;
  out["failed"] = failed();
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (const auto& c : checks) {
    nlohmann::ordered_json rec;
    rec["name"] = c.name;
    rec["verdict"] = c.verdict;
    if (c.residual) rec["residual"] = *c.residual;
    if (c.lambda) rec["lambda"] = *c.lambda;
    if (!c.details.empty()) rec["details"] = c.details;
    list.push_back(std::move(rec));
  }
  out["checks"] = std::move(list);
  return out.dump(2) + "\n";
}

void Report::write_human(std::ostream& os) const {
  os << "nilcurv " << kVersion << " " << command << " (input " << input_hash << ")\n";
  for (const auto& c : checks) {
    std::string line = "  " + c.name;
    if (line.size() < 34) line.resize(34, ' ');
    line += " " + c.verdict;
    if (line.size() < 52) line.resize(52, ' ');
    if (c.residual) line += "  residual=" + format_scalar(*c.residual);
    if (c.lambda) line += "  lambda=" + format_scalar(*c.lambda);
    if (!c.details.empty()) line += "  (" + c.details + ")";
    os << line << "\n";
  }
  os << (failed() == 0 ? "ok: " : "FAILED: ") << checks.size() << " checks, " << failed()
     << " failed\n";
}

} // namespace nilcurv
