#include "corrdyn/report_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

#include "corrdyn/image_io.hpp"

namespace corrdyn {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

int parse_int(std::string_view text) {
  text = trim(text);
  int value = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    throw Error(ErrorCode::InvalidArgument, "malformed integer '" + std::string(text) + "'");
  }
  return value;
}

const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::InvalidArgument, "report is missing '" + key + "'");
  return it->second;
}

}  // namespace

std::string format_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::general, 17);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, ptr);
}

std::string format_complex(Complex z) { return format_double(z.real()) + "," + format_double(z.imag()); }

double parse_double(std::string_view text) {
  text = trim(text);
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(ErrorCode::InvalidArgument, "malformed number '" + std::string(text) + "'");
  }
  return value;
}

Complex parse_complex(std::string_view text) {
  const auto comma = text.find(',');
  if (comma == std::string_view::npos) {
    throw Error(ErrorCode::InvalidArgument, "expected re,im but got '" + std::string(text) + "'");
  }
  return {parse_double(text.substr(0, comma)), parse_double(text.substr(comma + 1))};
}

std::string serialize_key_values(const std::map<std::string, std::string>& values) {
  std::string out;
  for (const auto& [key, value] : values) out += key + "=" + value + "\n";
  return out;
}

std::map<std::string, std::string> parse_key_values(std::string_view text) {
  std::map<std::string, std::string> kv;
  while (!text.empty()) {
    const auto eol = text.find('\n');
    std::string_view line = trim(text.substr(0, eol));
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorCode::InvalidArgument, "expected key=value, got '" + std::string(line) + "'");
    }
    kv[std::string(trim(line.substr(0, eq)))] = std::string(trim(line.substr(eq + 1)));
  }
  return kv;
}

std::string serialize_report(const MisiurewiczReport& report) {
  std::string orbit;
  for (std::size_t i = 0; i < report.orbit.size(); ++i) {
    if (i) orbit += ";";
    orbit += format_complex(report.orbit[i]);
  }
  const std::vector<std::pair<std::string, std::string>> lines = {
      {"a", format_complex(report.a)},
      {"p", std::to_string(report.exponent.p())},
      {"q", std::to_string(report.exponent.q())},
      {"preperiod", std::to_string(report.preperiod)},
      {"period", std::to_string(report.period)},
      {"signs", report.signs ? report.signs->str() : std::string()},
      {"multiplier", format_complex(report.multiplier)},
      {"w_prime", format_complex(report.w_prime)},
      {"u_prime", format_complex(report.u_prime)},
      {"g_prime", format_complex(report.g_prime)},
      {"mu", format_complex(report.mu)},
      {"residual", format_double(report.residual)},
      {"orbit", orbit},
  };
  std::string out;
  for (const auto& [key, value] : lines) out += key + "=" + value + "\n";
  return out;
}

MisiurewiczReport parse_report(std::string_view text) {
  const auto kv = parse_key_values(text);
  MisiurewiczReport report;
  report.a = parse_complex(require(kv, "a"));
  report.exponent = Exponent(parse_int(require(kv, "p")), parse_int(require(kv, "q")));
  report.preperiod = parse_int(require(kv, "preperiod"));
  report.period = parse_int(require(kv, "period"));
  if (auto it = kv.find("signs"); it != kv.end() && !it->second.empty()) {
    report.signs = SignSequence::parse(it->second, report.preperiod, report.period);
  }
  report.multiplier = parse_complex(require(kv, "multiplier"));
  report.w_prime = parse_complex(require(kv, "w_prime"));
  report.u_prime = parse_complex(require(kv, "u_prime"));
  report.g_prime = parse_complex(require(kv, "g_prime"));
  report.mu = parse_complex(require(kv, "mu"));
  report.residual = parse_double(require(kv, "residual"));
  std::string_view orbit = require(kv, "orbit");
  while (!orbit.empty()) {
    const auto semi = orbit.find(';');
    report.orbit.push_back(parse_complex(orbit.substr(0, semi)));
    orbit = semi == std::string_view::npos ? std::string_view{} : orbit.substr(semi + 1);
  }
  if (static_cast<int>(report.orbit.size()) != report.preperiod + report.period + 1) {
    throw Error(ErrorCode::InvalidArgument, "orbit length does not match preperiod + period + 1");
  }
  return report;
}

void write_report(const std::filesystem::path& path, const MisiurewiczReport& report) {
  write_file_atomic(path, serialize_report(report));
}

MisiurewiczReport read_report(const std::filesystem::path& path) { return parse_report(read_file(path)); }

std::string serialize_curve_csv(const SimilarityCurve& curve) {
  std::string out = "k,scale_abs,d_hausdorff\n";
  for (std::size_t i = 0; i < curve.distances.size(); ++i) {
    out += std::to_string(curve.scales[i]) + "," + format_double(curve.scale_abs[i]) + "," +
           format_double(curve.distances[i]) + "\n";
  }
  return out;
}

}  // namespace corrdyn
