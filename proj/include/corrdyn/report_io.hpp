#pragma once

// Text formats: key=value report records, similarity-curve CSV and the
// "re,im" complex syntax shared by the command line.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "corrdyn/misiurewicz.hpp"
#include "corrdyn/similarity.hpp"

namespace corrdyn {

// Shortest-form-independent rendering with 17 significant digits, "C" locale.
std::string format_double(double value);
std::string format_complex(Complex z);  // "re,im"

// Locale-independent parsing; throws InvalidArgument on malformed input.
double parse_double(std::string_view text);
Complex parse_complex(std::string_view text);

std::string serialize_report(const MisiurewiczReport& report);
MisiurewiczReport parse_report(std::string_view text);

void write_report(const std::filesystem::path& path, const MisiurewiczReport& report);
MisiurewiczReport read_report(const std::filesystem::path& path);

// Header "k,scale_abs,d_hausdorff" and one row per k.
std::string serialize_curve_csv(const SimilarityCurve& curve);

// Ordered key=value lines.
std::string serialize_key_values(const std::map<std::string, std::string>& values);
std::map<std::string, std::string> parse_key_values(std::string_view text);

}  // namespace corrdyn
