#include "maglab/catalog.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>

#include "maglab/errors.hpp"

namespace maglab {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::vector<ExprAst> parse_upper(int m, const std::vector<std::string>& entries) {
  std::vector<ExprAst> out;
  out.reserve(entries.size());
  for (const auto& s : entries) out.push_back(parse(s, m));
  return out;
}

std::vector<ExprAst> parse_list(int m, const std::vector<std::string>& entries) {
  return parse_upper(m, entries);
}

}  // namespace

SystemChart make_flat() {
  const int m = 3;
  return SystemChart("FLAT", m, kTwoPi, 0.9,
                     parse_upper(m, {"1", "0", "0", "1", "0", "1"}),
                     parse_list(m, {"1", "0", "0"}),
                     ChartFlags{true, true}, 1.0);
}

SystemChart make_helix() {
  const int m = 3;
  return SystemChart("HELIX", m, kTwoPi, 0.9,
                     parse_upper(m, {"1", "0", "0", "1", "0", "1"}),
                     parse_list(m, {"1", "0", "x2"}),
                     ChartFlags{true, true}, 1.0);
}

SystemChart make_twist() {
  const int m = 3;
  return SystemChart("TWIST", m, kTwoPi, 0.9,
                     parse_upper(m, {"1", "0", "0", "1", "0", "1"}),
                     parse_list(m, {"1", "-x3", "x2"}),
                     ChartFlags{true, true}, 1.0);
}

SystemChart make_wavy() {
  const int m = 3;
  return SystemChart(
      "WAVY", m, kTwoPi, 0.75,
      parse_upper(m, {"1 + x2*cos(t)", "0.5*sin(t)", "0", "1", "0", "1"}),
      parse_list(m, {"1 + 0.5*cos(t)*x2", "0.5*sin(t)", "0"}),
      ChartFlags{true, true}, 1.0);
}

const std::vector<CatalogEntry>& catalog_entries() {
  static const std::vector<CatalogEntry> entries = {
      {"FLAT",
       "Euclidean metric, alpha = dt. The axis circle is a unit-speed closed "
       "geodesic with alpha dual to its velocity; |alpha|_g is constant, so "
       "the system is of strong type as declared."},
      {"HELIX",
       "Euclidean metric, alpha = dt + x2 dx3. Constant transverse magnetic "
       "field dx2^dx3; |alpha|_g^2 = 1 + x2^2 grows off the axis, so the raw "
       "system is semi-strong and becomes strong after rescaling."},
      {"TWIST",
       "Euclidean metric, alpha = dt - x3 dx2 + x2 dx3. Doubled transverse "
       "field 2 dx2^dx3 (gyro-frequency 2); semi-strong until rescaled."},
      {"WAVY",
       "Non-flat metric with g11 = 1 + x2 cos t and g12 = sin(t)/2; alpha is "
       "the first metric column extended to first order off the axis. "
       "Semi-strong; positive definiteness fails at |x2| = 1."},
  };
  return entries;
}

SystemChart catalog_system(const std::string& name) {
  std::string upper = name;
  std::transform(upper.begin(), upper.end(), upper.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (upper == "FLAT") return make_flat();
  if (upper == "HELIX") return make_helix();
  if (upper == "TWIST") return make_twist();
  if (upper == "WAVY") return make_wavy();
  throw ConfigError("system", "unknown catalog system '" + name + "'");
}

}  // namespace maglab
