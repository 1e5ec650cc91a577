#include "maglab/sysdoc.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>

#include "maglab/catalog.hpp"
#include "maglab/errors.hpp"
#include "maglab/sampling.hpp"

namespace maglab {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void reject_unknown_keys(const json& j, const std::set<std::string>& known,
                         const std::string& where) {
  for (const auto& item : j.items())
    if (!known.count(item.key()))
      throw ConfigError(where + "." + item.key(), "unknown key");
}

double require_number(const json& j, const std::string& key,
                      const std::string& where) {
  if (!j.contains(key)) throw ConfigError(where + "." + key, "missing");
  if (!j[key].is_number()) throw ConfigError(where + "." + key, "expected a number");
  return j[key].get<double>();
}

std::vector<ExprAst> parse_alpha_list(const json& j, int m,
                                      const std::string& where) {
  if (!j.is_array() || j.size() != static_cast<std::size_t>(m))
    throw ConfigError(where, "expected a list of m expression strings");
  std::vector<ExprAst> out;
  out.reserve(static_cast<std::size_t>(m));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_string())
      throw ConfigError(where + "[" + std::to_string(i) + "]",
                        "expected an expression string");
    try {
      out.push_back(parse(j[i].get<std::string>(), m));
    } catch (const Error& e) {
      throw ConfigError(where + "[" + std::to_string(i) + "]", e.what());
    }
  }
  return out;
}

// The metric map carries the upper triangle as "i,j" keys (1-based, i <= j).
// Missing diagonals default to 1, missing off-diagonals to 0.  A mirrored
// "j,i" key is only accepted when its string matches the upper entry.
std::vector<ExprAst> parse_metric_map(const json& j, int m,
                                      const std::string& where) {
  if (!j.is_object()) throw ConfigError(where, "expected an object of \"i,j\" keys");
  std::vector<std::optional<std::string>> upper(
      static_cast<std::size_t>(m * (m + 1) / 2));
  auto upper_index = [m](int i, int j2) {
    return static_cast<std::size_t>(i * m - i * (i - 1) / 2 + (j2 - i));
  };
  for (const auto& item : j.items()) {
    int a = 0, b = 0;
    if (std::sscanf(item.key().c_str(), "%d,%d", &a, &b) != 2 || a < 1 ||
        b < 1 || a > m || b > m)
      throw ConfigError(where + "." + item.key(), "expected a key \"i,j\" with 1 <= i,j <= m");
    if (!item.value().is_string())
      throw ConfigError(where + "." + item.key(), "expected an expression string");
    const std::string s = item.value().get<std::string>();
    const int i = std::min(a, b) - 1;
    const int k = std::max(a, b) - 1;
    auto& slot = upper[upper_index(i, k)];
    if (slot && *slot != s)
      throw ConfigError(where + "." + item.key(),
                        "conflicts with the mirrored entry (G must be symmetric)");
    slot = s;
  }
  std::vector<ExprAst> out;
  out.reserve(upper.size());
  for (int i = 0; i < m; ++i)
    for (int k = i; k < m; ++k) {
      const auto& slot = upper[upper_index(i, k)];
      const std::string s = slot ? *slot : (i == k ? "1" : "0");
      try {
        out.push_back(parse(s, m));
      } catch (const Error& e) {
        throw ConfigError(where + "." + std::to_string(i + 1) + "," +
                              std::to_string(k + 1),
                          e.what());
      }
    }
  return out;
}

ConstructDirective parse_directive(const json& j, int m) {
  reject_unknown_keys(j, {"construct", "bump", "beta", "exterior"}, "construct");
  ConstructDirective d{};
  if (!j.contains("construct") || !j["construct"].is_string())
    throw ConfigError("construct.construct", "missing directive name");
  const std::string kind = j["construct"].get<std::string>();
  if (kind == "alpha_from_metric")
    d.kind = ConstructKind::alpha_from_metric;
  else if (kind == "metric_from_alpha")
    d.kind = ConstructKind::metric_from_alpha;
  else if (kind == "rescale_metric")
    d.kind = ConstructKind::rescale_metric;
  else if (kind == "rescale_alpha")
    d.kind = ConstructKind::rescale_alpha;
  else
    throw ConfigError("construct.construct", "unknown directive '" + kind + "'");
  if (j.contains("bump")) {
    reject_unknown_keys(j["bump"], {"r0", "r1"}, "construct.bump");
    d.bump = BumpProfile{require_number(j["bump"], "r0", "construct.bump"),
                         require_number(j["bump"], "r1", "construct.bump")};
  }
  if (j.contains("beta")) d.beta = require_number(j, "beta", "construct");
  if (j.contains("exterior")) {
    const json& e = j["exterior"];
    reject_unknown_keys(e, {"alpha", "metric"}, "construct.exterior");
    if (e.contains("alpha"))
      d.exterior_alpha = parse_alpha_list(e["alpha"], m, "construct.exterior.alpha");
    if (e.contains("metric"))
      d.exterior_metric = parse_metric_map(e["metric"], m, "construct.exterior.metric");
  }
  return d;
}

void audit_positive_definite(const SystemChart& sys) {
  for (const Vec& p : ball_samples(sys, 512, 0x9d17u)) {
    try {
      metric_at(sys, p);
    } catch (const NotPositiveDefinite&) {
      throw ConfigError("metric",
                        "not positive definite at t=" + fmt17(p[0]) +
                            ", |x|=" + fmt17(transverse_radius(p)) +
                            " inside the declared chart ball");
    }
  }
}

}  // namespace

SystemDocument system_from_json(const json& j) {
  reject_unknown_keys(j,
                      {"schema_version", "name", "m", "T", "R", "metric",
                       "alpha", "flags", "exterior_alpha_bound", "core_speed",
                       "construct"},
                      "system");
  const int m = static_cast<int>(require_number(j, "m", "system"));
  const double T = require_number(j, "T", "system");
  const double R = require_number(j, "R", "system");
  const std::string name =
      j.contains("name") ? j["name"].get<std::string>() : "unnamed";
  if (!j.contains("metric")) throw ConfigError("system.metric", "missing");
  if (!j.contains("alpha")) throw ConfigError("system.alpha", "missing");

  ChartFlags flags;
  if (j.contains("flags")) {
    reject_unknown_keys(j["flags"],
                        {"gamma_nullhomologous", "gamma_contractible"},
                        "system.flags");
    flags.gamma_nullhomologous =
        j["flags"].value("gamma_nullhomologous", false);
    flags.gamma_contractible = j["flags"].value("gamma_contractible", false);
  }
  std::optional<double> bound;
  if (j.contains("exterior_alpha_bound"))
    bound = require_number(j, "exterior_alpha_bound", "system");
  const double core_speed =
      j.contains("core_speed") ? require_number(j, "core_speed", "system") : 1.0;

  SystemChart sys(name, m, T, R, parse_metric_map(j["metric"], m, "system.metric"),
                  parse_alpha_list(j["alpha"], m, "system.alpha"), flags, bound,
                  core_speed);
  audit_positive_definite(sys);

  SystemDocument doc{std::move(sys), std::nullopt};
  if (j.contains("construct")) doc.construct = parse_directive(j["construct"], m);
  return doc;
}

SystemDocument load_system_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("path", "cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("path", "invalid JSON in '" + path + "': " + e.what());
  }
  return system_from_json(j);
}

SystemChart load_system(const std::string& source) {
  constexpr std::string_view prefix = "catalog:";
  if (source.rfind(prefix, 0) == 0)
    return catalog_system(source.substr(prefix.size()));
  return load_system_document(source).system;
}

json system_to_json(const SystemChart& sys) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = sys.name();
  j["m"] = sys.dim();
  j["T"] = sys.period();
  j["R"] = sys.radius();
  json metric = json::object();
  for (int i = 0; i < sys.dim(); ++i)
    for (int k = i; k < sys.dim(); ++k)
      metric[std::to_string(i + 1) + "," + std::to_string(k + 1)] =
          to_string(sys.metric_entry(i, k));
  j["metric"] = std::move(metric);
  json alpha = json::array();
  for (int i = 0; i < sys.dim(); ++i) alpha.push_back(to_string(sys.alpha_entry(i)));
  j["alpha"] = std::move(alpha);
  j["flags"] = {{"gamma_nullhomologous", sys.flags().gamma_nullhomologous},
                {"gamma_contractible", sys.flags().gamma_contractible}};
  if (sys.exterior_alpha_bound())
    j["exterior_alpha_bound"] = *sys.exterior_alpha_bound();
  if (sys.core_speed() != 1.0) j["core_speed"] = sys.core_speed();
  return j;
}

void save_system(const SystemChart& sys, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("path", "cannot write '" + path + "'");
  out << system_to_json(sys).dump(2) << '\n';
}

json report_to_json(const VerificationReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["system"] = rep.system;
  j["classification"] = to_string(rep.classification);
  if (!rep.failing_check.empty()) j["failing_check"] = rep.failing_check;
  j["residuals"] = {
      {"dual", rep.dual},
      {"kernel", rep.kernel},
      {"geodesic", rep.geodesic},
      {"key_lemma_ad", rep.key_lemma_ad},
      {"key_lemma_identity", rep.key_lemma_identity},
      {"lorentz_kernel", rep.lorentz_kernel},
      {"pairing_constancy", rep.pairing_constancy},
      {"field_periodicity", rep.field_periodicity},
  };
  if (std::isfinite(rep.strong_maximality_margin))
    j["residuals"]["strong_maximality_margin"] = rep.strong_maximality_margin;
  j["axis_alpha_norm_sq"] = rep.axis_alpha_norm_sq;
  j["exterior_bound_declared"] = rep.exterior_bound_declared;
  if (rep.exterior_bound_declared)
    j["exterior_bound_consistent"] = rep.exterior_bound_consistent;
  j["tolerances"] = {{"tol", rep.options.tol},
                     {"margin_tol", rep.options.margin_tol}};
  j["samples"] = {{"axis", rep.options.axis_samples},
                  {"grid", rep.options.grid_samples}};
  j["seed"] = rep.options.seed;
  j["conditional_on"] = rep.conditional_on;
  return j;
}

json report_to_json(const ConstructionReport& rep) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["system"] = rep.system.name();
  j["provenance"] = rep.provenance;
  j["certified_radius"] = rep.certified_radius;
  j["verification"] = report_to_json(rep.verification);
  if (std::isfinite(rep.beta)) j["beta"] = rep.beta;
  if (std::isfinite(rep.rho_ratio_max)) j["rho_ratio_max"] = rep.rho_ratio_max;
  if (std::isfinite(rep.rho_ratio_core_gap))
    j["rho_ratio_core_gap"] = rep.rho_ratio_core_gap;
  if (std::isfinite(rep.two_form_axis_drift))
    j["two_form_axis_drift"] = rep.two_form_axis_drift;
  return j;
}

json report_to_json(const C0Report& rep, const std::string& system) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["system"] = system;
  j["c0"] = rep.c0;
  j["alpha_sup"] = rep.alpha_sup;
  j["cu_equals_c0"] = rep.cu_equals_c0;
  j["hamiltonian_sup_theta0"] = rep.hamiltonian_sup_theta0;
  j["conditional_on"] = rep.conditional_on;
  return j;
}

json report_to_json(const MeasureReport& rep, const std::string& system,
                    double r, std::uint64_t seed) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["system"] = system;
  j["r"] = r;
  j["kappa"] = rep.kappa;
  j["orbit_action_rate"] = rep.orbit_action_rate;
  j["liouville_action"] = rep.liouville_action;
  j["A"] = rep.A;
  j["nu_action"] = rep.nu_action;
  j["lambda_ze_residual"] = rep.lambda_ze_residual;
  j["fiber_symmetry"] = rep.fiber_symmetry;
  j["seed"] = seed;
  return j;
}

std::string sweep_to_csv(const SweepTable& table) {
  std::string out =
      "r,kappa_r,predicted_action,quadrature_action,closure_residual,"
      "mixing_weight\n";
  for (const SweepRow& row : table.rows) {
    out += fmt17(row.r) + "," + fmt17(row.kappa_r) + "," +
           fmt17(row.predicted_action) + "," + fmt17(row.quadrature_action) +
           "," + fmt17(row.closure_residual) + ",";
    if (std::isfinite(row.mixing_weight)) out += fmt17(row.mixing_weight);
    out += "\n";
  }
  return out;
}

std::string measure_to_csv(const MeasureReport& rep, double r) {
  std::string out = "r,kappa,orbit_action_rate,liouville_action,A,nu_action\n";
  out += fmt17(r) + "," + fmt17(rep.kappa) + "," + fmt17(rep.orbit_action_rate) +
         "," + fmt17(rep.liouville_action) + "," + fmt17(rep.A) + "," +
         fmt17(rep.nu_action) + "\n";
  return out;
}

json sweep_to_json(const SweepTable& table, const std::string& system,
                   std::uint64_t seed) {
  json rows = json::array();
  for (const SweepRow& row : table.rows) {
    json r = {{"r", row.r},
              {"kappa_r", row.kappa_r},
              {"predicted_action", row.predicted_action},
              {"quadrature_action", row.quadrature_action},
              {"closure_residual", row.closure_residual},
              {"measured_energy", row.measured_energy}};
    if (std::isfinite(row.mixing_weight)) r["mixing_weight"] = row.mixing_weight;
    rows.push_back(std::move(r));
  }
  return json{{"schema_version", kSchemaVersion},
              {"system", system},
              {"alpha_sup", table.alpha_sup},
              {"T", table.period},
              {"rows", std::move(rows)},
              {"seed", seed}};
}

}  // namespace maglab
