#pragma once

#include <nlohmann/json_fwd.hpp>
#include <optional>
#include <string>

#include "maglab/chart.hpp"
#include "maglab/construct.hpp"
#include "maglab/mane.hpp"
#include "maglab/verify.hpp"

namespace maglab {

inline constexpr int kSchemaVersion = 1;

enum class ConstructKind {
  alpha_from_metric,
  metric_from_alpha,
  rescale_metric,
  rescale_alpha,
};

struct ConstructDirective {
  ConstructKind kind;
  std::optional<BumpProfile> bump;
  std::optional<double> beta;
  std::optional<std::vector<ExprAst>> exterior_alpha;
  std::optional<std::vector<ExprAst>> exterior_metric;  // upper triangle
};

struct SystemDocument {
  SystemChart system;
  std::optional<ConstructDirective> construct;
};

/// Parses and validates a system document.  Unknown keys are rejected; the
/// metric is audited positive definite on a sample of the chart ball.
SystemDocument load_system_document(const std::string& path);

/// Accepts "catalog:NAME" or a file path.
SystemChart load_system(const std::string& source);

void save_system(const SystemChart& sys, const std::string& path);

nlohmann::json system_to_json(const SystemChart& sys);
SystemDocument system_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerificationReport& rep);
nlohmann::json report_to_json(const ConstructionReport& rep);
nlohmann::json report_to_json(const C0Report& rep, const std::string& system);
nlohmann::json report_to_json(const MeasureReport& rep, const std::string& system,
                              double r, std::uint64_t seed);

std::string sweep_to_csv(const SweepTable& table);
nlohmann::json sweep_to_json(const SweepTable& table, const std::string& system,
                             std::uint64_t seed);
std::string measure_to_csv(const MeasureReport& rep, double r);

}  // namespace maglab
