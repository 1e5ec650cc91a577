// maglab: build, verify and probe exact magnetic systems on a tubular chart.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "maglab/catalog.hpp"
#include "maglab/construct.hpp"
#include "maglab/errors.hpp"
#include "maglab/flow.hpp"
#include "maglab/mane.hpp"
#include "maglab/sysdoc.hpp"
#include "maglab/verify.hpp"

namespace {

using nlohmann::json;

struct CommonArgs {
  std::string system;
  std::string out;
  double tol = 1e-8;
  int samples = 512;
  int grid = 4096;
  std::uint64_t seed = 20260810;
  bool rescale = false;
};

maglab::VerifyOptions verify_options(const CommonArgs& args) {
  if (args.tol <= 0.0) throw maglab::ConfigError("tol", "must be positive");
  if (args.samples <= 0) throw maglab::ConfigError("samples", "must be positive");
  if (args.grid <= 0) throw maglab::ConfigError("grid", "must be positive");
  maglab::VerifyOptions opts;
  opts.axis_samples = args.samples;
  opts.grid_samples = args.grid;
  opts.tol = args.tol;
  opts.seed = args.seed;
  return opts;
}

maglab::SystemChart resolve_system(const CommonArgs& args) {
  maglab::SystemChart sys = maglab::load_system(args.system);
  if (args.rescale) {
    const maglab::BumpProfile profile = maglab::default_profile(sys.radius());
    sys = maglab::rescale_metric(sys, profile, {}, verify_options(args)).system;
  }
  return sys;
}

bool residuals_within(const maglab::VerificationReport& rep) {
  return rep.dual <= rep.options.tol && rep.kernel <= rep.options.tol &&
         rep.geodesic <= rep.options.tol &&
         rep.key_lemma_ad <= rep.options.tol &&
         rep.key_lemma_identity <= rep.options.tol &&
         rep.lorentz_kernel <= rep.options.tol;
}

void emit(const json& j, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream os(out_path);
  if (!os) throw maglab::ConfigError("out", "cannot write '" + out_path + "'");
  os << j.dump(2) << "\n";
}

std::vector<double> parse_number_list(const std::string& csv, const char* what) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw maglab::ConfigError(what, "cannot parse '" + item + "' as a number");
    }
  }
  if (out.empty()) throw maglab::ConfigError(what, "empty list");
  return out;
}

int cmd_catalog() {
  for (const auto& entry : maglab::catalog_entries())
    std::printf("%-6s %s\n", entry.name.c_str(), entry.note.c_str());
  return 0;
}

int cmd_verify(const CommonArgs& args) {
  const maglab::SystemChart sys = resolve_system(args);
  const maglab::VerificationReport rep = maglab::classify(sys, verify_options(args));
  emit(maglab::report_to_json(rep), args.out);
  return residuals_within(rep) ? 0 : 1;
}

int cmd_build(const CommonArgs& args, double r0, double r1) {
  const maglab::SystemDocument doc = maglab::load_system_document(args.system);
  if (!doc.construct)
    throw maglab::ConfigError("construct",
                              "the system document carries no construct directive");
  const maglab::ConstructDirective& d = *doc.construct;
  maglab::BumpProfile profile = d.bump ? *d.bump
                                       : maglab::default_profile(doc.system.radius());
  if (r0 > 0.0 && r1 > 0.0) profile = maglab::BumpProfile{r0, r1};
  const maglab::VerifyOptions opts = verify_options(args);

  maglab::ConstructionReport rep = [&] {
    switch (d.kind) {
      case maglab::ConstructKind::alpha_from_metric:
        return maglab::build_alpha_from_metric(doc.system, d.exterior_alpha,
                                               profile, opts);
      case maglab::ConstructKind::metric_from_alpha:
        return maglab::build_metric_from_alpha(doc.system, d.exterior_metric,
                                               profile, opts);
      case maglab::ConstructKind::rescale_metric:
        return maglab::rescale_metric(doc.system, profile, d.beta, opts);
      case maglab::ConstructKind::rescale_alpha:
        return maglab::rescale_alpha(doc.system, profile, d.beta, opts);
    }
    throw maglab::Error("unreachable");
  }();

  const std::string dir = args.out.empty() ? "." : args.out;
  std::filesystem::create_directories(dir);
  const std::string base = dir + "/" + rep.system.name();
  maglab::save_system(rep.system, base + ".json");
  std::ofstream report(base + ".report.json");
  report << maglab::report_to_json(rep).dump(2) << "\n";
  std::printf("wrote %s.json and %s.report.json\n", base.c_str(), base.c_str());
  return residuals_within(rep.verification) ? 0 : 1;
}

int cmd_integrate(const CommonArgs& args, const std::string& p_csv,
                  const std::string& v_csv, double duration, double h,
                  bool adaptive) {
  const maglab::SystemChart sys = resolve_system(args);
  const std::vector<double> p = parse_number_list(p_csv, "p");
  const std::vector<double> v = parse_number_list(v_csv, "v");
  if (static_cast<int>(p.size()) != sys.dim() ||
      static_cast<int>(v.size()) != sys.dim())
    throw maglab::ConfigError("state", "p and v must list m coordinates each");
  maglab::State s0{maglab::Vec::Zero(sys.dim()), maglab::Vec::Zero(sys.dim())};
  for (int i = 0; i < sys.dim(); ++i) {
    s0.p[i] = p[static_cast<std::size_t>(i)];
    s0.v[i] = v[static_cast<std::size_t>(i)];
  }
  maglab::IntegratorConfig cfg;
  cfg.h = h;
  cfg.adaptive = adaptive;
  const maglab::Trajectory traj = maglab::integrate(sys, s0, duration, cfg);
  if (args.out.empty()) {
    maglab::write_trajectory_csv(sys, traj, std::cout);
  } else {
    std::ofstream os(args.out);
    if (!os) throw maglab::ConfigError("out", "cannot write '" + args.out + "'");
    maglab::write_trajectory_csv(sys, traj, os);
  }
  return 0;
}

int cmd_sweep(const CommonArgs& args, const std::string& r_csv, double h) {
  const maglab::SystemChart sys = resolve_system(args);
  maglab::IntegratorConfig cfg;
  cfg.h = h > 0.0 ? h : sys.period() / 2000.0;
  const maglab::SweepTable table =
      maglab::action_sweep(sys, parse_number_list(r_csv, "r"), cfg,
                           verify_options(args));
  if (args.out.empty()) {
    std::cout << maglab::sweep_to_csv(table);
  } else {
    std::filesystem::create_directories(args.out);
    std::ofstream csv(args.out + "/sweep.csv");
    csv << maglab::sweep_to_csv(table);
    std::ofstream js(args.out + "/sweep.json");
    js << maglab::sweep_to_json(table, sys.name(), args.seed).dump(2) << "\n";
  }
  bool ok = true;
  for (const auto& row : table.rows) {
    ok = ok && row.closure_residual <= 1e-8;
    ok = ok && std::abs(row.quadrature_action - row.predicted_action) <=
                   1e-7 * (1.0 + std::abs(row.predicted_action));
  }
  return ok ? 0 : 1;
}

int cmd_mane(const CommonArgs& args) {
  const maglab::SystemChart sys = resolve_system(args);
  const maglab::C0Report rep = maglab::c0(sys, verify_options(args));
  json j = maglab::report_to_json(rep, sys.name());
  j["lower_bound_audit"] =
      maglab::lower_bound_audit(sys, 10000, verify_options(args));
  j["seed"] = args.seed;
  emit(j, args.out);
  return j["lower_bound_audit"].get<double>() >= -1e-10 ? 0 : 1;
}

int cmd_measure(const CommonArgs& args, double r, double h) {
  const maglab::SystemChart sys = resolve_system(args);
  maglab::IntegratorConfig cfg;
  cfg.h = h > 0.0 ? h : sys.period() / 2000.0;
  const maglab::MeasureReport rep =
      maglab::measure_mix(sys, r, cfg, verify_options(args));
  if (args.out.empty()) {
    emit(maglab::report_to_json(rep, sys.name(), r, args.seed), "");
  } else {
    std::filesystem::create_directories(args.out);
    emit(maglab::report_to_json(rep, sys.name(), r, args.seed),
         args.out + "/measure.json");
    std::ofstream csv(args.out + "/measure.csv");
    csv << maglab::measure_to_csv(rep, r);
  }
  const bool ok = std::abs(rep.nu_action) <= 1e-12 && rep.A > 0.0 &&
                  rep.A <= 1.0 && rep.lambda_ze_residual <= 1e-12;
  return ok ? 0 : 1;
}

json error_json(const std::string& kind, const std::string& what) {
  return json{{"error", {{"kind", kind}, {"what", what}}}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"magnetic systems of geodesic type on a tubular chart"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print help");  // frees -h / --h for the step size

  CommonArgs args;
  auto add_common = [&](CLI::App* cmd) {
    cmd->set_help_flag("--help", "print help");
    cmd->add_option("--system", args.system,
                    "catalog:NAME or a system document path")
        ->required();
    cmd->add_option("--out", args.out, "output file or directory");
    cmd->add_option("--tol", args.tol, "residual tolerance");
    cmd->add_option("--samples", args.samples, "axis sample count");
    cmd->add_option("--grid", args.grid, "chart-ball grid sample count");
    cmd->add_option("--seed", args.seed, "sampling seed (recorded in reports)");
    cmd->add_flag("--rescale", args.rescale,
                  "apply the strong-type metric rescale first");
  };

  CLI::App* catalog = app.add_subcommand("catalog", "list built-in systems");
  catalog->set_help_flag("--help", "print help");

  CLI::App* verify = app.add_subcommand("verify", "classify a system");
  add_common(verify);

  CLI::App* build = app.add_subcommand("build", "run the construct directive");
  double build_r0 = 0.0, build_r1 = 0.0;
  add_common(build);
  build->add_option("--r0", build_r0, "override bump inner radius");
  build->add_option("--r1", build_r1, "override bump outer radius");

  CLI::App* integrate = app.add_subcommand("integrate", "integrate the flow");
  std::string p_csv = "0,0,0", v_csv = "1,0,0";
  double duration = 0.0, h = 0.0;
  bool adaptive = false;
  add_common(integrate);
  integrate->add_option("--p", p_csv, "initial point t,x2,...,xm");
  integrate->add_option("--v", v_csv, "initial velocity v1,...,vm");
  integrate->add_option("--duration", duration, "integration time")->required();
  integrate->add_option("--h", h, "step size (default duration/2000)");
  integrate->add_flag("--adaptive", adaptive, "step-doubling control");

  CLI::App* sweep = app.add_subcommand("sweep", "gamma_r action sweep");
  std::string r_csv = "0.25,0.5,0.75,1,1.5,2";
  add_common(sweep);
  sweep->add_option("--r", r_csv, "comma-separated speed factors");
  sweep->add_option("--h", h, "step size");

  CLI::App* mane = app.add_subcommand("mane", "strict critical value report");
  add_common(mane);

  CLI::App* measure = app.add_subcommand("measure", "invariant measure mix");
  double measure_r = 0.5;
  add_common(measure);
  measure->add_option("--r", measure_r, "speed factor, must be < 1");
  measure->add_option("--h", h, "step size");

  CLI11_PARSE(app, argc, argv);

  try {
    if (catalog->parsed()) return cmd_catalog();
    if (verify->parsed()) return cmd_verify(args);
    if (build->parsed()) return cmd_build(args, build_r0, build_r1);
    if (integrate->parsed())
      return cmd_integrate(args, p_csv, v_csv, duration, h, adaptive);
    if (sweep->parsed()) return cmd_sweep(args, r_csv, h);
    if (mane->parsed()) return cmd_mane(args);
    if (measure->parsed()) return cmd_measure(args, measure_r, h);
  } catch (const maglab::ConfigError& e) {
    std::cerr << error_json("config", e.what()).dump() << "\n";
    return 2;
  } catch (const maglab::Error& e) {
    std::cerr << error_json("runtime", e.what()).dump() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << error_json("internal", e.what()).dump() << "\n";
    return 3;
  }
  return 0;
}
