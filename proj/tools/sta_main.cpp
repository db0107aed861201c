// sta: scenario runner for shortcut-to-adiabaticity strokes.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sta/imaging.hpp"
#include "sta/scenario.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

struct GlobalOptions {
  std::optional<std::string> output_dir;
  std::optional<double> rel_tol;
  std::optional<double> abs_tol;
  unsigned jobs = 1;
};

int exit_code_for(const sta::Error& e) {
  return e.kind() == sta::ErrorKind::Validation ? kExitValidation : kExitNumerical;
}

int exit_code_for(sta::RunStatus s) {
  switch (s) {
    case sta::RunStatus::Ok: return kExitOk;
    case sta::RunStatus::ValidationError: return kExitValidation;
    case sta::RunStatus::NumericalError: return kExitNumerical;
  }
  return kExitNumerical;
}

// flag > STA_OUTPUT_DIR > scenario file
void apply_overrides(sta::Scenario& sc, const GlobalOptions& opts) {
  if (opts.output_dir) {
    sc.output_dir = *opts.output_dir;
  } else if (const char* env = std::getenv("STA_OUTPUT_DIR"); env != nullptr && *env != '\0') {
    sc.output_dir = env;
  }
  if (opts.rel_tol) sc.integrator.rel_tol = *opts.rel_tol;
  if (opts.abs_tol) sc.integrator.abs_tol = *opts.abs_tol;
}

// scenario being processed, reported with any error
std::string g_context;

sta::Scenario resolve(const std::string& ref, const GlobalOptions& opts) {
  g_context = ref;
  constexpr std::string_view prefix = "preset:";
  sta::Scenario sc = ref.rfind(prefix, 0) == 0 ? sta::preset(ref.substr(prefix.size())) : sta::load_scenario(ref);
  apply_overrides(sc, opts);
  return sc;
}

std::filesystem::path batch_dir(const GlobalOptions& opts) {
  sta::Scenario defaults;
  apply_overrides(defaults, opts);
  return defaults.output_dir;
}

void report(const std::vector<sta::BatchEntry>& entries, int& code) {
  for (const auto& e : entries) {
    std::cout << e.name << ": " << sta::to_string(e.status);
    if (e.status == sta::RunStatus::Ok) {
      std::cout << " -> " << e.directory.string();
    } else {
      std::cout << " (" << e.message << ")";
    }
    std::cout << '\n';
    code = std::max(code, exit_code_for(e.status));
  }
}

int cmd_design(const std::vector<std::string>& refs, const GlobalOptions& opts) {
  for (const auto& ref : refs) {
    const sta::Scenario sc = resolve(ref, opts);
    const auto design = sta::design_scenario(sc);
    std::cout << sc.name << ": drive " << (design["drive"]["feasible"].get<bool>() ? "feasible" : "INFEASIBLE")
              << " -> " << (sc.output_dir / sc.name).string() << '\n';
  }
  return kExitOk;
}

int cmd_run(const std::vector<std::string>& refs, bool all_presets, const GlobalOptions& opts) {
  std::vector<std::string> names = refs;
  if (all_presets) {
    for (const auto& p : sta::preset_names()) names.push_back("preset:" + p);
  }
  std::vector<sta::Scenario> batch;
  for (const auto& ref : names) {
    // sweeps inside a run batch are flattened into their children
    for (auto& child : sta::expand_sweep(resolve(ref, opts))) batch.push_back(std::move(child));
  }
  int code = kExitOk;
  report(sta::run_batch(batch, opts.jobs, batch_dir(opts)), code);
  return code;
}

int cmd_sweep(const std::vector<std::string>& refs, const GlobalOptions& opts) {
  int code = kExitOk;
  for (const auto& ref : refs) {
    const sta::Scenario sc = resolve(ref, opts);
    report(sta::run_sweep(sc, opts.jobs), code);
    std::cout << "sweep table -> " << (sc.output_dir / sc.name / "sweep.csv").string() << '\n';
  }
  return code;
}

int cmd_fit(const std::string& path, std::optional<double> factor, bool as_json) {
  g_context = path;
  const sta::Profile profile = sta::read_profile_csv(path);
  const sta::GaussianFit fit = sta::gaussian_fit(profile);
  nlohmann::json out = {{"profile", path},
                        {"a0", fit.a0},
                        {"a1", fit.a1},
                        {"sigma", fit.sigma},
                        {"residual_norm", fit.residual_norm},
                        {"iterations", fit.iterations},
                        {"converged", fit.converged}};
  if (factor) out["in_trap_sigma"] = sta::infer_in_trap_size(fit, *factor);
  if (as_json) {
    std::cout << out.dump(2) << '\n';
  } else {
    std::cout << "A0 = " << fit.a0 << "\nA1 = " << fit.a1 << "\nsigma = " << fit.sigma
              << "\nresidual = " << fit.residual_norm << "\niterations = " << fit.iterations
              << (fit.converged ? "" : " (not converged)") << '\n';
    if (factor) std::cout << "in-trap sigma = " << out["in_trap_sigma"].get<double>() << '\n';
  }
  return fit.converged ? kExitOk : kExitNumerical;
}

int cmd_presets(const std::optional<std::string>& write_dir) {
  for (const auto& name : sta::preset_names()) {
    if (write_dir) {
      std::filesystem::create_directories(*write_dir);
      const auto path = std::filesystem::path(*write_dir) / (name + ".json");
      std::ofstream(path) << sta::preset_config(name).dump(2) << '\n';
      std::cout << path.string() << '\n';
    } else {
      std::cout << name << '\n';
    }
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Shortcut-to-adiabaticity scenario runner"};
  app.require_subcommand(1);
  GlobalOptions opts;

  app.add_option("--output-dir", opts.output_dir, "Output root (overrides STA_OUTPUT_DIR and the scenario)");
  app.add_option("--rel-tol", opts.rel_tol, "Integrator relative tolerance")->check(CLI::PositiveNumber);
  app.add_option("--abs-tol", opts.abs_tol, "Integrator absolute tolerance")->check(CLI::PositiveNumber);
  app.add_option("-j,--jobs", opts.jobs, "Scenarios run in parallel")->check(CLI::Range(1u, 256u));

  std::vector<std::string> refs;
  auto* design = app.add_subcommand("design", "Write the drive schedule and feasibility report only");
  design->add_option("scenario", refs, "Scenario file or preset:NAME")->required();

  bool all_presets = false;
  auto* run = app.add_subcommand("run", "Design, integrate and write observables");
  run->add_option("scenario", refs, "Scenario file or preset:NAME");
  run->add_flag("--all-presets", all_presets, "Run every built-in preset (sweeps expanded)");

  auto* sweep = app.add_subcommand("sweep", "Run the sweep axes of a scenario and tabulate the results");
  sweep->add_option("scenario", refs, "Scenario file or preset:NAME")->required();

  std::string profile;
  std::optional<double> factor;
  bool as_json = false;
  auto* fit = app.add_subcommand("fit", "Fit A0 + A1 exp(-x^2/sigma^2) to a two-column profile CSV");
  fit->add_option("profile", profile, "Profile CSV (position,value)")->required()->check(CLI::ExistingFile);
  fit->add_option("--expansion-factor", factor, "Divide sigma by this b(t_tof)")->check(CLI::PositiveNumber);
  fit->add_flag("--json", as_json, "Print the result as JSON");

  std::optional<std::string> write_dir;
  auto* presets = app.add_subcommand("presets", "List built-in presets");
  presets->add_option("--write", write_dir, "Write each preset as DIR/NAME.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*design) return cmd_design(refs, opts);
    if (*run) {
      if (refs.empty() && !all_presets) {
        std::cerr << "run: give a scenario or --all-presets\n";
        return kExitValidation;
      }
      return cmd_run(refs, all_presets, opts);
    }
    if (*sweep) return cmd_sweep(refs, opts);
    if (*fit) return cmd_fit(profile, factor, as_json);
    if (*presets) return cmd_presets(write_dir);
  } catch (const sta::Error& e) {
    const std::string where = g_context.empty() ? "" : " in " + g_context;
    std::cerr << (e.kind() == sta::ErrorKind::Validation ? "validation error" : "numerical error") << where << ": "
              << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error" << (g_context.empty() ? "" : " in " + g_context) << ": " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
