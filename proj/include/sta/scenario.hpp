#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sta/core.hpp"
#include "sta/dynamics.hpp"
#include "sta/protocol.hpp"

namespace sta {

enum class DriveChoice { Reference, Lcd, LcdViscous, Table };
enum class PostAction { None, Hold, Tof };

struct SweepAxes {
  std::vector<double> tau;       // s
  std::vector<double> alpha_s;
  std::vector<double> target_b;  // applied to all axes
};

struct Scenario {
  std::string name;
  StrokeSpec stroke;
  GasSpec gas;
  DriveChoice drive = DriveChoice::Lcd;
  std::filesystem::path drive_table;
  PostAction post = PostAction::None;
  double post_duration = 0.0;
  std::size_t stroke_samples = 251;
  std::size_t post_samples = 101;
  IntegratorConfig integrator;
  std::optional<SweepAxes> sweep;
  std::filesystem::path output_dir = "sta_output";
  nlohmann::json labels = nlohmann::json::object();  // free-form, echoed into artifacts
};

/// Parses the scenario schema (frequencies in Hz, times in s). Relative table paths
/// resolve against `base_dir`. Throws Error(InvalidConfig) on schema violations and
/// ValidationError when the resolved stroke/gas break an invariant.
Scenario parse_scenario(const nlohmann::json& config, const std::filesystem::path& base_dir = {});
Scenario load_scenario(const std::filesystem::path& path);

/// Fully resolved configuration in the same schema (Hz, s, explicit gas closures).
nlohmann::json to_json(const Scenario& scenario);

std::vector<std::string> preset_names();
nlohmann::json preset_config(const std::string& name);
Scenario preset(const std::string& name);

/// Cartesian product of the sweep axes (tau outermost, target_b innermost); each
/// child is named "<name>__tau_s=...__alpha_s=...__target_b=..." with only swept axes.
std::vector<Scenario> expand_sweep(const Scenario& scenario);

FrequencySchedule build_schedule(const Scenario& scenario);
DriveSchedule build_drive(const Scenario& scenario, const FrequencySchedule& schedule);

struct ScenarioResult {
  std::string name;
  Trajectory trajectory;
  nlohmann::json summary;
  std::filesystem::path directory;
};

/// design -> integrate -> post-stroke -> observables; writes trajectory.csv,
/// observables.csv and summary.json under output_dir/name.
ScenarioResult run_scenario(const Scenario& scenario);

/// Writes drive.csv and design.json (feasibility) only.
nlohmann::json design_scenario(const Scenario& scenario);

enum class RunStatus { Ok, ValidationError, NumericalError };
std::string_view to_string(RunStatus status);

struct BatchEntry {
  std::string name;
  RunStatus status = RunStatus::Ok;
  std::string message;
  std::filesystem::path directory;
  nlohmann::json summary;
};

/// Runs every scenario (in parallel up to `parallelism`), continuing past failures, and
/// writes index.json into `index_dir`. Entries keep input order. Throws
/// Error(InvalidConfig) before running anything if names collide.
std::vector<BatchEntry> run_batch(const std::vector<Scenario>& scenarios, unsigned parallelism,
                                  const std::filesystem::path& index_dir);

/// Runs the expanded sweep and writes sweep.csv into output_dir/name.
std::vector<BatchEntry> run_sweep(const Scenario& scenario, unsigned parallelism);

}  // namespace sta
