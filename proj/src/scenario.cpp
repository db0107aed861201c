#include "sta/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "number_format.hpp"
#include "sta/observables.hpp"

namespace sta {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

[[noreturn]] void config_error(const std::string& msg) { throw Error(ErrorCode::InvalidConfig, msg); }

void reject_unknown_keys(const json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
  for (const auto& [key, _] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      config_error("unknown key '" + key + "' in " + where);
    }
  }
}

double number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) config_error("missing '" + key + "' in " + where);
  const json& v = obj.at(key);
  if (!v.is_number()) config_error("'" + key + "' in " + where + " must be a number");
  return v.get<double>();
}

double number_or(const json& obj, const std::string& key, double fallback, const std::string& where) {
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

AxisTriple triple(const json& v, const std::string& what) {
  if (v.is_number()) return AxisTriple::uniform(v.get<double>());
  if (!v.is_array() || v.size() != 3) config_error("'" + what + "' must be a number or a 3-array");
  AxisTriple out;
  for (int j = 0; j < kAxes; ++j) {
    if (!v[j].is_number()) config_error("'" + what + "' entries must be numbers");
    out[j] = v[j].get<double>();
  }
  return out;
}

json triple_json(const AxisTriple& t) { return json::array({t.x, t.y, t.z}); }

std::vector<double> number_list(const json& v, const std::string& what) {
  if (!v.is_array() || v.empty()) config_error("sweep axis '" + what + "' must be a nonempty array");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) config_error("sweep axis '" + what + "' must contain numbers");
    out.push_back(e.get<double>());
  }
  return out;
}

DriveChoice parse_drive(const std::string& s) {
  if (s == "reference") return DriveChoice::Reference;
  if (s == "lcd") return DriveChoice::Lcd;
  if (s == "lcd-viscous") return DriveChoice::LcdViscous;
  if (s == "table") return DriveChoice::Table;
  config_error("unknown drive '" + s + "' (reference | lcd | lcd-viscous | table)");
}

std::string drive_name(DriveChoice d) {
  switch (d) {
    case DriveChoice::Reference: return "reference";
    case DriveChoice::Lcd: return "lcd";
    case DriveChoice::LcdViscous: return "lcd-viscous";
    case DriveChoice::Table: return "table";
  }
  return "lcd";
}

PostAction parse_post(const std::string& s) {
  if (s == "none") return PostAction::None;
  if (s == "hold") return PostAction::Hold;
  if (s == "tof") return PostAction::Tof;
  config_error("unknown post_stroke action '" + s + "' (none | hold | tof)");
}

std::string post_name(PostAction p) {
  switch (p) {
    case PostAction::None: return "none";
    case PostAction::Hold: return "hold";
    case PostAction::Tof: return "tof";
  }
  return "none";
}

std::string axis_suffix(int j) { return j == 0 ? "x" : (j == 1 ? "y" : "z"); }

// Drive table: t_s, then (Omega_j / 2 pi)^2 in Hz^2 per axis (may be negative).
DriveSchedule load_drive_table(const fs::path& path, PostStroke post) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open drive table " + path.string());
  std::vector<double> times;
  std::array<std::vector<double>, kAxes> cols;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::optional<double>> fields;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) fields.push_back(detail::parse_double(cell));
    const bool numeric = fields.size() == 4 &&
                         std::all_of(fields.begin(), fields.end(), [](const auto& f) { return f.has_value(); });
    if (!numeric) {
      if (!header && times.empty()) {
        header = true;
        continue;
      }
      config_error("drive table " + path.string() + ": malformed row '" + line + "'");
    }
    times.push_back(*fields[0]);
    const double hz2_to_rad2 = kTwoPi * kTwoPi;
    for (int j = 0; j < kAxes; ++j) cols[j].push_back(*fields[j + 1] * hz2_to_rad2);
  }
  return drive_from_table(std::move(times), std::move(cols), post);
}

}  // namespace

// ---------------------------------------------------------------------------
// Schema

Scenario parse_scenario(const json& config, const fs::path& base_dir) {
  if (!config.is_object()) config_error("scenario must be a JSON object");
  reject_unknown_keys(config,
                      {"name", "regime", "trap_hz", "target_b", "final_trap_hz", "tau_s", "drive",
                       "drive_table", "gas", "post_stroke", "output", "integrator", "sweep", "labels"},
                      "scenario");
  Scenario sc;
  if (!config.contains("name") || !config["name"].is_string() || config["name"].get<std::string>().empty()) {
    config_error("scenario needs a nonempty string 'name'");
  }
  sc.name = config["name"].get<std::string>();
  if (sc.name.find_first_of("/\\") != std::string::npos || sc.name == "." || sc.name == "..") {
    config_error("scenario name must be a plain file name");
  }
  const Regime regime = parse_regime(config.value("regime", std::string("unitary")));

  if (!config.contains("trap_hz")) config_error("missing 'trap_hz'");
  const AxisTriple trap_hz = triple(config["trap_hz"], "trap_hz");
  for (int j = 0; j < kAxes; ++j) sc.stroke.omega0[j] = hz_to_rad(trap_hz[j]);
  sc.stroke.tau = number(config, "tau_s", "scenario");
  if (config.contains("target_b") && config.contains("final_trap_hz")) {
    config_error("give either 'target_b' or 'final_trap_hz', not both");
  }
  if (config.contains("final_trap_hz")) {
    const AxisTriple final_hz = triple(config["final_trap_hz"], "final_trap_hz");
    for (int j = 0; j < kAxes; ++j) {
      if (!(final_hz[j] > 0.0)) config_error("final_trap_hz must be > 0");
      sc.stroke.target_b[j] = std::sqrt(trap_hz[j] / final_hz[j]);
    }
  } else if (config.contains("target_b")) {
    sc.stroke.target_b = triple(config["target_b"], "target_b");
  }

  if (config.contains("drive")) {
    if (!config["drive"].is_string()) config_error("'drive' must be a string");
    sc.drive = parse_drive(config["drive"].get<std::string>());
  }
  if (sc.drive == DriveChoice::Table) {
    if (!config.contains("drive_table") || !config["drive_table"].is_string()) {
      config_error("drive 'table' needs 'drive_table'");
    }
    fs::path p = config["drive_table"].get<std::string>();
    sc.drive_table = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
  }

  // gas
  const json gas = config.value("gas", json::object());
  if (!gas.is_object()) config_error("'gas' must be an object");
  reject_unknown_keys(gas,
                      {"mass_kg", "energy_J", "energy_over_ef", "fermi_energy_uK", "alpha_s",
                       "msq_sizes_m2", "virial_denominator_J"},
                      "gas");
  const double mass = number_or(gas, "mass_kg", kLithium6Mass, "gas");
  double energy = 0.0;
  if (gas.contains("energy_J")) {
    if (gas.contains("energy_over_ef")) config_error("give either 'energy_J' or 'energy_over_ef'");
    energy = number(gas, "energy_J", "gas");
  } else if (gas.contains("energy_over_ef")) {
    energy = number(gas, "energy_over_ef", "gas") * number(gas, "fermi_energy_uK", "gas") * 1e-6 * kBoltzmann;
  } else {
    config_error("gas needs 'energy_J' or 'energy_over_ef' with 'fermi_energy_uK'");
  }
  sc.gas = make_gas(regime, sc.stroke, energy, number_or(gas, "alpha_s", 0.0, "gas"), mass);
  if (gas.contains("msq_sizes_m2")) sc.gas.initial_msq_sizes = triple(gas["msq_sizes_m2"], "msq_sizes_m2");
  if (gas.contains("virial_denominator_J")) {
    sc.gas.virial_denominator = number(gas, "virial_denominator_J", "gas");
  }

  // post-stroke
  if (config.contains("post_stroke")) {
    const json& post = config["post_stroke"];
    if (!post.is_object()) config_error("'post_stroke' must be an object");
    reject_unknown_keys(post, {"action", "duration_s", "samples"}, "post_stroke");
    sc.post = parse_post(post.value("action", std::string("none")));
    sc.post_duration = number_or(post, "duration_s", 0.0, "post_stroke");
    sc.post_samples = static_cast<std::size_t>(number_or(post, "samples", 101, "post_stroke"));
    if (sc.post != PostAction::None && !(sc.post_duration > 0.0)) {
      config_error("post_stroke duration_s must be > 0");
    }
  }

  if (config.contains("output")) {
    const json& out = config["output"];
    if (!out.is_object()) config_error("'output' must be an object");
    reject_unknown_keys(out, {"samples", "dir"}, "output");
    sc.stroke_samples = static_cast<std::size_t>(number_or(out, "samples", 251, "output"));
    if (out.contains("dir")) {
      fs::path p = out["dir"].get<std::string>();
      sc.output_dir = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
    }
  }
  if (sc.stroke_samples < 2 || sc.post_samples < 2) config_error("sample counts must be >= 2");

  if (config.contains("integrator")) {
    const json& integ = config["integrator"];
    if (!integ.is_object()) config_error("'integrator' must be an object");
    reject_unknown_keys(integ, {"rel_tol", "abs_tol", "max_step_s", "max_steps"}, "integrator");
    sc.integrator.rel_tol = number_or(integ, "rel_tol", sc.integrator.rel_tol, "integrator");
    sc.integrator.abs_tol = number_or(integ, "abs_tol", sc.integrator.abs_tol, "integrator");
    sc.integrator.max_step = number_or(integ, "max_step_s", 0.0, "integrator");
    const double max_steps = number_or(integ, "max_steps", static_cast<double>(sc.integrator.max_steps), "integrator");
    if (!(max_steps >= 1.0)) config_error("integrator max_steps must be >= 1");
    sc.integrator.max_steps = static_cast<std::size_t>(max_steps);
  }
  if (!(sc.integrator.rel_tol > 0.0) || !(sc.integrator.abs_tol > 0.0)) {
    config_error("integrator tolerances must be > 0");
  }

  if (config.contains("sweep")) {
    const json& sw = config["sweep"];
    if (!sw.is_object()) config_error("'sweep' must be an object");
    reject_unknown_keys(sw, {"tau_s", "alpha_s", "target_b"}, "sweep");
    SweepAxes axes;
    if (sw.contains("tau_s")) axes.tau = number_list(sw["tau_s"], "tau_s");
    if (sw.contains("alpha_s")) axes.alpha_s = number_list(sw["alpha_s"], "alpha_s");
    if (sw.contains("target_b")) axes.target_b = number_list(sw["target_b"], "target_b");
    if (axes.tau.empty() && axes.alpha_s.empty() && axes.target_b.empty()) {
      config_error("'sweep' must name at least one axis");
    }
    sc.sweep = axes;
  }
  if (config.contains("labels")) {
    if (!config["labels"].is_object()) config_error("'labels' must be an object");
    sc.labels = config["labels"];
  }

  validate_spec(sc.stroke, sc.gas);
  return sc;
}

Scenario load_scenario(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open scenario " + path.string());
  json config;
  try {
    in >> config;
  } catch (const json::exception& e) {
    config_error(path.string() + ": " + e.what());
  }
  return parse_scenario(config, path.parent_path());
}

json to_json(const Scenario& sc) {
  AxisTriple trap_hz;
  for (int j = 0; j < kAxes; ++j) trap_hz[j] = rad_to_hz(sc.stroke.omega0[j]);
  json out = {
      {"name", sc.name},
      {"regime", std::string(to_string(sc.gas.regime))},
      {"trap_hz", triple_json(trap_hz)},
      {"target_b", triple_json(sc.stroke.target_b)},
      {"tau_s", sc.stroke.tau},
      {"drive", drive_name(sc.drive)},
      {"gas",
       {{"mass_kg", sc.gas.mass},
        {"energy_J", sc.gas.initial_energy},
        {"alpha_s", sc.gas.alpha_s},
        {"msq_sizes_m2", triple_json(sc.gas.initial_msq_sizes)},
        {"virial_denominator_J", sc.gas.virial_denominator}}},
      {"post_stroke",
       {{"action", post_name(sc.post)}, {"duration_s", sc.post_duration}, {"samples", sc.post_samples}}},
      {"output", {{"samples", sc.stroke_samples}}},
      {"integrator",
       {{"rel_tol", sc.integrator.rel_tol},
        {"abs_tol", sc.integrator.abs_tol},
        {"max_step_s", sc.integrator.max_step},
        {"max_steps", sc.integrator.max_steps}}},
      {"labels", sc.labels},
  };
  if (sc.drive == DriveChoice::Table) out["drive_table"] = sc.drive_table.string();
  if (sc.sweep) {
    json sw = json::object();
    if (!sc.sweep->tau.empty()) sw["tau_s"] = sc.sweep->tau;
    if (!sc.sweep->alpha_s.empty()) sw["alpha_s"] = sc.sweep->alpha_s;
    if (!sc.sweep->target_b.empty()) sw["target_b"] = sc.sweep->target_b;
    out["sweep"] = sw;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Presets

std::vector<std::string> preset_names() {
  return {"sec3-isotropic", "sec3-isotropic-reference", "sec4-isotropic", "sec4-anisotropic", "sec4-tof"};
}

json preset_config(const std::string& name) {
  // Normal-fluid isotropic expansion in an elongated trap (E = 0.75 E_F).
  const json sec3 = {
      {"name", "sec3-isotropic"},
      {"regime", "unitary"},
      {"trap_hz", {825.0, 230.0, 230.0}},
      {"target_b", 1.5},
      {"tau_s", 1250e-6},
      {"drive", "lcd"},
      {"gas", {{"energy_over_ef", 0.75}, {"fermi_energy_uK", 1.0}}},
      {"output", {{"samples", 251}}},
      {"labels", {{"energy_over_ef", 0.75}, {"temperature_over_tf", 0.23}}},
  };
  // Cigar trap, aspect ratio ~22, Fermi energy ~6.5 uK.
  const json sec4_base = {
      {"regime", "viscous-unitary"},
      {"trap_hz", {5581.5, 5581.5, 252.7}},
      {"tau_s", 1.5e-3},
      {"drive", "lcd"},
      {"output", {{"samples", 301}}},
  };
  if (name == "sec3-isotropic") return sec3;
  if (name == "sec3-isotropic-reference") {
    json cfg = sec3;
    cfg["name"] = name;
    cfg["drive"] = "reference";
    return cfg;
  }
  if (name == "sec4-isotropic") {
    json cfg = sec4_base;
    cfg["name"] = name;
    cfg["target_b"] = 1.5;
    cfg["gas"] = {{"energy_over_ef", 2.47}, {"fermi_energy_uK", 6.5}, {"alpha_s", 0.0}};
    cfg["sweep"] = {{"alpha_s", {0.0, 5.0}}};
    // stress of an isotropic flow is pure integration error, kept below 1e-12 omega0
    cfg["integrator"] = {{"rel_tol", 1e-12}, {"abs_tol", 1e-14}};
    cfg["labels"] = {{"energy_over_ef", 2.47}, {"temperature_over_tf", 0.85}};
    return cfg;
  }
  if (name == "sec4-anisotropic") {
    json cfg = sec4_base;
    cfg["name"] = name;
    cfg["final_trap_hz"] = {2480.7, 2480.7, 208.8};
    cfg["gas"] = {{"energy_over_ef", 0.78}, {"fermi_energy_uK", 6.5}, {"alpha_s", 0.0}};
    cfg["labels"] = {{"energy_over_ef", 0.78}, {"temperature_over_tf", 0.24}};
    return cfg;
  }
  if (name == "sec4-tof") {
    // released from the stationary cigar trap after an identity (hold) stroke
    json cfg = sec4_base;
    cfg["name"] = name;
    cfg["target_b"] = 1.0;
    cfg["tau_s"] = 100e-6;
    cfg["output"] = {{"samples", 11}};
    cfg["gas"] = {{"energy_over_ef", 2.47}, {"fermi_energy_uK", 6.5}, {"alpha_s", 0.0}};
    cfg["post_stroke"] = {{"action", "tof"}, {"duration_s", 500e-6}, {"samples", 101}};
    cfg["sweep"] = {{"alpha_s", {0.0, 1.0, 2.0, 5.0}}};
    cfg["labels"] = {{"energy_over_ef", 2.47}, {"low_energy_over_ef", 0.78}, {"t_tof_s", 500e-6}};
    return cfg;
  }
  config_error("unknown preset '" + name + "'");
}

Scenario preset(const std::string& name) { return parse_scenario(preset_config(name)); }

// ---------------------------------------------------------------------------
// Sweeps

std::vector<Scenario> expand_sweep(const Scenario& base) {
  if (!base.sweep) return {base};
  const SweepAxes& axes = *base.sweep;
  const std::vector<double> taus = axes.tau.empty() ? std::vector<double>{base.stroke.tau} : axes.tau;
  const std::vector<double> alphas =
      axes.alpha_s.empty() ? std::vector<double>{base.gas.alpha_s} : axes.alpha_s;
  std::vector<std::optional<double>> targets;
  if (axes.target_b.empty()) targets.emplace_back(std::nullopt);
  for (double b : axes.target_b) targets.emplace_back(b);

  std::vector<Scenario> out;
  for (double tau : taus) {
    for (double alpha : alphas) {
      for (const auto& target : targets) {
        Scenario sc = base;
        sc.sweep.reset();
        sc.stroke.tau = tau;
        if (target) sc.stroke.target_b = AxisTriple::uniform(*target);
        sc.gas.alpha_s = alpha;
        std::string suffix;
        if (!axes.tau.empty()) suffix += "__tau_s=" + detail::format_double(tau);
        if (!axes.alpha_s.empty()) suffix += "__alpha_s=" + detail::format_double(alpha);
        if (target) suffix += "__target_b=" + detail::format_double(*target);
        sc.name = base.name + suffix;
        validate_spec(sc.stroke, sc.gas);
        out.push_back(std::move(sc));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pipeline

FrequencySchedule build_schedule(const Scenario& sc) {
  return smoothstep_frequency(sc.stroke, sc.post == PostAction::Tof ? PostStroke::Release : PostStroke::Hold);
}

DriveSchedule build_drive(const Scenario& sc, const FrequencySchedule& schedule) {
  const PostStroke post = schedule.post();
  switch (sc.drive) {
    case DriveChoice::Reference:
      return reference_drive(schedule);
    case DriveChoice::Lcd:
      if (sc.gas.regime == Regime::NonInteracting) {
        return lcd_noninteracting(schedule, noninteracting_adiabat(schedule));
      }
      return lcd_anisotropic_unitary(schedule);
    case DriveChoice::LcdViscous:
      return lcd_viscous_unitary(schedule, sc.gas, adiabatic_reference(schedule));
    case DriveChoice::Table:
      return load_drive_table(sc.drive_table, post);
  }
  config_error("unsupported drive");
}

namespace {

void write_header_block(std::ostream& out, const Scenario& sc) {
  out << "# sta scenario " << sc.name << '\n';
  out << "# config: " << to_json(sc).dump() << '\n';
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
}

std::string trajectory_csv(const Scenario& sc, const Trajectory& traj, const DriveSchedule& applied) {
  std::ostringstream out;
  write_header_block(out, sc);
  out << "t_s";
  for (const char* col : {"b", "bdot", "omega_sq"}) {
    for (int j = 0; j < kAxes; ++j) out << ',' << col << '_' << axis_suffix(j);
  }
  out << ",q_star,work_over_h0";
  for (int j = 0; j < kAxes; ++j) out << ",sigma_bar_" << axis_suffix(j);
  out << ",z_over_x,r_over_z,c_q";
  for (int j = 0; j < kAxes; ++j) out << ",stress_" << axis_suffix(j) << axis_suffix(j);
  out << '\n';
  const auto fmt = detail::format_double;
  for (std::size_t i = 0; i < traj.samples.size(); ++i) {
    const ScalingState& s = traj.samples[i];
    const ObservableRecord& o = traj.observables[i];
    const AxisTriple w2 = applied.omega_sq(s.t);
    const AxisTriple stress = stress_diagonal(s.b, s.bdot);
    out << fmt(s.t);
    for (int j = 0; j < kAxes; ++j) out << ',' << fmt(s.b[j]);
    for (int j = 0; j < kAxes; ++j) out << ',' << fmt(s.bdot[j]);
    for (int j = 0; j < kAxes; ++j) out << ',' << fmt(w2[j]);
    out << ',' << fmt(o.q_star) << ',' << fmt(o.mean_work);
    for (int j = 0; j < kAxes; ++j) out << ',' << fmt(o.dimensionless_sizes[j]);
    out << ',' << fmt(o.z_over_x) << ',' << fmt(o.r_over_z) << ',' << fmt(s.cq);
    for (int j = 0; j < kAxes; ++j) out << ',' << fmt(stress[j]);
    out << '\n';
  }
  return out.str();
}

std::string observables_csv(const Scenario& sc, const Trajectory& traj) {
  std::ostringstream out;
  write_header_block(out, sc);
  out << "t_s,q_star,energy_over_h0,work_over_h0";
  for (int j = 0; j < kAxes; ++j) out << ",size_" << axis_suffix(j) << "_m";
  for (int j = 0; j < kAxes; ++j) out << ",sigma_bar_" << axis_suffix(j);
  out << ",z_over_x,r_over_z\n";
  const auto fmt = detail::format_double;
  for (const auto& o : traj.observables) {
    out << fmt(o.t) << ',' << fmt(o.q_star) << ',' << fmt(o.mean_energy) << ',' << fmt(o.mean_work);
    for (int j = 0; j < kAxes; ++j) out << ',' << fmt(o.sizes[j]);
    for (int j = 0; j < kAxes; ++j) out << ',' << fmt(o.dimensionless_sizes[j]);
    out << ',' << fmt(o.z_over_x) << ',' << fmt(o.r_over_z) << '\n';
  }
  return out.str();
}

json feasibility_json(const DriveSchedule& drive) {
  const FeasibilityReport rep = feasibility_check(drive);
  json intervals = json::array();
  for (int j = 0; j < kAxes; ++j) {
    json axis = json::array();
    for (const auto& [a, b] : rep.negative_intervals[j]) axis.push_back({a, b});
    intervals.push_back(axis);
  }
  return {{"kind", std::string(to_string(drive.kind()))},
          {"feasible", rep.feasible},
          {"min_omega_sq", triple_json(rep.min_omega_sq)},
          {"max_omega_sq", triple_json(rep.max_omega_sq)},
          {"argmin_t_s", triple_json(rep.argmin_t)},
          {"negative_intervals_s", intervals}};
}

json state_json(const ScalingState& s, const ObservableRecord& o, const StrokeSpec& spec) {
  AxisTriple scaled;
  for (int j = 0; j < kAxes; ++j) scaled[j] = s.bdot[j] / spec.omega0[j];
  return {{"t_s", s.t},
          {"b", triple_json(s.b)},
          {"bdot", triple_json(s.bdot)},
          {"bdot_over_omega0", triple_json(scaled)},
          {"c_q", s.cq},
          {"stress", triple_json(stress_diagonal(s.b, s.bdot))},
          {"q_star", o.q_star},
          {"energy_over_h0", o.mean_energy},
          {"work_over_h0", o.mean_work},
          {"z_over_x", o.z_over_x},
          {"r_over_z", o.r_over_z}};
}

}  // namespace

json design_scenario(const Scenario& sc) {
  validate_spec(sc.stroke, sc.gas);
  const FrequencySchedule schedule = build_schedule(sc);
  const DriveSchedule drive = build_drive(sc, schedule);
  const fs::path dir = sc.output_dir / sc.name;
  fs::create_directories(dir);

  std::ostringstream csv;
  write_header_block(csv, sc);
  csv << "t_s,omega_x,omega_y,omega_z,omega_sq_x,omega_sq_y,omega_sq_z\n";
  const auto fmt = detail::format_double;
  for (double t : uniform_grid(0.0, sc.stroke.tau, sc.stroke_samples)) {
    const auto w = schedule.at(t);
    const AxisTriple w2 = drive.omega_sq(t);
    csv << fmt(t);
    for (int j = 0; j < kAxes; ++j) csv << ',' << fmt(w[j].value);
    for (int j = 0; j < kAxes; ++j) csv << ',' << fmt(w2[j]);
    csv << '\n';
  }
  write_text(dir / "drive.csv", csv.str());

  const PathPoint adiabat = adiabatic_reference(schedule).at(sc.stroke.tau);
  json design = {{"name", sc.name},
                 {"config", to_json(sc)},
                 {"drive", feasibility_json(drive)},
                 {"adiabatic_b_tau", triple_json(adiabat.b)}};
  write_text(dir / "design.json", design.dump(2) + "\n");
  return design;
}

ScenarioResult run_scenario(const Scenario& sc) {
  validate_spec(sc.stroke, sc.gas);
  const FrequencySchedule schedule = build_schedule(sc);
  const DriveSchedule drive = build_drive(sc, schedule);

  IntegratorConfig cfg = sc.integrator;
  cfg.output_times.clear();
  cfg.sample_count = sc.stroke_samples;
  Trajectory traj = integrate(drive, sc.stroke, sc.gas, cfg);
  const std::size_t stroke_end = traj.samples.size() - 1;

  IntegratorConfig post_cfg = cfg;
  post_cfg.sample_count = sc.post_samples;
  if (sc.post == PostAction::Hold) {
    traj = continue_trajectory(traj, drive.with_post(PostStroke::Hold), sc.post_duration, post_cfg);
  } else if (sc.post == PostAction::Tof) {
    traj = tof_continuation(traj, sc.gas, sc.post_duration, post_cfg);
  }
  annotate(traj, schedule, drive);

  const PathPoint adiabat = adiabatic_reference(schedule).at(sc.stroke.tau);
  const double gamma_ad_23 = std::cbrt(adiabat.b.product() * adiabat.b.product());
  json summary = {
      {"name", sc.name},
      {"config", to_json(sc)},
      {"stroke_end", state_json(traj.samples[stroke_end], traj.observables[stroke_end], sc.stroke)},
      {"final", state_json(traj.samples.back(), traj.observables.back(), sc.stroke)},
      {"adiabatic_target", {{"b", triple_json(adiabat.b)}, {"work_over_h0", 1.0 / gamma_ad_23 - 1.0}}},
      {"drive", feasibility_json(drive)},
      {"samples", traj.samples.size()},
  };

  const fs::path dir = sc.output_dir / sc.name;
  fs::create_directories(dir);
  write_text(dir / "trajectory.csv", trajectory_csv(sc, traj, drive));
  write_text(dir / "observables.csv", observables_csv(sc, traj));
  write_text(dir / "summary.json", summary.dump(2) + "\n");
  return {sc.name, std::move(traj), std::move(summary), dir};
}

// ---------------------------------------------------------------------------
// Batches

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::Ok: return "ok";
    case RunStatus::ValidationError: return "validation_error";
    case RunStatus::NumericalError: return "numerical_error";
  }
  return "unknown";
}

std::vector<BatchEntry> run_batch(const std::vector<Scenario>& scenarios, unsigned parallelism,
                                  const fs::path& index_dir) {
  std::set<std::string> names;
  for (const auto& sc : scenarios) {
    if (!names.insert(sc.name).second) config_error("duplicate scenario name '" + sc.name + "' in batch");
  }

  std::vector<BatchEntry> entries(scenarios.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < scenarios.size(); i = next++) {
      const Scenario& sc = scenarios[i];
      BatchEntry& entry = entries[i];
      entry.name = sc.name;
      entry.directory = sc.output_dir / sc.name;
      try {
        ScenarioResult res = run_scenario(sc);
        entry.summary = std::move(res.summary);
      } catch (const Error& e) {
        entry.status = e.kind() == ErrorKind::Validation ? RunStatus::ValidationError
                                                         : RunStatus::NumericalError;
        entry.message = e.what();
      } catch (const std::exception& e) {
        entry.status = RunStatus::NumericalError;
        entry.message = e.what();
      }
    }
  };

  const unsigned threads = std::max(1u, std::min<unsigned>(parallelism, static_cast<unsigned>(scenarios.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  }

  json index = {{"scenarios", json::array()}};
  for (const auto& e : entries) {
    json item = {{"name", e.name}, {"status", std::string(to_string(e.status))}, {"directory", e.directory.string()}};
    if (!e.message.empty()) item["message"] = e.message;
    index["scenarios"].push_back(item);
  }
  fs::create_directories(index_dir);
  write_text(index_dir / "index.json", index.dump(2) + "\n");
  return entries;
}

std::vector<BatchEntry> run_sweep(const Scenario& base, unsigned parallelism) {
  const std::vector<Scenario> children = expand_sweep(base);
  const fs::path dir = base.output_dir / base.name;
  auto entries = run_batch(children, parallelism, dir);

  std::ostringstream csv;
  write_header_block(csv, base);
  csv << "name,status,tau_s,alpha_s,target_b_x,target_b_z,q_star_tau,work_tau,b_x_tau,b_z_tau,"
         "r_over_z_tau,t_final_s,b_x_final,b_z_final,r_over_z_final,c_q_final\n";
  const auto fmt = detail::format_double;
  for (std::size_t i = 0; i < children.size(); ++i) {
    const Scenario& sc = children[i];
    const BatchEntry& e = entries[i];
    csv << sc.name << ',' << to_string(e.status) << ',' << fmt(sc.stroke.tau) << ',' << fmt(sc.gas.alpha_s)
        << ',' << fmt(sc.stroke.target_b.x) << ',' << fmt(sc.stroke.target_b.z);
    if (e.status == RunStatus::Ok) {
      const json& end = e.summary["stroke_end"];
      const json& fin = e.summary["final"];
      auto num = [](const json& v) { return v.is_number() ? v.get<double>() : std::nan(""); };
      csv << ',' << fmt(num(end["q_star"])) << ',' << fmt(num(end["work_over_h0"])) << ','
          << fmt(num(end["b"][0])) << ',' << fmt(num(end["b"][2])) << ',' << fmt(num(end["r_over_z"]))
          << ',' << fmt(num(fin["t_s"])) << ',' << fmt(num(fin["b"][0])) << ',' << fmt(num(fin["b"][2]))
          << ',' << fmt(num(fin["r_over_z"])) << ',' << fmt(num(fin["c_q"]));
    } else {
      csv << ",,,,,,,,,,";
    }
    csv << '\n';
  }
  fs::create_directories(dir);
  write_text(dir / "sweep.csv", csv.str());
  return entries;
}

}  // namespace sta
