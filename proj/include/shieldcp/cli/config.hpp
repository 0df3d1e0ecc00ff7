#pragma once

// Run configuration.  A JSON document with optional sections; any key left
// out takes the default below (rubidium in front of a 50 nm Drude-gold
// shield, 10 um silicon slab 100 um x 100 um).  All values are SI.
//
// {
//   "geometry":   { "z", "d_au", "d_vac", "slab_thickness", "slab_width", "slab_length",
//                   "rho_si", "rho_au", "g" },
//   "atom":       { "mu_ij", "omega_ij", "mass" },
//   "materials":  { "shield": {"kind": "drude", "omega_p", "gamma"},
//                   "slab":   {"kind": "constant", "eps"}, "slab_conductivity" },
//   "lattice":    { "spacing", "laser_wavenumber", "depth_in_recoils", "bandwidth_fraction" },
//   "yukawa_points": [ {"label", "alpha", "lambda"} ],
//   "tolerances": { "cp_rel_tol", "cp_abs_tol", "cp_max_subdivisions",
//                   "cubature_rel_tol", "cubature_max_subdivisions", "slab_model" },
//   "cp_scan":    { "axis": "z" | "d_vac", "min", "max", "points", "spacing": "log" | "linear" },
//   "budget":     { "z_values": [...], "d_vac": {"min", "max", "points", "spacing"},
//                   "shift": {"d_vac_near", "d_vac_far"} | null },
//   "exclusion":  { "z", "d_vac", "lambda": {"min", "max", "points", "spacing"},
//                   "criteria": [ {"label", "kind": "cp_delta", "shielded"} |
//                                 {"label", "kind": "fixed_force", "force" | "frequency_hz"} ],
//                   "overlay": "path.csv" },
//   "bloch":      { "forces": [ {"label", "force" | "budget_row"} ], "sensitivity_hz" },
//   "output":     { "path", "format": "csv" | "structured", "workers" }
// }

#include <cstddef>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "shieldcp/casimir_polder.hpp"
#include "shieldcp/experiment.hpp"
#include "shieldcp/materials.hpp"
#include "shieldcp/yukawa.hpp"

namespace shieldcp::cli {

/// Any problem with the configuration or command line (exit code 1).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Range {
  double min = 0.0;
  double max = 0.0;
  std::size_t points = 0;
  bool log = true;

  std::vector<double> values() const {
    if (points == 0) return {};
    if (log) return log_grid(min, max, points);
    std::vector<double> out(points);
    for (std::size_t i = 0; i < points; ++i)
      out[i] = points == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(points - 1);
    return out;
  }
};

struct CriterionConfig {
  std::string label;
  ExclusionCriterion criterion;
};

struct BlochForceConfig {
  std::string label;
  std::optional<double> force;
  std::optional<std::string> budget_row;
};

struct RunConfig {
  ExperimentGeometry geometry{};
  AtomModel atom = rubidium();
  Materials materials{};
  double slab_conductivity = 700.0;  // S/m, only for the skin-depth note
  LatticeSpec lattice{};
  std::vector<NamedYukawa> yukawa_points = reference_yukawa_points();
  CpQuadratureSpec cp{};
  CubatureSpec cubature{};
  SlabModel slab_model = SlabModel::infinite;

  std::string cp_scan_axis = "z";
  Range cp_scan{0.1e-6, 30e-6, 25, true};

  std::vector<double> budget_z{3e-6, 10e-6};
  Range budget_d_vac{2e-6, 30e-6, 15, true};
  std::optional<std::pair<double, double>> budget_shift = std::make_pair(2.5e-6, 20e-6);

  double exclusion_z = 3e-6;
  double exclusion_d_vac = 5e-6;
  Range exclusion_lambda{0.05e-6, 50e-6, 60, true};
  std::vector<CriterionConfig> criteria;  // empty -> defaults()
  std::string overlay_path;

  std::vector<BlochForceConfig> bloch_forces{{"earth", std::nullopt, std::string("E")}};
  double sensitivity_hz = 1e-4;

  std::string out_path;
  std::string format = "csv";
  std::size_t workers = 1;

  std::vector<CriterionConfig> effective_criteria() const {
    if (!criteria.empty()) return criteria;
    return {{"shielded_cp", CpDeltaCriterion{true}},
            {"unshielded_cp", CpDeltaCriterion{false}},
            {"sensitivity", FixedForceCriterion{force_for_bloch_frequency(sensitivity_hz, lattice)}}};
  }
};

namespace detail {

using json = nlohmann::json;

inline void check_keys(const json& j, const std::string& where, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!ok.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
  }
}

inline double num(const json& j, const char* key, double fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

inline std::size_t count(const json& j, const char* key, std::size_t fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 0)
    throw ConfigError(where + "." + key + " must be a non-negative integer");
  return v.get<std::size_t>();
}

inline std::string str(const json& j, const char* key, const std::string& fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_string()) throw ConfigError(where + "." + key + " must be a string");
  return v.get<std::string>();
}

inline Range range(const json& j, Range r, const std::string& where) {
  check_keys(j, where, {"min", "max", "points", "spacing"});
  r.min = num(j, "min", r.min, where);
  r.max = num(j, "max", r.max, where);
  r.points = count(j, "points", r.points, where);
  const auto spacing = str(j, "spacing", r.log ? "log" : "linear", where);
  if (spacing != "log" && spacing != "linear") throw ConfigError(where + ".spacing must be 'log' or 'linear'");
  r.log = spacing == "log";
  if (r.points > 0 && !(r.min > 0.0 && r.max >= r.min)) throw ConfigError(where + " needs 0 < min <= max");
  return r;
}

inline DielectricModel material(const json& j, const DielectricModel& fallback, const std::string& where) {
  check_keys(j, where, {"kind", "eps", "omega_p", "gamma"});
  const auto kind = str(j, "kind", "", where);
  try {
    if (kind == "vacuum") return DielectricModel::vacuum();
    if (kind == "constant") return DielectricModel::constant(num(j, "eps", fallback.eps_const, where));
    if (kind == "drude") {
      const double wp = num(j, "omega_p", fallback.kind == DielectricModel::Kind::drude ? fallback.omega_p : 1.38e16, where);
      const double ga = num(j, "gamma", fallback.kind == DielectricModel::Kind::drude ? fallback.gamma : 4.08e13, where);
      return DielectricModel::drude(wp, ga);
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
  if (kind.empty()) throw ConfigError(where + ".kind is required (vacuum | constant | drude)");
  throw ConfigError(where + ".kind must be vacuum, constant or drude");
}

}  // namespace detail

/// Parses a configuration document on top of the defaults.
inline RunConfig parse_config(const nlohmann::json& j) {
  using namespace detail;
  RunConfig c;
  check_keys(j, "config", {"geometry", "atom", "materials", "lattice", "yukawa_points", "tolerances", "cp_scan",
                           "budget", "exclusion", "bloch", "output"});

  if (j.contains("geometry")) {
    const auto& g = j["geometry"];
    const std::string w = "geometry";
    check_keys(g, w, {"z", "d_au", "d_vac", "slab_thickness", "slab_width", "slab_length", "rho_si", "rho_au", "g"});
    auto& o = c.geometry;
    o.z = num(g, "z", o.z, w);
    o.d_au = num(g, "d_au", o.d_au, w);
    o.d_vac = num(g, "d_vac", o.d_vac, w);
    o.slab_thickness = num(g, "slab_thickness", o.slab_thickness, w);
    o.slab_width = num(g, "slab_width", o.slab_width, w);
    o.slab_length = num(g, "slab_length", o.slab_length, w);
    o.rho_si = num(g, "rho_si", o.rho_si, w);
    o.rho_au = num(g, "rho_au", o.rho_au, w);
    o.g = num(g, "g", o.g, w);
  }
  if (j.contains("atom")) {
    const auto& a = j["atom"];
    check_keys(a, "atom", {"mu_ij", "omega_ij", "mass"});
    c.atom.mu_ij = num(a, "mu_ij", c.atom.mu_ij, "atom");
    c.atom.omega_ij = num(a, "omega_ij", c.atom.omega_ij, "atom");
    c.atom.mass = num(a, "mass", c.atom.mass, "atom");
  }
  if (j.contains("materials")) {
    const auto& m = j["materials"];
    check_keys(m, "materials", {"shield", "slab", "slab_conductivity"});
    if (m.contains("shield")) c.materials.shield = material(m["shield"], c.materials.shield, "materials.shield");
    if (m.contains("slab")) c.materials.slab = material(m["slab"], c.materials.slab, "materials.slab");
    c.slab_conductivity = num(m, "slab_conductivity", c.slab_conductivity, "materials");
  }
  if (j.contains("lattice")) {
    const auto& l = j["lattice"];
    check_keys(l, "lattice", {"spacing", "laser_wavenumber", "depth_in_recoils", "bandwidth_fraction"});
    c.lattice.spacing = num(l, "spacing", c.lattice.spacing, "lattice");
    c.lattice.laser_wavenumber = num(l, "laser_wavenumber", c.lattice.laser_wavenumber, "lattice");
    c.lattice.depth_in_recoils = num(l, "depth_in_recoils", c.lattice.depth_in_recoils, "lattice");
    c.lattice.bandwidth_fraction = num(l, "bandwidth_fraction", c.lattice.bandwidth_fraction, "lattice");
  }
  if (j.contains("yukawa_points")) {
    const auto& ys = j["yukawa_points"];
    if (!ys.is_array()) throw ConfigError("yukawa_points must be an array");
    c.yukawa_points.clear();
    for (std::size_t i = 0; i < ys.size(); ++i) {
      const std::string w = "yukawa_points[" + std::to_string(i) + "]";
      check_keys(ys[i], w, {"label", "alpha", "lambda"});
      if (!ys[i].contains("alpha") || !ys[i].contains("lambda")) throw ConfigError(w + " needs alpha and lambda");
      c.yukawa_points.push_back({str(ys[i], "label", "Y" + std::to_string(i + 1), w),
                                 {num(ys[i], "alpha", 0.0, w), num(ys[i], "lambda", 0.0, w)}});
    }
  }
  if (j.contains("tolerances")) {
    const auto& t = j["tolerances"];
    const std::string w = "tolerances";
    check_keys(t, w, {"cp_rel_tol", "cp_abs_tol", "cp_max_subdivisions", "cubature_rel_tol",
                      "cubature_max_subdivisions", "slab_model"});
    c.cp.rel_tol = num(t, "cp_rel_tol", c.cp.rel_tol, w);
    c.cp.abs_tol = num(t, "cp_abs_tol", c.cp.abs_tol, w);
    c.cp.max_subdivisions = count(t, "cp_max_subdivisions", c.cp.max_subdivisions, w);
    c.cubature.rel_tol = num(t, "cubature_rel_tol", c.cubature.rel_tol, w);
    c.cubature.max_subdivisions = count(t, "cubature_max_subdivisions", c.cubature.max_subdivisions, w);
    const auto model = str(t, "slab_model", "infinite", w);
    if (model != "infinite" && model != "cuboid") throw ConfigError("tolerances.slab_model must be infinite or cuboid");
    c.slab_model = model == "cuboid" ? SlabModel::cuboid : SlabModel::infinite;
  }
  if (j.contains("cp_scan")) {
    const auto& s = j["cp_scan"];
    check_keys(s, "cp_scan", {"axis", "min", "max", "points", "spacing"});
    c.cp_scan_axis = str(s, "axis", c.cp_scan_axis, "cp_scan");
    if (c.cp_scan_axis != "z" && c.cp_scan_axis != "d_vac") throw ConfigError("cp_scan.axis must be 'z' or 'd_vac'");
    auto rest = s;
    rest.erase("axis");
    c.cp_scan = range(rest, c.cp_scan, "cp_scan");
  }
  if (j.contains("budget")) {
    const auto& b = j["budget"];
    check_keys(b, "budget", {"z_values", "d_vac", "shift"});
    if (b.contains("z_values")) {
      if (!b["z_values"].is_array()) throw ConfigError("budget.z_values must be an array");
      c.budget_z.clear();
      for (const auto& v : b["z_values"]) {
        if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError("budget.z_values must be positive numbers");
        c.budget_z.push_back(v.get<double>());
      }
    }
    if (b.contains("d_vac")) c.budget_d_vac = range(b["d_vac"], c.budget_d_vac, "budget.d_vac");
    if (b.contains("shift")) {
      if (b["shift"].is_null()) {
        c.budget_shift.reset();
      } else {
        check_keys(b["shift"], "budget.shift", {"d_vac_near", "d_vac_far"});
        const double near = num(b["shift"], "d_vac_near", 2.5e-6, "budget.shift");
        const double far = num(b["shift"], "d_vac_far", 20e-6, "budget.shift");
        if (!(near > 0.0 && far > 0.0)) throw ConfigError("budget.shift distances must be positive");
        c.budget_shift = std::make_pair(near, far);
      }
    }
  }
  if (j.contains("exclusion")) {
    const auto& e = j["exclusion"];
    check_keys(e, "exclusion", {"z", "d_vac", "lambda", "criteria", "overlay"});
    c.exclusion_z = num(e, "z", c.exclusion_z, "exclusion");
    c.exclusion_d_vac = num(e, "d_vac", c.exclusion_d_vac, "exclusion");
    if (e.contains("lambda")) c.exclusion_lambda = range(e["lambda"], c.exclusion_lambda, "exclusion.lambda");
    c.overlay_path = str(e, "overlay", "", "exclusion");
    if (e.contains("criteria")) {
      const auto& cs = e["criteria"];
      if (!cs.is_array()) throw ConfigError("exclusion.criteria must be an array");
      for (std::size_t i = 0; i < cs.size(); ++i) {
        const std::string w = "exclusion.criteria[" + std::to_string(i) + "]";
        check_keys(cs[i], w, {"label", "kind", "shielded", "force", "frequency_hz"});
        const auto kind = str(cs[i], "kind", "", w);
        const auto label = str(cs[i], "label", "criterion" + std::to_string(i + 1), w);
        if (kind == "cp_delta") {
          bool shielded = true;
          if (cs[i].contains("shielded")) {
            if (!cs[i]["shielded"].is_boolean()) throw ConfigError(w + ".shielded must be a boolean");
            shielded = cs[i]["shielded"].get<bool>();
          }
          c.criteria.push_back({label, CpDeltaCriterion{shielded}});
        } else if (kind == "fixed_force") {
          double f = 0.0;
          if (cs[i].contains("force"))
            f = num(cs[i], "force", 0.0, w);
          else if (cs[i].contains("frequency_hz"))
            f = force_for_bloch_frequency(num(cs[i], "frequency_hz", 0.0, w), c.lattice);
          else
            throw ConfigError(w + " needs force or frequency_hz");
          if (!(f >= 0.0)) throw ConfigError(w + " force must be >= 0");
          c.criteria.push_back({label, FixedForceCriterion{f}});
        } else {
          throw ConfigError(w + ".kind must be cp_delta or fixed_force");
        }
      }
    }
  }
  if (j.contains("bloch")) {
    const auto& b = j["bloch"];
    check_keys(b, "bloch", {"forces", "sensitivity_hz"});
    c.sensitivity_hz = num(b, "sensitivity_hz", c.sensitivity_hz, "bloch");
    if (b.contains("forces")) {
      if (!b["forces"].is_array()) throw ConfigError("bloch.forces must be an array");
      c.bloch_forces.clear();
      for (std::size_t i = 0; i < b["forces"].size(); ++i) {
        const auto& f = b["forces"][i];
        const std::string w = "bloch.forces[" + std::to_string(i) + "]";
        check_keys(f, w, {"label", "force", "budget_row"});
        BlochForceConfig bf;
        bf.label = str(f, "label", "force" + std::to_string(i + 1), w);
        if (f.contains("force")) bf.force = num(f, "force", 0.0, w);
        if (f.contains("budget_row")) bf.budget_row = str(f, "budget_row", "", w);
        if (bf.force.has_value() == bf.budget_row.has_value())
          throw ConfigError(w + " needs exactly one of force or budget_row");
        c.bloch_forces.push_back(std::move(bf));
      }
    }
  }
  if (j.contains("output")) {
    const auto& o = j["output"];
    check_keys(o, "output", {"path", "format", "workers"});
    c.out_path = str(o, "path", c.out_path, "output");
    c.format = str(o, "format", c.format, "output");
    c.workers = count(o, "workers", c.workers, "output");
  }

  try {
    c.geometry.validate();
    c.atom.validate();
    c.lattice.validate();
    c.cp.validate();
    for (const auto& y : c.yukawa_points) y.params.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  } catch (const std::domain_error& e) {
    throw ConfigError(e.what());
  }
  if (!(c.cubature.rel_tol > 0.0)) throw ConfigError("tolerances.cubature_rel_tol must be positive");
  if (c.format != "csv" && c.format != "structured") throw ConfigError("output.format must be csv or structured");
  if (c.workers == 0) throw ConfigError("output.workers must be >= 1");
  return c;
}

inline RunConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

namespace detail {

inline nlohmann::ordered_json material_json(const DielectricModel& m) {
  switch (m.kind) {
    case DielectricModel::Kind::vacuum:
      return {{"kind", "vacuum"}};
    case DielectricModel::Kind::constant:
      return {{"kind", "constant"}, {"eps", m.eps_const}};
    case DielectricModel::Kind::drude:
      return {{"kind", "drude"}, {"omega_p", m.omega_p}, {"gamma", m.gamma}};
  }
  return {};
}

inline nlohmann::ordered_json range_json(const Range& r) {
  return {{"min", r.min}, {"max", r.max}, {"points", r.points}, {"spacing", r.log ? "log" : "linear"}};
}

}  // namespace detail

/// The effective configuration, every field spelled out.  Output-only
/// settings (path, workers) are left out so they do not change the hash.
inline nlohmann::ordered_json effective_config_json(const RunConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  const auto& g = c.geometry;
  j["geometry"] = {{"z", g.z},           {"d_au", g.d_au},           {"d_vac", g.d_vac},
                   {"slab_thickness", g.slab_thickness}, {"slab_width", g.slab_width},
                   {"slab_length", g.slab_length},       {"rho_si", g.rho_si}, {"rho_au", g.rho_au}, {"g", g.g}};
  j["atom"] = {{"mu_ij", c.atom.mu_ij}, {"omega_ij", c.atom.omega_ij}, {"mass", c.atom.mass}};
  j["materials"] = {{"shield", detail::material_json(c.materials.shield)},
                    {"slab", detail::material_json(c.materials.slab)},
                    {"slab_conductivity", c.slab_conductivity}};
  j["lattice"] = {{"spacing", c.lattice.spacing},
                  {"laser_wavenumber", c.lattice.laser_wavenumber},
                  {"depth_in_recoils", c.lattice.depth_in_recoils},
                  {"bandwidth_fraction", c.lattice.bandwidth_fraction}};
  auto ys = ordered_json::array();
  for (const auto& y : c.yukawa_points)
    ys.push_back({{"label", y.label}, {"alpha", y.params.alpha}, {"lambda", y.params.lambda}});
  j["yukawa_points"] = ys;
  j["tolerances"] = {{"cp_rel_tol", c.cp.rel_tol},
                     {"cp_abs_tol", c.cp.abs_tol},
                     {"cp_max_subdivisions", c.cp.max_subdivisions},
                     {"cubature_rel_tol", c.cubature.rel_tol},
                     {"cubature_max_subdivisions", c.cubature.max_subdivisions},
                     {"slab_model", c.slab_model == SlabModel::cuboid ? "cuboid" : "infinite"}};
  auto scan = detail::range_json(c.cp_scan);
  scan["axis"] = c.cp_scan_axis;
  j["cp_scan"] = scan;
  ordered_json budget = {{"z_values", c.budget_z}, {"d_vac", detail::range_json(c.budget_d_vac)}};
  budget["shift"] = c.budget_shift ? ordered_json{{"d_vac_near", c.budget_shift->first},
                                                  {"d_vac_far", c.budget_shift->second}}
                                   : ordered_json(nullptr);
  j["budget"] = budget;
  auto crit = ordered_json::array();
  for (const auto& cc : c.effective_criteria()) {
    if (const auto* f = std::get_if<FixedForceCriterion>(&cc.criterion))
      crit.push_back({{"label", cc.label}, {"kind", "fixed_force"}, {"force", f->force}});
    else
      crit.push_back({{"label", cc.label},
                      {"kind", "cp_delta"},
                      {"shielded", std::get<CpDeltaCriterion>(cc.criterion).shielded}});
  }
  j["exclusion"] = {{"z", c.exclusion_z},
                    {"d_vac", c.exclusion_d_vac},
                    {"lambda", detail::range_json(c.exclusion_lambda)},
                    {"criteria", crit},
                    {"overlay", c.overlay_path}};
  auto forces = ordered_json::array();
  for (const auto& f : c.bloch_forces) {
    ordered_json e = {{"label", f.label}};
    if (f.force) e["force"] = *f.force;
    if (f.budget_row) e["budget_row"] = *f.budget_row;
    forces.push_back(e);
  }
  j["bloch"] = {{"forces", forces}, {"sensitivity_hz", c.sensitivity_hz}};
  j["output"] = {{"format", c.format}};
  return j;
}

}  // namespace shieldcp::cli
