#pragma once

// The four report commands.  Each builds a Dataset from a RunConfig; the
// caller decides where and in which format it is written.  Forces in every
// table are attraction magnitudes (positive = toward the shield/slab).

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "shieldcp/casimir_polder.hpp"
#include "shieldcp/cli/config.hpp"
#include "shieldcp/cli/dataset.hpp"
#include "shieldcp/experiment.hpp"
#include "shieldcp/materials.hpp"
#include "shieldcp/multilayer.hpp"
#include "shieldcp/yukawa.hpp"

namespace shieldcp::cli {

/// Evaluates fn(i) for i in [0, n) on up to `workers` threads.  Results are
/// stored by index, so the output does not depend on scheduling.  If any
/// call throws, the exception of the lowest failing index is rethrown.
template <class T, class Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t workers, Fn&& fn) {
  std::vector<T> out(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        out[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t nthreads = std::min(std::max<std::size_t>(workers, 1), std::max<std::size_t>(n, 1));
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(work);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

inline std::string config_hash(const RunConfig& c) { return hex64(fnv1a64(effective_config_json(c).dump())); }

inline Dataset make_dataset(const RunConfig& c, const std::string& command) {
  Dataset d;
  d.add_meta("tool", tool_version);
  d.add_meta("command", command);
  d.add_meta("config_hash", config_hash(c));
  d.add_meta("cp_rel_tol", format_number(c.cp.rel_tol));
  d.add_meta("cp_abs_tol", format_number(c.cp.abs_tol));
  d.add_meta("cubature_rel_tol", format_number(c.cubature.rel_tol));
  d.add_meta("slab_model", c.slab_model == SlabModel::cuboid ? "cuboid" : "infinite");
  d.add_meta("sign_convention", "forces are attraction magnitudes toward the surface");
  return d;
}

namespace detail {

inline double ratio(double a, double b) { return b != 0.0 ? a / b : std::numeric_limits<double>::quiet_NaN(); }

inline BudgetOptions budget_options(const RunConfig& c) { return {c.cp, c.slab_model, c.cubature}; }

}  // namespace detail

// ---------------------------------------------------------------------------

/// CP attraction of the shielded stack, the bare slab, and the reference
/// surfaces (isolated shield sheet, shield-material half-space, perfect
/// mirror) along z or d_vac.
inline Dataset cmd_cp_scan(const RunConfig& c) {
  Dataset d = make_dataset(c, "cp-scan");
  d.add_meta("scan_axis", c.cp_scan_axis);
  try {
    // The slab looks opaque at the atomic frequency once it is thicker than this.
    d.add_meta("slab_skin_depth_at_omega_ij",
               format_number(skin_depth(c.materials.slab, c.slab_conductivity, c.atom.omega_ij)) + " m");
  } catch (const std::domain_error&) {
    d.add_meta("slab_skin_depth_at_omega_ij", "undefined");
  }
  const bool along_z = c.cp_scan_axis == "z";
  d.columns = {{along_z ? "z" : "d_vac", "m"},
               {"F_cp_shielded", "N"},
               {"dF_cp_shielded", "N"},
               {"F_cp_unshielded", "N"},
               {"F_cp_sheet", "N"},
               {"F_cp_halfspace", "N"},
               {"F_cp_mirror", "N"},
               {"sheet_over_halfspace", "1"},
               {"sheet_over_mirror", "1"}};
  const auto xs = c.cp_scan.values();
  const auto mirror = LayerStack::perfect_mirror();
  const auto half = LayerStack::half_space(c.materials.shield);
  auto rows = parallel_map<std::vector<Cell>>(xs.size(), c.workers, [&](std::size_t i) {
    const auto g = along_z ? c.geometry.with_z(xs[i]) : c.geometry.with_d_vac(xs[i]);
    const double shielded = cp_attraction(c.atom, shielded_stack(g, c.materials), g.z, c.cp);
    const double delta = cp_delta_attraction(c.atom, g, c.materials, c.cp);
    const double bare = cp_attraction(c.atom, unshielded_stack(c.materials), unshielded_distance(g), c.cp);
    const double sheet = cp_attraction(c.atom, shield_only_stack(g, c.materials), g.z, c.cp);
    const double hs = cp_attraction(c.atom, half, g.z, c.cp);
    const double mir = cp_attraction(c.atom, mirror, g.z, c.cp);
    return std::vector<Cell>{xs[i],  shielded, delta, bare, sheet, hs, mir, detail::ratio(sheet, hs),
                             detail::ratio(sheet, mir)};
  });
  d.rows = std::move(rows);
  return d;
}

// ---------------------------------------------------------------------------

/// Force table over every (z, d_vac) pair, plus the Yukawa and CP changes
/// between two slab positions and the matching Bloch-frequency shifts.
inline Dataset cmd_force_budget(const RunConfig& c) {
  Dataset d = make_dataset(c, "budget");
  d.columns = {{"z", "m"}, {"d_vac", "m"}, {"Z_slab", "m"}};
  std::vector<std::string> labels;
  {
    // Row labels depend only on the Yukawa point names.
    for (const auto& p : c.yukawa_points) labels.push_back(p.label + "(Si)");
    for (const auto& p : c.yukawa_points) labels.push_back(p.label + "(Au)");
    for (const char* s : {"CP", "CP(Si)", "N(Si)", "N(Au)", "E"}) labels.emplace_back(s);
  }
  for (const auto& l : labels) {
    d.columns.push_back({"F_" + l, "N"});
    d.columns.push_back({"dF_" + l, "N"});
  }
  if (c.budget_shift) {
    d.add_meta("shift_d_vac_near", format_number(c.budget_shift->first));
    d.add_meta("shift_d_vac_far", format_number(c.budget_shift->second));
    for (const auto& p : c.yukawa_points) {
      d.columns.push_back({"shift_F_" + p.label, "N"});
      d.columns.push_back({"shift_nu_" + p.label, "Hz"});
    }
    d.columns.push_back({"shift_F_CP", "N"});
    d.columns.push_back({"shift_nu_CP", "Hz"});
  }

  struct Point {
    double z, d_vac;
  };
  std::vector<Point> pts;
  const auto dvs = c.budget_d_vac.values();
  for (double z : c.budget_z)
    for (double dv : dvs) pts.push_back({z, dv});

  const auto opt = detail::budget_options(c);
  d.rows = parallel_map<std::vector<Cell>>(pts.size(), c.workers, [&](std::size_t i) {
    const auto g = c.geometry.with_z(pts[i].z).with_d_vac(pts[i].d_vac);
    const auto budget = force_budget(g, c.atom, c.materials, c.yukawa_points, opt);
    std::vector<Cell> row{g.z, g.d_vac, g.Z()};
    for (const auto& l : labels) {
      const auto& r = budget.row(l);
      row.emplace_back(r.force);
      row.emplace_back(r.delta_force);
    }
    if (c.budget_shift) {
      const auto gn = g.with_d_vac(c.budget_shift->first);
      const auto gf = g.with_d_vac(c.budget_shift->second);
      for (const auto& p : c.yukawa_points) {
        const double fn = yukawa_slab_force(gn, c.atom.mass, p.params, c.slab_model, c.cubature);
        const double ff = yukawa_slab_force(gf, c.atom.mass, p.params, c.slab_model, c.cubature);
        row.emplace_back(fn - ff);
        row.emplace_back(bloch_frequency_shift(ff, fn, c.lattice));
      }
      // The shield term is common to both positions, so the CP shift is the
      // difference of the slab contributions (kept accurate by the difference route).
      const double dn = cp_delta_attraction(c.atom, gn, c.materials, c.cp);
      const double df = cp_delta_attraction(c.atom, gf, c.materials, c.cp);
      row.emplace_back(dn - df);
      row.emplace_back(bloch_frequency_shift(df, dn, c.lattice));
    }
    return row;
  });
  return d;
}

// ---------------------------------------------------------------------------

namespace detail {

struct OverlayPoint {
  std::string region;
  double lambda;
  double alpha;
};

/// Reads "region,lambda,alpha" lines; '#' lines and a header line are skipped.
inline std::vector<OverlayPoint> read_overlay(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open overlay file '" + path + "'");
  std::vector<OverlayPoint> out;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string region, lam, alpha;
    if (!std::getline(ss, region, ',') || !std::getline(ss, lam, ',') || !std::getline(ss, alpha)) {
      throw ConfigError(path + ":" + std::to_string(lineno) + ": expected region,lambda,alpha");
    }
    const bool header = std::exchange(first, false);
    try {
      out.push_back({region, std::stod(lam), std::stod(alpha)});
    } catch (const std::exception&) {
      if (header) continue;
      throw ConfigError(path + ":" + std::to_string(lineno) + ": lambda and alpha must be numbers");
    }
  }
  return out;
}

}  // namespace detail

/// Exclusion boundaries alpha(lambda) for each criterion, the classification
/// of each configured Yukawa point, and any overlay curves passed through.
inline Dataset cmd_exclusion(const RunConfig& c) {
  Dataset d = make_dataset(c, "exclusion");
  const auto g = c.geometry.with_z(c.exclusion_z).with_d_vac(c.exclusion_d_vac);
  d.add_meta("operating_z", format_number(g.z));
  d.add_meta("operating_d_vac", format_number(g.d_vac));
  d.columns = {{"kind", ""}, {"criterion", ""}, {"label", ""}, {"lambda", "m"}, {"alpha", "1"}, {"excluded", ""}};

  const auto crits = c.effective_criteria();
  const auto forces = parallel_map<double>(crits.size(), c.workers, [&](std::size_t i) {
    return criterion_force(crits[i].criterion, g, c.atom, c.materials, c.cp);
  });
  const auto grid = c.exclusion_lambda.values();

  for (std::size_t i = 0; i < crits.size(); ++i) {
    d.add_meta("criterion_force." + crits[i].label, format_number(forces[i]) + " N");
    const auto curve = exclusion_boundary(g, c.atom.mass, forces[i], grid, c.slab_model, c.cubature);
    for (const auto& p : curve.points)
      d.rows.push_back({std::string("boundary"), crits[i].label, std::string(""), p.lambda, p.alpha, std::string("")});
    for (double lam : curve.omitted_lambdas) {
      d.notes.push_back("criterion " + crits[i].label + ": lambda " + format_number(lam) +
                        " m omitted, slab Yukawa force underflows");
    }
  }
  for (std::size_t i = 0; i < crits.size(); ++i) {
    for (const auto& y : c.yukawa_points) {
      const bool ex = yukawa_slab_force(g, c.atom.mass, y.params, c.slab_model, c.cubature) > forces[i];
      d.rows.push_back({std::string("point"), crits[i].label, y.label, y.params.lambda, y.params.alpha,
                        std::string(ex ? "yes" : "no")});
    }
  }
  if (!c.overlay_path.empty()) {
    for (const auto& o : detail::read_overlay(c.overlay_path))
      d.rows.push_back({std::string("overlay"), o.region, std::string(""), o.lambda, o.alpha, std::string("")});
  }
  return d;
}

// ---------------------------------------------------------------------------

/// Bloch frequency, shift relative to the first listed force, recoil energy
/// and Wannier-Stark extent for each configured force, followed by the
/// force that corresponds to the frequency sensitivity.
inline Dataset cmd_bloch(const RunConfig& c) {
  Dataset d = make_dataset(c, "bloch");
  c.lattice.validate();
  d.add_meta("lattice_spacing", format_number(c.lattice.spacing) + " m");
  d.add_meta("sensitivity", format_number(c.sensitivity_hz) + " Hz");
  d.columns = {{"label", ""}, {"force", "N"},         {"nu_B", "Hz"},
               {"shift_from_first", "Hz"}, {"E_R", "J"}, {"w", "m"}};
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  bool need_budget = false;
  for (const auto& f : c.bloch_forces) need_budget |= f.budget_row.has_value();
  ForceBudget budget;
  if (need_budget) budget = force_budget(c.geometry, c.atom, c.materials, c.yukawa_points, detail::budget_options(c));

  const double er = recoil_energy(c.lattice, c.atom.mass);
  std::vector<double> forces;
  for (const auto& f : c.bloch_forces) {
    double force = 0.0;
    if (f.force) {
      force = *f.force;
    } else {
      try {
        force = budget.row(*f.budget_row).force;
      } catch (const std::out_of_range&) {
        throw ConfigError("bloch force '" + f.label + "' references unknown budget row '" + *f.budget_row + "'");
      }
    }
    forces.push_back(force);
  }

  bool flagged = false;
  for (std::size_t i = 0; i < forces.size(); ++i) {
    const double F = forces[i];
    const double nu = F > 0.0 ? bloch_frequency(F, c.lattice) : nan;
    const double w = F > 0.0 ? wannier_stark_width(c.lattice, c.atom.mass, F) : nan;
    flagged |= !(F > 0.0);
    const double shift = bloch_frequency_shift(forces.front(), F, c.lattice);
    d.rows.push_back({c.bloch_forces[i].label, F, nu, shift, er, w});
  }
  const double fs = force_for_bloch_frequency(c.sensitivity_hz, c.lattice);
  const double ws = fs > 0.0 ? wannier_stark_width(c.lattice, c.atom.mass, fs) : nan;
  d.rows.push_back({std::string("sensitivity"), fs, c.sensitivity_hz, nan, er, ws});
  if (flagged) d.notes.push_back("nu_B and w are undefined (nan) for non-positive forces");
  return d;
}

}  // namespace shieldcp::cli
