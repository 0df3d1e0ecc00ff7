#pragma once

// Force budget of an atom held a distance z in front of a gold shield, with
// a movable silicon slab behind a vacuum gap, and the Bloch-oscillation
// observables built on it.
//
//   atom --z-- | shield d_au | --d_vac-- | slab W (a x b) |
//
// All budget forces are attraction magnitudes toward the shield/slab side
// (positive = pulled toward the surface).  Earth's weight m g is taken along
// the same direction.  "delta" is the change when the slab is withdrawn to
// infinity.

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "shieldcp/casimir_polder.hpp"
#include "shieldcp/constants.hpp"
#include "shieldcp/materials.hpp"
#include "shieldcp/multilayer.hpp"
#include "shieldcp/yukawa.hpp"

namespace shieldcp {

struct ExperimentGeometry {
  double z = 3e-6;                 // atom to shield
  double d_au = 50e-9;             // shield thickness
  double d_vac = 5e-6;             // shield to slab gap
  double slab_thickness = 10e-6;   // W
  double slab_width = 100e-6;      // a
  double slab_length = 100e-6;     // b
  double rho_si = 2330.0;
  double rho_au = 19300.0;
  double g = 9.81;

  /// Atom to slab centre.
  double Z() const { return d_vac + d_au + z + 0.5 * slab_thickness; }

  ExperimentGeometry with_d_vac(double v) const {
    auto out = *this;
    out.d_vac = v;
    return out;
  }
  ExperimentGeometry with_z(double v) const {
    auto out = *this;
    out.z = v;
    return out;
  }

  void validate() const {
    const double fields[] = {z, d_au, d_vac, slab_thickness, slab_width, slab_length, g};
    for (double f : fields)
      if (!(f > 0.0)) throw std::invalid_argument("experiment geometry lengths and g must be positive");
    if (!(rho_si >= 0.0) || !(rho_au >= 0.0)) throw std::invalid_argument("densities must be >= 0");
  }

  Cuboid slab() const { return {slab_width, slab_length, slab_thickness, rho_si, Z()}; }
};

struct Materials {
  DielectricModel shield = gold_drude();
  DielectricModel slab = silicon_constant();
};

struct NamedYukawa {
  std::string label;
  YukawaParams params;
};

inline std::vector<NamedYukawa> reference_yukawa_points() {
  return {{"Y1", {1e9, 2e-6}}, {"Y2", {1e6, 2e-6}}, {"Y3", {1e9, 0.5e-6}}, {"Y4", {1e6, 0.5e-6}}};
}

inline LayerStack shielded_stack(const ExperimentGeometry& g, const Materials& m) {
  return LayerStack::shielded_slab(m.shield, g.d_au, g.d_vac, m.slab);
}
inline LayerStack shield_only_stack(const ExperimentGeometry& g, const Materials& m) {
  return LayerStack::sheet(m.shield, g.d_au);
}
/// The slab alone (shield replaced by vacuum) is a half-space at z + d_au + d_vac.
inline LayerStack unshielded_stack(const Materials& m) { return LayerStack::half_space(m.slab); }
inline double unshielded_distance(const ExperimentGeometry& g) { return g.z + g.d_au + g.d_vac; }

struct BudgetRow {
  std::string label;
  double force = 0.0;
  double delta_force = 0.0;
};

struct ForceBudget {
  std::vector<BudgetRow> rows;

  const BudgetRow& row(const std::string& label) const {
    for (const auto& r : rows)
      if (r.label == label) return r;
    throw std::out_of_range("force budget has no row " + label);
  }
};

struct BudgetOptions {
  CpQuadratureSpec cp{};
  SlabModel slab_model = SlabModel::infinite;
  CubatureSpec cubature{};
};

/// Attraction toward the slab side of the shielded-stack CP force.
inline double cp_attraction(const AtomModel& atom, const LayerStack& stack, double z, const CpQuadratureSpec& spec) {
  return -cp_force(atom, stack, z, spec).value;
}

/// Change in CP attraction when the slab is withdrawn (shield kept).
inline double cp_delta_attraction(const AtomModel& atom, const ExperimentGeometry& g, const Materials& m,
                                  const CpQuadratureSpec& spec) {
  return -cp_delta_force(atom, shielded_stack(g, m), shield_only_stack(g, m), g.z, spec).value;
}

/// Yukawa force of the shield, as an infinite sheet whose centre is z + d_au/2 away.
inline double yukawa_shield_force(const ExperimentGeometry& g, double mass, const YukawaParams& p) {
  return yukawa_force_infinite_slab(mass, g.rho_au, g.d_au, g.z + 0.5 * g.d_au, p);
}

inline double yukawa_slab_force(const ExperimentGeometry& g, double mass, const YukawaParams& p,
                                SlabModel model, const CubatureSpec& cubature = {}) {
  return yukawa_delta_force(mass, g.slab(), p, model, cubature);
}

/// Every row of the force table.  Row labels: "<Yi>(Si)", "<Yi>(Au)", "CP",
/// "CP(Si)", "N(Si)", "N(Au)", "E".
inline ForceBudget force_budget(const ExperimentGeometry& g, const AtomModel& atom, const Materials& mats,
                                const std::vector<NamedYukawa>& points, const BudgetOptions& opt = {}) {
  g.validate();
  atom.validate();
  ForceBudget out;
  const double m = atom.mass;
  for (const auto& p : points) {
    const double f = yukawa_slab_force(g, m, p.params, opt.slab_model, opt.cubature);
    out.rows.push_back({p.label + "(Si)", f, f});
  }
  for (const auto& p : points) {
    out.rows.push_back({p.label + "(Au)", yukawa_shield_force(g, m, p.params), yukawa_shield_delta_force()});
  }
  out.rows.push_back({"CP", cp_attraction(atom, shielded_stack(g, mats), g.z, opt.cp),
                      cp_delta_attraction(atom, g, mats, opt.cp)});
  const double cp_si = cp_attraction(atom, unshielded_stack(mats), unshielded_distance(g), opt.cp);
  out.rows.push_back({"CP(Si)", cp_si, cp_si});
  const double n_si = newton_force_cuboid(m, g.slab());
  out.rows.push_back({"N(Si)", n_si, n_si});
  out.rows.push_back({"N(Au)", newton_force_sheet(m, g.rho_au, g.d_au), 0.0});
  out.rows.push_back({"E", m * g.g, 0.0});
  return out;
}

// ---------------------------------------------------------------------------
// Bloch oscillations

struct LatticeSpec {
  double spacing = 500e-9;                                     // m
  double laser_wavenumber = 2.0 * constants::pi / 500e-9;      // rad/m
  double depth_in_recoils = 5.0;
  double bandwidth_fraction = 0.26;                            // first-band width / E_R

  void validate() const {
    if (!(spacing > 0.0) || !(depth_in_recoils > 0.0) || !(laser_wavenumber > 0.0) || !(bandwidth_fraction >= 0.0))
      throw std::invalid_argument("lattice spacing, wavenumber and depth must be positive");
  }
};

/// nu_B = F a / (2 pi hbar)
inline double bloch_frequency(double force, const LatticeSpec& lattice) {
  if (!(force > 0.0)) throw std::domain_error("bloch_frequency: force must be positive");
  return force * lattice.spacing / (2.0 * constants::pi * constants::hbar);
}

/// Force whose Bloch frequency is nu.
inline double force_for_bloch_frequency(double nu, const LatticeSpec& lattice) {
  return 2.0 * constants::pi * constants::hbar * nu / lattice.spacing;
}

/// Signed shift [F_f - F_i] a / (2 pi hbar).
inline double bloch_frequency_shift(double force_initial, double force_final, const LatticeSpec& lattice) {
  return (force_final - force_initial) * lattice.spacing / (2.0 * constants::pi * constants::hbar);
}

/// E_R = hbar^2 k_L^2 / 2m
inline double recoil_energy(const LatticeSpec& lattice, double mass) {
  if (!(mass > 0.0)) throw std::domain_error("recoil_energy: mass must be positive");
  const double hk = constants::hbar * lattice.laser_wavenumber;
  return hk * hk / (2.0 * mass);
}

/// Spatial extent of a Bloch cycle, w = (bandwidth_fraction E_R) / (2F).
inline double wannier_stark_width(const LatticeSpec& lattice, double mass, double force) {
  if (!(force > 0.0)) throw std::domain_error("wannier_stark_width: force must be positive");
  return lattice.bandwidth_fraction * recoil_energy(lattice, mass) / (2.0 * force);
}

// ---------------------------------------------------------------------------
// Exclusion boundaries

struct CpDeltaCriterion {
  bool shielded = true;
};
struct FixedForceCriterion {
  double force;  // N
};
using ExclusionCriterion = std::variant<CpDeltaCriterion, FixedForceCriterion>;

struct BoundaryPoint {
  double lambda;
  double alpha;
};

struct ExclusionCurve {
  double criterion_force = 0.0;         // N
  std::vector<BoundaryPoint> points;
  std::vector<double> omitted_lambdas;  // unit-alpha slab force underflowed
};

/// The force a Yukawa signal must beat: |delta F_CP| with or without the
/// shield, or a fixed instrument sensitivity.
inline double criterion_force(const ExclusionCriterion& c, const ExperimentGeometry& g, const AtomModel& atom,
                              const Materials& mats, const CpQuadratureSpec& spec) {
  if (const auto* f = std::get_if<FixedForceCriterion>(&c)) return f->force;
  if (std::get<CpDeltaCriterion>(c).shielded) return std::abs(cp_delta_attraction(atom, g, mats, spec));
  // Without a shield, withdrawing the slab removes the whole CP force.
  return std::abs(cp_attraction(atom, unshielded_stack(mats), unshielded_distance(g), spec));
}

/// alpha(lambda) on which the slab's Yukawa delta F equals the criterion
/// force.  Linear in alpha, so alpha = F_crit / delta F_Y(alpha = 1).
inline ExclusionCurve exclusion_boundary(const ExperimentGeometry& g, double mass, double crit_force,
                                         const std::vector<double>& lambda_grid,
                                         SlabModel model = SlabModel::infinite, const CubatureSpec& cubature = {}) {
  g.validate();
  for (std::size_t i = 0; i < lambda_grid.size(); ++i) {
    if (!(lambda_grid[i] > 0.0)) throw std::invalid_argument("exclusion_boundary: lambda grid must be positive");
    if (i > 0 && !(lambda_grid[i] > lambda_grid[i - 1]))
      throw std::invalid_argument("exclusion_boundary: lambda grid must ascend");
  }
  ExclusionCurve out;
  out.criterion_force = crit_force;
  for (double lam : lambda_grid) {
    const double unit = yukawa_slab_force(g, mass, {1.0, lam}, model, cubature);
    if (!(unit > 0.0) || !std::isfinite(crit_force / unit)) {
      out.omitted_lambdas.push_back(lam);
      continue;
    }
    out.points.push_back({lam, crit_force / unit});
  }
  return out;
}

inline ExclusionCurve exclusion_boundary(const ExperimentGeometry& g, const AtomModel& atom, const Materials& mats,
                                         const std::vector<double>& lambda_grid, const ExclusionCriterion& criterion,
                                         const CpQuadratureSpec& spec = {}) {
  return exclusion_boundary(g, atom.mass, criterion_force(criterion, g, atom, mats, spec), lambda_grid);
}

/// A Yukawa point is distinguishable when its slab delta F exceeds the criterion force.
inline bool is_excluded(const ExperimentGeometry& g, double mass, const YukawaParams& p, double crit_force,
                        SlabModel model = SlabModel::infinite) {
  return yukawa_slab_force(g, mass, p, model) > crit_force;
}

/// n log-spaced points over [lo, hi].
inline std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (!(lo > 0.0 && hi >= lo)) throw std::invalid_argument("log_grid: need 0 < lo <= hi");
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = std::log(hi / lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo * std::exp(step * static_cast<double>(i));
  out.back() = hi;
  return out;
}

inline std::vector<double> default_lambda_grid() { return log_grid(0.05e-6, 50e-6, 60); }

}  // namespace shieldcp
