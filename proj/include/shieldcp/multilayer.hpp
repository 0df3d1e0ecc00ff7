#pragma once

// Planar multilayer optics on the imaginary frequency axis.  With omega = i xi
// every normal wavevector beta_j = sqrt(eps_j omega^2/c^2 - k^2) becomes
// i kappa_j with kappa_j real and positive, so all reflection and
// transmission coefficients are real and the phase factor exp(2 i beta d)
// turns into the decay exp(-2 kappa d).

#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "shieldcp/constants.hpp"
#include "shieldcp/materials.hpp"

namespace shieldcp {

enum class Polarization { TE, TM };

struct TransverseMode {
  Polarization polarization;
  double xi;     // imaginary frequency, rad/s
  double k_par;  // parallel wavevector, rad/m
};

struct Layer {
  DielectricModel material;
  double thickness = std::numeric_limits<double>::infinity();  // m; infinity = semi-infinite

  bool semi_infinite() const { return std::isinf(thickness); }
};

/// Ordered stack, atom side first.  The outermost two layers are
/// semi-infinite, inner layers have finite positive thickness.  A perfect
/// mirror is a separate kind with r_TE = -1, r_TM = +1 exactly.
class LayerStack {
 public:
  enum class Kind { layered, perfect_mirror };

  static LayerStack perfect_mirror() { return LayerStack(Kind::perfect_mirror, {}); }

  static LayerStack layered(std::vector<Layer> layers) {
    if (layers.size() < 2) throw std::invalid_argument("layer stack needs at least two layers");
    if (!layers.front().semi_infinite() || !layers.back().semi_infinite())
      throw std::invalid_argument("outermost layers of a stack must be semi-infinite");
    for (std::size_t i = 1; i + 1 < layers.size(); ++i) {
      if (!(layers[i].thickness > 0.0) || layers[i].semi_infinite())
        throw std::invalid_argument("inner layers need finite positive thickness");
    }
    return LayerStack(Kind::layered, std::move(layers));
  }

  /// [vacuum | material]
  static LayerStack half_space(const DielectricModel& material) {
    return layered({{DielectricModel::vacuum()}, {material}});
  }

  /// [vacuum | sheet(thickness) | vacuum]
  static LayerStack sheet(const DielectricModel& material, double thickness) {
    return layered({{DielectricModel::vacuum()}, {material, thickness}, {DielectricModel::vacuum()}});
  }

  /// [vacuum | shield(d_shield) | vacuum(gap) | backing]
  static LayerStack shielded_slab(const DielectricModel& shield, double d_shield, double gap,
                                  const DielectricModel& backing) {
    return layered({{DielectricModel::vacuum()},
                    {shield, d_shield},
                    {DielectricModel::vacuum(), gap},
                    {backing}});
  }

  Kind kind() const { return kind_; }
  bool is_perfect_mirror() const { return kind_ == Kind::perfect_mirror; }
  const std::vector<Layer>& layers() const { return layers_; }

  /// True when every layer is vacuum, i.e. nothing reflects.
  bool is_transparent() const {
    if (is_perfect_mirror()) return false;
    for (const auto& l : layers_)
      if (!l.material.is_vacuum()) return false;
    return true;
  }

 private:
  LayerStack(Kind k, std::vector<Layer> layers) : kind_(k), layers_(std::move(layers)) {}

  Kind kind_;
  std::vector<Layer> layers_;
};

/// kappa = sqrt(eps(i xi) xi^2 / c^2 + k_par^2).
inline double kappa(const DielectricModel& m, const TransverseMode& mode) {
  const double q = mode.xi / constants::speed_of_light;
  return std::sqrt(permittivity_imag(m, mode.xi) * q * q + mode.k_par * mode.k_par);
}

/// Single-interface reflection i -> j.
inline double fresnel_r(Polarization pol, double eps_i, double eps_j, double kappa_i, double kappa_j) {
  if (pol == Polarization::TE) return (kappa_i - kappa_j) / (kappa_i + kappa_j);
  return (eps_j * kappa_i - eps_i * kappa_j) / (eps_j * kappa_i + eps_i * kappa_j);
}

/// Single-interface transmission i -> j given r_ij.
inline double fresnel_t(Polarization pol, double eps_i, double eps_j, double r_ij) {
  if (pol == Polarization::TE) return 1.0 + r_ij;
  return eps_i / eps_j * (1.0 + r_ij);
}

/// Same transmission from the normal wavevectors directly; avoids the
/// cancellation in 1 + r_ij when r_ij is close to -1.
inline double fresnel_t(Polarization pol, double eps_i, double eps_j, double kappa_i, double kappa_j) {
  if (pol == Polarization::TE) return 2.0 * kappa_i / (kappa_i + kappa_j);
  return 2.0 * eps_i * kappa_i / (eps_j * kappa_i + eps_i * kappa_j);
}

/// Thrown when a composition denominator vanishes; impossible for passive media.
class SingularCompositionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Three-medium reflection r_ijk from the i-j and j-k interfaces separated
/// by a layer j of thickness d_j.
inline double compose_reflection(double r_ij, double t_ij, double t_ji, double r_ji, double r_jk,
                                 double kappa_j, double d_j) {
  if (!(d_j >= 0.0)) throw std::invalid_argument("compose_reflection: negative thickness");
  const double s = std::exp(-2.0 * kappa_j * d_j);
  const double denom = 1.0 - r_ji * r_jk * s;
  if (std::abs(denom) < 1e-14) throw SingularCompositionError("compose_reflection: singular denominator");
  return r_ij + t_ij * t_ji * r_jk * s / denom;
}

namespace detail {

struct LayerOptics {
  double eps;
  double kappa;
  double thickness;
};

inline std::vector<LayerOptics> layer_optics(const std::vector<Layer>& layers, const TransverseMode& mode) {
  std::vector<LayerOptics> out;
  out.reserve(layers.size());
  for (const auto& l : layers) out.push_back({permittivity_imag(l.material, mode.xi), kappa(l.material, mode), l.thickness});
  return out;
}

struct Interface {
  double r_ij, r_ji, t_ij, t_ji;
};

inline Interface interface(Polarization pol, const LayerOptics& i, const LayerOptics& j) {
  const double r_ij = fresnel_r(pol, i.eps, j.eps, i.kappa, j.kappa);
  const double r_ji = fresnel_r(pol, j.eps, i.eps, j.kappa, i.kappa);
  return {r_ij, r_ji, fresnel_t(pol, i.eps, j.eps, i.kappa, j.kappa), fresnel_t(pol, j.eps, i.eps, j.kappa, i.kappa)};
}

}  // namespace detail

/// Reflection of the whole stack seen from layer 0, by right-to-left
/// nesting of compose_reflection over the internal layers.
inline double stack_reflection(const LayerStack& stack, const TransverseMode& mode) {
  if (stack.is_perfect_mirror()) return mode.polarization == Polarization::TE ? -1.0 : 1.0;
  const auto optics = detail::layer_optics(stack.layers(), mode);
  const std::size_t n = optics.size();
  const auto pol = mode.polarization;
  double r = fresnel_r(pol, optics[n - 2].eps, optics[n - 1].eps, optics[n - 2].kappa, optics[n - 1].kappa);
  for (std::size_t j = n - 2; j-- > 0;) {
    const auto f = detail::interface(pol, optics[j], optics[j + 1]);
    r = compose_reflection(f.r_ij, f.t_ij, f.t_ji, f.r_ji, r, optics[j + 1].kappa, optics[j + 1].thickness);
  }
  return r;
}

/// True when `without` equals `with` minus its last layer, i.e. the backing
/// medium was retracted to infinity and the preceding layer extends forever.
inline bool differs_by_backing(const LayerStack& with, const LayerStack& without) {
  if (with.is_perfect_mirror() || without.is_perfect_mirror()) return false;
  const auto& a = with.layers();
  const auto& b = without.layers();
  if (a.size() < 3 || b.size() + 1 != a.size()) return false;
  for (std::size_t i = 0; i + 1 < b.size(); ++i) {
    if (!(a[i].material == b[i].material)) return false;
    if (a[i].thickness != b[i].thickness) return false;
  }
  return a[b.size() - 1].material == b.back().material;
}

/// r(with) - r(without) for stacks related by differs_by_backing, computed
/// without forming either reflection coefficient's leading digits twice.
/// Uses R/(1 - rho R S) - R'/(1 - rho R' S) = (R - R') / ((1 - rho R S)(1 - rho R' S)).
inline double stack_reflection_change(const LayerStack& with, const LayerStack& without, const TransverseMode& mode) {
  if (!differs_by_backing(with, without))
    throw std::invalid_argument("stack_reflection_change: stacks must differ only by the backing layer");
  const auto optics = detail::layer_optics(with.layers(), mode);
  const std::size_t n = optics.size();
  const auto pol = mode.polarization;

  // Innermost interface; the retracted stack has no interface there.
  double r_with = fresnel_r(pol, optics[n - 2].eps, optics[n - 1].eps, optics[n - 2].kappa, optics[n - 1].kappa);
  double r_without = 0.0;
  double delta = r_with;
  for (std::size_t j = n - 2; j-- > 0;) {
    const auto f = detail::interface(pol, optics[j], optics[j + 1]);
    const double s = std::exp(-2.0 * optics[j + 1].kappa * optics[j + 1].thickness);
    const double den_with = 1.0 - f.r_ji * r_with * s;
    const double den_without = 1.0 - f.r_ji * r_without * s;
    if (std::abs(den_with) < 1e-14 || std::abs(den_without) < 1e-14)
      throw SingularCompositionError("stack_reflection_change: singular denominator");
    delta = f.t_ij * f.t_ji * s * delta / (den_with * den_without);
    r_with = f.r_ij + f.t_ij * f.t_ji * r_with * s / den_with;
    r_without = f.r_ij + f.t_ij * f.t_ji * r_without * s / den_without;
  }
  return delta;
}

}  // namespace shieldcp
