#pragma once

// Yukawa-modified gravity on a point mass m.  Every force returned here is
// an attraction magnitude: positive means the atom is pulled toward the
// body.  The point-pair potential follows the usual parameterisation
// U = G M m / r (1 + alpha exp(-r / lambda)), quoted without the overall
// minus sign; attraction for alpha > 0 is implied.

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "shieldcp/constants.hpp"
#include "shieldcp/quadrature.hpp"

namespace shieldcp {

struct YukawaParams {
  double alpha;   // dimensionless strength
  double lambda;  // range, m

  void validate() const {
    if (!(lambda > 0.0)) throw std::invalid_argument("Yukawa range lambda must be positive");
  }
};

/// Rectangular body of lateral sides a x b and thickness W, with the atom on
/// its lateral symmetry axis a distance Z from its centre.
struct Cuboid {
  double a;
  double b;
  double W;
  double rho;  // kg/m^3
  double Z;    // m

  void validate() const {
    if (!(a > 0.0 && b > 0.0 && W > 0.0)) throw std::invalid_argument("cuboid sides must be positive");
    if (!(rho >= 0.0)) throw std::invalid_argument("cuboid density must be >= 0");
    if (!(Z > 0.5 * W)) throw std::invalid_argument("atom must lie outside the cuboid (Z > W/2)");
  }
};

struct CubatureSpec {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  std::size_t max_subdivisions = 400;
};

struct CubatureResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::size_t evaluations = 0;
};

inline double yukawa_pair_potential(double M, double m, double r, const YukawaParams& p) {
  if (!(r > 0.0)) throw std::invalid_argument("yukawa_pair_potential: r must be positive");
  p.validate();
  return constants::newton_G * M * m / r * (1.0 + p.alpha * std::exp(-r / p.lambda));
}

/// Exact Yukawa force of a laterally infinite slab of thickness W whose
/// centre plane is a distance Z from the atom.
inline double yukawa_force_infinite_slab(double m, double rho, double W, double Z, const YukawaParams& p) {
  p.validate();
  if (!(Z > 0.5 * W)) throw std::invalid_argument("yukawa_force_infinite_slab: need Z > W/2");
  const double l = p.lambda;
  return 4.0 * constants::pi * p.alpha * constants::newton_G * l * m * rho * std::exp(-Z / l) *
         std::sinh(W / (2.0 * l));
}

enum class ForceComponent { normal, lateral_x };

namespace detail {

// Corner angles split the lateral polar integral into four pieces on which
// the ray from the axis hits a single side of the rectangle.
inline double ray_length(double a, double b, double theta) {
  const double c = std::abs(std::cos(theta));
  const double s = std::abs(std::sin(theta));
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double to_x = c > 0.0 ? 0.5 * a / c : inf;
  const double to_y = s > 0.0 ? 0.5 * b / s : inf;
  return std::min(to_x, to_y);
}

}  // namespace detail

/// Yukawa force component from a finite cuboid by adaptive cubature.
///
/// Depth h = Z - z' (distance from atom to a lamina) is the outer variable,
/// polar angle theta about the atom's foot is the middle one, and the
/// radial variable is the atom distance r = sqrt(s^2 + h^2), mapped as
/// q = 1 - exp(-(r - h) / lambda) so the exp(-r/lambda) decay is absorbed.
/// With s ds = r dr the normal component density becomes
///   (G m rho alpha / lambda) h (r + lambda) / r^2 exp(-r / lambda) dr dtheta dh.
/// Only the alpha-proportional (Yukawa) part is integrated.
inline CubatureResult yukawa_force_component_cuboid(double m, const Cuboid& c, const YukawaParams& p,
                                                    ForceComponent component, const CubatureSpec& spec = {}) {
  c.validate();
  p.validate();
  if (!(spec.rel_tol > 0.0)) throw std::invalid_argument("cubature rel_tol must be positive");
  const double l = p.lambda;
  const double prefactor = constants::newton_G * m * c.rho * p.alpha / l;
  if (prefactor == 0.0) return {};

  const double th_c = std::atan2(c.b, c.a);
  const std::array<double, 5> angle_breaks{-th_c, th_c, constants::pi - th_c, constants::pi + th_c,
                                           2.0 * constants::pi - th_c};

  const quad::Options radial_opt{spec.rel_tol * 1e-2, 0.0, spec.max_subdivisions};
  const quad::Options angle_opt{spec.rel_tol * 1e-1, 0.0, spec.max_subdivisions};
  const quad::Options depth_opt{spec.rel_tol * 0.5, spec.abs_tol / std::abs(prefactor), spec.max_subdivisions};
  std::size_t evaluations = 0;

  auto angular = [&](double h) -> std::array<double, 2> {
    // exp(-h / lambda) factored out of the radial integrand keeps it O(1).
    const double scale = std::exp(-h / l);
    if (scale == 0.0) return {0.0, 0.0};
    auto radial_at = [&](double theta) -> std::array<double, 2> {
      const double s_max = detail::ray_length(c.a, c.b, theta);
      const double r_max = std::hypot(s_max, h);
      const double q_max = -std::expm1(-(r_max - h) / l);
      const double cos_t = std::cos(theta);
      auto radial = [&](double q) {
        // r - h = -lambda log(1 - q); dr = lambda dq / (1 - q); exp(-r/l) dr = scale * lambda dq
        const double r = h - l * std::log1p(-q);
        const double shape = (r + l) / (r * r) * l;
        if (component == ForceComponent::normal) return h * shape;
        const double s = std::sqrt(std::max(0.0, (r - h) * (r + h)));
        return s * cos_t * shape;
      };
      const auto res = quad::integrate(radial, 0.0, q_max, radial_opt);
      evaluations += res.evaluations;
      return {res.value, res.error};
    };
    quad::Options opt = angle_opt;
    if (component == ForceComponent::lateral_x) {
      // The lateral integral cancels to zero, so measure it against the
      // magnitude of the normal integrand on the same lamina.
      const double ref = 2.0 * constants::pi * h * l * (h + l) / (h * h);
      opt.abs_tol = opt.rel_tol * ref;
    }
    const auto res = quad::integrate(radial_at, std::span<const double>(angle_breaks), opt);
    return {scale * res.value[0], scale * (res.error + std::abs(res.value[1]))};
  };

  quad::Options outer_opt = depth_opt;
  if (component == ForceComponent::lateral_x) {
    // Bound on the normal integral: nearest lamina's magnitude times thickness.
    const double h1 = c.Z - 0.5 * c.W;
    const double ref = 2.0 * constants::pi * l * (h1 + l) / h1 * std::exp(-h1 / l) * c.W;
    outer_opt.abs_tol = std::max(outer_opt.abs_tol, outer_opt.rel_tol * ref);
  }
  const auto res = quad::integrate(angular, c.Z - 0.5 * c.W, c.Z + 0.5 * c.W, outer_opt);
  CubatureResult out;
  out.value = prefactor * res.value[0];
  out.error_estimate = std::abs(prefactor) * (res.error + std::abs(res.value[1]));
  out.evaluations = res.evaluations + evaluations;
  const double tol = std::max(spec.abs_tol, spec.rel_tol * std::abs(out.value));
  if (component == ForceComponent::normal && !(out.error_estimate <= tol)) {
    char msg[160];
    std::snprintf(msg, sizeof msg, "yukawa_force_cuboid: cubature did not reach rel_tol %.1e at Z = %.3e m",
                  spec.rel_tol, c.Z);
    throw quad::NonConvergenceError(msg, out.value, out.error_estimate);
  }
  return out;
}

/// Normal (attractive) Yukawa force of a finite cuboid, atom on axis.
inline CubatureResult yukawa_force_cuboid(double m, const Cuboid& c, const YukawaParams& p,
                                          const CubatureSpec& spec = {}) {
  return yukawa_force_component_cuboid(m, c, p, ForceComponent::normal, spec);
}

/// Far-field point-mass Newtonian force of the cuboid, G a b W rho m / Z^2.
inline double newton_force_cuboid(double m, const Cuboid& c) {
  if (!(c.Z > 0.0)) throw std::invalid_argument("newton_force_cuboid: Z must be positive");
  return constants::newton_G * c.a * c.b * c.W * c.rho * m / (c.Z * c.Z);
}

/// Newtonian force of an infinite sheet of thickness d, 2 pi G rho d m,
/// independent of distance.
inline double newton_force_sheet(double m, double rho, double d) {
  if (!(d > 0.0)) throw std::invalid_argument("newton_force_sheet: thickness must be positive");
  return 2.0 * constants::pi * constants::newton_G * rho * d * m;
}

enum class SlabModel { infinite, cuboid };

/// Change in the slab's Yukawa force when the slab is withdrawn to infinity;
/// the withdrawn force vanishes, so this is the slab force itself.
inline double yukawa_delta_force(double m, const Cuboid& c, const YukawaParams& p, SlabModel model,
                                 const CubatureSpec& spec = {}) {
  if (model == SlabModel::infinite) return yukawa_force_infinite_slab(m, c.rho, c.W, c.Z, p);
  return yukawa_force_cuboid(m, c, p, spec).value;
}

/// The shield does not move, so its Yukawa force has no change.
inline constexpr double yukawa_shield_delta_force() { return 0.0; }

}  // namespace shieldcp
