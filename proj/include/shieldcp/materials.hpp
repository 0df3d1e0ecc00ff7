#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>

#include "shieldcp/constants.hpp"

namespace shieldcp {

/// Relative permittivity model.  Casimir-Polder work only ever needs the
/// imaginary-frequency axis; the real axis is used by skin_depth alone.
struct DielectricModel {
  enum class Kind { vacuum, constant, drude };

  Kind kind = Kind::vacuum;
  double eps_const = 1.0;  // constant kind
  double omega_p = 0.0;    // drude plasma frequency, rad/s
  double gamma = 0.0;      // drude damping, rad/s

  static DielectricModel vacuum() { return {}; }

  static DielectricModel constant(double eps) {
    if (!(eps >= 1.0)) throw std::invalid_argument("constant permittivity must be >= 1");
    return {Kind::constant, eps, 0.0, 0.0};
  }

  static DielectricModel drude(double omega_p, double gamma) {
    if (!(omega_p > 0.0) || !(gamma >= 0.0))
      throw std::invalid_argument("drude model needs omega_p > 0 and gamma >= 0");
    return {Kind::drude, 1.0, omega_p, gamma};
  }

  bool is_vacuum() const { return kind == Kind::vacuum || (kind == Kind::constant && eps_const == 1.0); }

  friend bool operator==(const DielectricModel&, const DielectricModel&) = default;
};

/// Gold, Drude fit.  gamma defaults to 4.08e13 rad/s; Table-style inputs
/// sometimes round it to 4e13.
inline DielectricModel gold_drude(double gamma = 4.08e13) { return DielectricModel::drude(1.38e16, gamma); }

inline DielectricModel silicon_constant() { return DielectricModel::constant(5.0); }

/// eps(i xi).  Real and >= 1 for every kind.  The Drude form diverges at
/// xi = 0, so that point is a domain error; quadrature rules must be open.
inline double permittivity_imag(const DielectricModel& m, double xi) {
  switch (m.kind) {
    case DielectricModel::Kind::vacuum:
      return 1.0;
    case DielectricModel::Kind::constant:
      return m.eps_const;
    case DielectricModel::Kind::drude:
      if (!(xi > 0.0)) throw std::domain_error("drude permittivity is singular at xi = 0");
      return 1.0 + m.omega_p * m.omega_p / (xi * (xi + m.gamma));
  }
  return 1.0;
}

/// eps(omega) on the real axis.
inline std::complex<double> permittivity_real(const DielectricModel& m, double omega) {
  switch (m.kind) {
    case DielectricModel::Kind::vacuum:
      return 1.0;
    case DielectricModel::Kind::constant:
      return m.eps_const;
    case DielectricModel::Kind::drude: {
      if (!(omega > 0.0)) throw std::domain_error("drude permittivity is singular at omega = 0");
      const std::complex<double> w(omega, 0.0);
      return 1.0 - m.omega_p * m.omega_p / (w * (w + std::complex<double>(0.0, m.gamma)));
    }
  }
  return 1.0;
}

/// Single-transition atom.
struct AtomModel {
  double mu_ij;     // transition dipole moment, C m
  double omega_ij;  // transition frequency, rad/s
  double mass;      // kg

  void validate() const {
    if (!(mu_ij > 0.0) || !(omega_ij > 0.0) || !(mass > 0.0))
      throw std::invalid_argument("atom model needs mu_ij, omega_ij and mass all > 0");
  }
};

/// Ground-state rubidium, dominant D line.
inline AtomModel rubidium() { return {5.05e-29, 2.4e15, 1.4e-25}; }

/// alpha(i xi) = (2 / 3hbar) omega_ij |mu_ij|^2 / (omega_ij^2 + xi^2), in C^2 m^2 / J.
inline double polarizability_imag(const AtomModel& atom, double xi) {
  const double w = atom.omega_ij;
  return 2.0 / (3.0 * constants::hbar) * w * atom.mu_ij * atom.mu_ij / (w * w + xi * xi);
}

/// Skin depth delta ~ 2 sqrt(eps0 Re eps(omega) / mu0) / sigma.
///
/// Only meaningful when omega >> eps eps0 / sigma; that regime is the
/// caller's responsibility.  A non-positive Re eps (a metal below its plasma
/// frequency) has no skin depth in this form and is rejected.
inline double skin_depth(const DielectricModel& m, double sigma, double omega) {
  if (!(sigma > 0.0)) throw std::domain_error("skin_depth: conductivity must be positive");
  const double eps = permittivity_real(m, omega).real();
  if (!(eps > 0.0)) throw std::domain_error("skin_depth: Re eps(omega) must be positive");
  return 2.0 * std::sqrt(constants::epsilon0 * eps / constants::mu0) / sigma;
}

}  // namespace shieldcp
