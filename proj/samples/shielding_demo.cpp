// Prints the CP attraction of a rubidium atom 3 um in front of a 50 nm gold
// shield, and how much of it changes when a silicon slab 5 um behind the
// shield is withdrawn, next to the Yukawa signal of the slab.

#include <cstdio>

#include "shieldcp/experiment.hpp"

int main() {
  using namespace shieldcp;
  const ExperimentGeometry g{};
  const Materials mats{};
  const AtomModel atom = rubidium();

  const double f_shielded = cp_attraction(atom, shielded_stack(g, mats), g.z, {});
  const double df = cp_delta_attraction(atom, g, mats, {});
  const double f_bare = cp_attraction(atom, unshielded_stack(mats), unshielded_distance(g), {});
  std::printf("CP attraction, shielded slab   %.4e N\n", f_shielded);
  std::printf("CP change on withdrawing slab  %.4e N\n", df);
  std::printf("CP attraction, no shield       %.4e N\n", f_bare);
  std::printf("shield suppression factor      %.3e\n", f_bare / df);

  for (const auto& y : reference_yukawa_points()) {
    const double fy = yukawa_slab_force(g, atom.mass, y.params, SlabModel::infinite);
    std::printf("%s  alpha=%.0e lambda=%.1e m  slab Yukawa %.4e N  %s\n", y.label.c_str(), y.params.alpha,
                y.params.lambda, fy, fy > df ? "above CP change" : "below CP change");
  }
  return 0;
}
