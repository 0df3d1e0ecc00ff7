#include <cmath>

#include <gtest/gtest.h>

#include "shieldcp/experiment.hpp"

using namespace shieldcp;

namespace {
const AtomModel rb = rubidium();
const Materials mats{};
const ExperimentGeometry geom{};  // z = 3 um, d_vac = 5 um
}  // namespace

TEST(Experiment, GeometryDefaults) {
  EXPECT_DOUBLE_EQ(geom.Z(), 13.05e-6);
  EXPECT_DOUBLE_EQ(geom.with_d_vac(2.5e-6).Z(), 10.55e-6);
  EXPECT_NO_THROW(geom.validate());
  EXPECT_THROW(geom.with_z(0.0).validate(), std::invalid_argument);
  const auto slab = geom.slab();
  EXPECT_EQ(slab.a, 100e-6);
  EXPECT_EQ(slab.W, 10e-6);
  EXPECT_EQ(slab.rho, 2330.0);
}

TEST(Experiment, ForceBudgetRows) {
  const auto b = force_budget(geom, rb, mats, reference_yukawa_points());
  ASSERT_EQ(b.rows.size(), 13u);
  EXPECT_NEAR(b.row("Y1(Si)").force / 4.854316609016912e-30, 1.0, 1e-12);
  EXPECT_EQ(b.row("Y1(Si)").delta_force, b.row("Y1(Si)").force);
  EXPECT_NEAR(b.row("Y1(Au)").force / 1.248480739614014e-29, 1.0, 1e-12);
  EXPECT_EQ(b.row("Y1(Au)").delta_force, 0.0);
  EXPECT_NEAR(b.row("N(Si)").force / 1.278405578309185e-35, 1.0, 1e-12);
  EXPECT_NEAR(b.row("N(Au)").force / 5.665535185290247e-38, 1.0, 1e-12);
  EXPECT_EQ(b.row("N(Au)").delta_force, 0.0);
  EXPECT_DOUBLE_EQ(b.row("E").force, 1.4e-25 * 9.81);
  EXPECT_GT(b.row("CP").force, 0.0);
  EXPECT_GT(b.row("CP").delta_force, 0.0);
  EXPECT_LT(b.row("CP").delta_force, 1e-6 * b.row("CP").force);
  EXPECT_EQ(b.row("CP(Si)").force, b.row("CP(Si)").delta_force);
  EXPECT_THROW(b.row("nope"), std::out_of_range);
}

TEST(Experiment, ZeroAlphaGivesZeroYukawaRows) {
  const auto b = force_budget(geom, rb, mats, {{"Y0", {0.0, 1e-6}}});
  EXPECT_EQ(b.row("Y0(Si)").force, 0.0);
  EXPECT_EQ(b.row("Y0(Au)").force, 0.0);
  EXPECT_EQ(b.row("Y0(Si)").delta_force, 0.0);
}

TEST(Experiment, ShieldVersusSlabYukawaDependsOnGap) {
  // For lambda = 2 um the shield's Yukawa pull is below the slab's only while
  // the gap is small; for lambda = 0.5 um the shield always dominates.
  const YukawaParams y1{1e9, 2e-6}, y3{1e9, 0.5e-6};
  auto slab = [](const ExperimentGeometry& g, const YukawaParams& p) {
    return yukawa_slab_force(g, rb.mass, p, SlabModel::infinite);
  };
  EXPECT_LT(yukawa_shield_force(geom.with_d_vac(2.5e-6), rb.mass, y1), slab(geom.with_d_vac(2.5e-6), y1));
  EXPECT_GT(yukawa_shield_force(geom, rb.mass, y1), slab(geom, y1));
  for (double gap : {1e-6, 2.5e-6, 5e-6})
    EXPECT_GT(yukawa_shield_force(geom.with_d_vac(gap), rb.mass, y3), slab(geom.with_d_vac(gap), y3));
}

TEST(Experiment, BlochNumbers) {
  const LatticeSpec lat{};
  EXPECT_NEAR(bloch_frequency(rb.mass * 9.81, lat) / 1036.360896995264, 1.0, 1e-12);
  EXPECT_NEAR(force_for_bloch_frequency(1e-4, lat) / 1.325214029188016e-31, 1.0, 1e-12);
  EXPECT_NEAR(recoil_energy(lat, rb.mass) / 6.272115082702627e-30, 1.0, 1e-12);
  EXPECT_NEAR(wannier_stark_width(lat, rb.mass, rb.mass * 9.81) / 5.936908116727403e-7, 1.0, 1e-12);
  EXPECT_NEAR(bloch_frequency(force_for_bloch_frequency(123.0, lat), lat), 123.0, 1e-12);
  EXPECT_DOUBLE_EQ(bloch_frequency_shift(1e-30, 2e-30, lat), -bloch_frequency_shift(2e-30, 1e-30, lat));
  EXPECT_EQ(bloch_frequency_shift(1e-30, 1e-30, lat), 0.0);
  EXPECT_THROW(bloch_frequency(0.0, lat), std::domain_error);
  EXPECT_THROW(wannier_stark_width(lat, rb.mass, -1.0), std::domain_error);
}

TEST(Experiment, LogGrid) {
  EXPECT_TRUE(log_grid(1.0, 10.0, 0).empty());
  EXPECT_EQ(log_grid(2.0, 10.0, 1), std::vector<double>{2.0});
  const auto g = log_grid(1e-7, 1e-5, 5);
  EXPECT_EQ(g.front(), 1e-7);
  EXPECT_EQ(g.back(), 1e-5);
  EXPECT_NEAR(g[2], 1e-6, 1e-20);
  EXPECT_THROW(log_grid(0.0, 1.0, 3), std::invalid_argument);
  EXPECT_EQ(default_lambda_grid().size(), 60u);
}

TEST(Experiment, ExclusionBoundaryIsLinearInverse) {
  const auto grid = default_lambda_grid();
  const double fcrit = 1.325e-31;
  const auto curve = exclusion_boundary(geom, rb.mass, fcrit, grid);
  EXPECT_EQ(curve.points.size() + curve.omitted_lambdas.size(), grid.size());
  for (const auto& p : curve.points) {
    const double f = yukawa_slab_force(geom, rb.mass, {p.alpha, p.lambda}, SlabModel::infinite);
    EXPECT_NEAR(f / fcrit, 1.0, 1e-12);
  }
  const auto zero = exclusion_boundary(geom, rb.mass, 0.0, grid);
  for (const auto& p : zero.points) EXPECT_EQ(p.alpha, 0.0);
  EXPECT_THROW(exclusion_boundary(geom, rb.mass, 1.0, {2e-6, 1e-6}), std::invalid_argument);
  EXPECT_THROW(exclusion_boundary(geom, rb.mass, 1.0, {-1e-6}), std::invalid_argument);
}

TEST(Experiment, TinyLambdaUnderflowIsReported) {
  const auto curve = exclusion_boundary(geom, rb.mass, 1e-31, {1e-9, 1e-6});
  ASSERT_EQ(curve.omitted_lambdas.size(), 1u);
  EXPECT_EQ(curve.omitted_lambdas[0], 1e-9);
  EXPECT_EQ(curve.points.size(), 1u);
}

TEST(Experiment, CriteriaAndClassification) {
  const CpQuadratureSpec spec{};
  const double shielded = criterion_force(CpDeltaCriterion{true}, geom, rb, mats, spec);
  const double bare = criterion_force(CpDeltaCriterion{false}, geom, rb, mats, spec);
  EXPECT_EQ(criterion_force(FixedForceCriterion{2.0}, geom, rb, mats, spec), 2.0);
  EXPECT_GT(bare, 1e4 * shielded);

  const auto grid = log_grid(0.1e-6, 20e-6, 15);
  const auto a = exclusion_boundary(geom, rb, mats, grid, CpDeltaCriterion{true});
  const auto b = exclusion_boundary(geom, rb, mats, grid, CpDeltaCriterion{false});
  ASSERT_EQ(a.points.size(), b.points.size());
  for (std::size_t i = 0; i < a.points.size(); ++i) EXPECT_LT(a.points[i].alpha, b.points[i].alpha);

  const auto pts = reference_yukawa_points();
  EXPECT_TRUE(is_excluded(geom, rb.mass, pts[0].params, shielded));
  EXPECT_TRUE(is_excluded(geom, rb.mass, pts[1].params, shielded));
  EXPECT_FALSE(is_excluded(geom, rb.mass, pts[2].params, shielded));
  EXPECT_FALSE(is_excluded(geom, rb.mass, pts[3].params, shielded));
  // Closer slab: the CP change grows more slowly than Y3's Yukawa pull.
  const auto near = geom.with_d_vac(2.5e-6);
  EXPECT_TRUE(is_excluded(near, rb.mass, pts[2].params, criterion_force(CpDeltaCriterion{true}, near, rb, mats, spec)));
}

TEST(Experiment, ThinShieldVersusReferences) {
  // 50 nm gold is almost as good a reflector as bulk gold and always weaker
  // than a perfect mirror.
  for (double z : {0.1e-6, 1e-6, 10e-6}) {
    const double sheet = cp_attraction(rb, shield_only_stack(geom, mats), z, {});
    const double bulk = cp_attraction(rb, LayerStack::half_space(mats.shield), z, {});
    const double mirror = cp_attraction(rb, LayerStack::perfect_mirror(), z, {});
    EXPECT_GT(sheet / bulk, 0.99);
    EXPECT_LT(sheet / bulk, 1.0);
    EXPECT_LT(sheet / mirror, 1.0);
  }
}
