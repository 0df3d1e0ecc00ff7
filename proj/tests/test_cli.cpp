#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "shieldcp/cli/commands.hpp"
#include "shieldcp/cli/config.hpp"
#include "shieldcp/cli/dataset.hpp"

using namespace shieldcp;
using namespace shieldcp::cli;
using nlohmann::json;

namespace {

RunConfig cfg(const char* text) { return parse_config_text(text); }

double num(const Cell& c) { return std::get<double>(c); }
std::string text(const Cell& c) { return std::get<std::string>(c); }

std::size_t column(const Dataset& d, const std::string& name) {
  for (std::size_t i = 0; i < d.columns.size(); ++i)
    if (d.columns[i].name == name) return i;
  throw std::out_of_range("no column " + name);
}

// Parses emitted CSV and checks it is self-describing: metadata lines first,
// one header whose numeric columns all carry a unit, every numeric cell in
// 9-significant-digit scientific form (or nan).
void check_csv_schema(const std::string& csv, std::size_t expect_rows) {
  std::istringstream in(csv);
  std::string line;
  bool header_seen = false;
  std::vector<bool> numeric;
  std::size_t rows = 0;
  const std::regex number(R"(^-?[0-9]\.[0-9]{8}e[+-][0-9]{2,3}$|^nan$|^-?inf$)");
  const std::regex meta(R"(^# [A-Za-z0-9_.]+: .*$)");
  while (std::getline(in, line)) {
    if (!header_seen && line.rfind("#", 0) == 0) {
      ASSERT_TRUE(std::regex_match(line, meta)) << line;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    if (!header_seen) {
      header_seen = true;
      for (const auto& h : cells) numeric.push_back(h.find(" [") != std::string::npos && h.back() == ']');
      continue;
    }
    ASSERT_EQ(cells.size(), numeric.size()) << line;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (numeric[i]) {
        ASSERT_TRUE(std::regex_match(cells[i], number)) << "cell '" << cells[i] << "'";
      }
    }
    ++rows;
  }
  EXPECT_TRUE(header_seen);
  EXPECT_EQ(rows, expect_rows);
}

}  // namespace

// ---------------------------------------------------------------------------
// configuration

TEST(Config, DefaultsMatchReferenceSetup) {
  const auto c = cfg("{}");
  EXPECT_EQ(c.geometry.z, 3e-6);
  EXPECT_EQ(c.geometry.d_au, 50e-9);
  EXPECT_EQ(c.geometry.slab_thickness, 10e-6);
  EXPECT_EQ(c.atom.omega_ij, 2.4e15);
  EXPECT_EQ(c.materials.shield, gold_drude());
  EXPECT_EQ(c.materials.slab, silicon_constant());
  EXPECT_EQ(c.yukawa_points.size(), 4u);
  EXPECT_EQ(c.exclusion_d_vac, 5e-6);
  EXPECT_EQ(c.effective_criteria().size(), 3u);
  EXPECT_EQ(c.format, "csv");
}

TEST(Config, OverridesAndMaterials) {
  const auto c = cfg(R"({
    "geometry": {"z": 1e-6, "d_vac": 2.5e-6},
    "materials": {"shield": {"kind": "drude", "gamma": 4e13}, "slab": {"kind": "vacuum"}},
    "yukawa_points": [{"label": "A", "alpha": 3, "lambda": 1e-6}],
    "tolerances": {"cp_rel_tol": 1e-7, "slab_model": "cuboid"},
    "cp_scan": {"axis": "d_vac", "min": 1e-6, "max": 2e-6, "points": 3, "spacing": "linear"},
    "exclusion": {"criteria": [{"label": "s", "kind": "fixed_force", "frequency_hz": 1e-4}]},
    "output": {"format": "structured", "workers": 3}
  })");
  EXPECT_EQ(c.geometry.z, 1e-6);
  EXPECT_EQ(c.geometry.d_au, 50e-9);
  EXPECT_EQ(c.materials.shield.gamma, 4e13);
  EXPECT_EQ(c.materials.shield.omega_p, 1.38e16);
  EXPECT_TRUE(c.materials.slab.is_vacuum());
  EXPECT_EQ(c.yukawa_points.at(0).label, "A");
  EXPECT_EQ(c.cp.rel_tol, 1e-7);
  EXPECT_EQ(c.slab_model, SlabModel::cuboid);
  EXPECT_EQ(c.cp_scan.values(), (std::vector<double>{1e-6, 1.5e-6, 2e-6}));
  ASSERT_EQ(c.criteria.size(), 1u);
  EXPECT_NEAR(std::get<FixedForceCriterion>(c.criteria[0].criterion).force, 1.325214029188016e-31, 1e-43);
  EXPECT_EQ(c.workers, 3u);
}

TEST(Config, RejectsBadInput) {
  EXPECT_THROW(cfg("{"), ConfigError);
  EXPECT_THROW(cfg(R"({"geometri": {}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"geometry": {"z": "3"}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"geometry": {"z": -1}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"materials": {"slab": {"kind": "glass"}}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"materials": {"slab": {"kind": "constant", "eps": 0.2}}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"tolerances": {"cp_rel_tol": 0.5}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"cp_scan": {"axis": "x"}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"cp_scan": {"min": 2e-6, "max": 1e-6}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"yukawa_points": [{"alpha": 1, "lambda": 0}]})"), ConfigError);
  EXPECT_THROW(cfg(R"({"bloch": {"forces": [{"label": "x"}]}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"output": {"format": "xml"}})"), ConfigError);
  EXPECT_THROW(cfg(R"({"output": {"workers": 0}})"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), ConfigError);
}

TEST(Config, HashTracksPhysicsNotOutputPlumbing) {
  const auto a = cfg("{}");
  auto b = cfg(R"({"output": {"workers": 4, "path": "x.csv"}})");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(cfg(R"({"geometry": {"z": 4e-6}})")));
  // Spelling out a default is the same configuration.
  EXPECT_EQ(config_hash(a), config_hash(cfg(R"({"geometry": {"z": 3e-6}})")));
  // The effective configuration round-trips through the parser.
  EXPECT_EQ(config_hash(parse_config(json::parse(effective_config_json(a).dump()))), config_hash(a));
}

// ---------------------------------------------------------------------------
// dataset emission

TEST(Dataset, NumberFormatting) {
  EXPECT_EQ(format_number(1.0), "1.00000000e+00");
  EXPECT_EQ(format_number(-3.673314159e-27), "-3.67331416e-27");
  EXPECT_EQ(format_number(0.0), "0.00000000e+00");
  EXPECT_EQ(format_number(std::nan("")), "nan");
  EXPECT_EQ(format_number(-INFINITY), "-inf");
  EXPECT_EQ(fnv1a64(""), 14695981039346656037ull);
  EXPECT_EQ(hex64(fnv1a64("a")), "af63dc4c8601ec8c");
}

TEST(Dataset, CsvAndStructured) {
  Dataset d;
  d.add_meta("tool", tool_version);
  d.columns = {{"label", ""}, {"z", "m"}, {"ratio", "1"}};
  d.rows = {{std::string("a"), 1e-6, 0.5}, {std::string("b"), 2e-6, std::nan("")}};
  d.notes.push_back("second ratio undefined");
  const auto csv = to_csv(d);
  EXPECT_EQ(csv, "# tool: shieldcp 0.1.0\n# note: second ratio undefined\nlabel,z [m],ratio [1]\n"
                 "a,1.00000000e-06,5.00000000e-01\nb,2.00000000e-06,nan\n");
  check_csv_schema(csv, 2);
  const auto j = json::parse(to_structured(d));
  EXPECT_EQ(j["columns"][1]["unit"], "m");
  EXPECT_EQ(j["rows"][0][1].get<double>(), 1e-6);
  EXPECT_TRUE(j["rows"][1][2].is_null());
  EXPECT_EQ(j["metadata"]["tool"], tool_version);
}

TEST(Dataset, ParallelMapIsOrderedAndPropagatesFirstError) {
  auto sq = [](std::size_t i) { return static_cast<double>(i * i); };
  EXPECT_EQ(parallel_map<double>(50, 1, sq), parallel_map<double>(50, 4, sq));
  EXPECT_TRUE(parallel_map<double>(0, 4, sq).empty());
  try {
    parallel_map<double>(20, 3, [](std::size_t i) -> double {
      if (i == 7 || i == 15) throw std::runtime_error("at " + std::to_string(i));
      return 0.0;
    });
    FAIL();
  } catch (const std::runtime_error& e) {
    EXPECT_STREQ(e.what(), "at 7");
  }
}

// ---------------------------------------------------------------------------
// commands

TEST(Commands, CpScanReferenceRatios) {
  const auto c = cfg(R"({"cp_scan": {"min": 1e-7, "max": 3e-5, "points": 6}})");
  const auto d = cmd_cp_scan(c);
  ASSERT_EQ(d.rows.size(), 6u);
  const auto ih = column(d, "sheet_over_halfspace"), im = column(d, "sheet_over_mirror");
  for (const auto& r : d.rows) {
    EXPECT_GT(num(r[ih]), 0.9);
    EXPECT_LT(num(r[ih]), 1.02);
    EXPECT_LT(num(r[im]), 1.0);
    EXPECT_GT(num(r[column(d, "F_cp_shielded")]), 0.0);
  }
  check_csv_schema(to_csv(d), 6);
}

TEST(Commands, CpScanEmptyRangeIsHeaderOnly) {
  const auto d = cmd_cp_scan(cfg(R"({"cp_scan": {"points": 0}})"));
  EXPECT_TRUE(d.rows.empty());
  EXPECT_EQ(d.columns.size(), 9u);
  check_csv_schema(to_csv(d), 0);
}

TEST(Commands, CpScanVacuumMaterialsGiveZeroMaterialForces) {
  const auto d = cmd_cp_scan(cfg(R"({"materials": {"shield": {"kind": "vacuum"}, "slab": {"kind": "vacuum"}},
                                    "cp_scan": {"points": 3}})"));
  for (const auto& r : d.rows) {
    for (const char* col : {"F_cp_shielded", "dF_cp_shielded", "F_cp_unshielded", "F_cp_sheet", "F_cp_halfspace"})
      EXPECT_EQ(num(r[column(d, col)]), 0.0) << col;
    // The perfect mirror is a fixed reference, independent of the materials.
    EXPECT_GT(num(r[column(d, "F_cp_mirror")]), 0.0);
    EXPECT_TRUE(std::isnan(num(r[column(d, "sheet_over_halfspace")])));
  }
}

TEST(Commands, BudgetShiftColumns) {
  const auto c = cfg(R"({"budget": {"z_values": [3e-6], "d_vac": {"min": 5e-6, "max": 5e-6, "points": 1}}})");
  const auto d = cmd_force_budget(c);
  ASSERT_EQ(d.rows.size(), 1u);
  const auto& r = d.rows[0];
  EXPECT_EQ(num(r[column(d, "d_vac")]), 5e-6);
  EXPECT_NEAR(num(r[column(d, "F_Y1(Si)")]) / 4.854316609016912e-30, 1.0, 1e-12);
  const double near = yukawa_slab_force(c.geometry.with_d_vac(2.5e-6), c.atom.mass, {1e9, 2e-6}, SlabModel::infinite);
  const double far = yukawa_slab_force(c.geometry.with_d_vac(20e-6), c.atom.mass, {1e9, 2e-6}, SlabModel::infinite);
  EXPECT_NEAR(num(r[column(d, "shift_F_Y1")]) / (near - far), 1.0, 1e-12);
  EXPECT_NEAR(num(r[column(d, "shift_nu_Y1")]) / bloch_frequency(near - far, c.lattice), 1.0, 1e-12);
  EXPECT_GT(num(r[column(d, "shift_F_CP")]), 0.0);
  check_csv_schema(to_csv(d), 1);
}

TEST(Commands, BudgetZeroAlphaYukawaColumnsAreZero) {
  const auto d = cmd_force_budget(cfg(R"({"yukawa_points": [{"label": "Z0", "alpha": 0, "lambda": 1e-6}],
      "budget": {"z_values": [3e-6], "d_vac": {"min": 4e-6, "max": 4e-6, "points": 1}, "shift": null}})"));
  ASSERT_EQ(d.rows.size(), 1u);
  for (const char* col : {"F_Z0(Si)", "dF_Z0(Si)", "F_Z0(Au)", "dF_Z0(Au)"}) EXPECT_EQ(num(d.rows[0][column(d, col)]), 0.0);
  EXPECT_THROW(column(d, "shift_F_Z0"), std::out_of_range);
}

TEST(Commands, ExclusionCurvesAndClassification) {
  const auto c = cfg(R"({"exclusion": {"lambda": {"min": 1e-7, "max": 2e-5, "points": 12}}})");
  const auto d = cmd_exclusion(c);
  std::vector<double> shielded, bare, sens;
  for (const auto& r : d.rows) {
    if (text(r[0]) != "boundary") continue;
    (text(r[1]) == "shielded_cp" ? shielded : text(r[1]) == "unshielded_cp" ? bare : sens).push_back(num(r[4]));
  }
  ASSERT_EQ(shielded.size(), 12u);
  ASSERT_EQ(bare.size(), 12u);
  ASSERT_EQ(sens.size(), 12u);
  for (std::size_t i = 0; i < 12; ++i) EXPECT_LT(shielded[i], bare[i]);

  std::map<std::string, std::string> verdict;
  for (const auto& r : d.rows)
    if (text(r[0]) == "point" && text(r[1]) == "shielded_cp") verdict[text(r[2])] = text(r[5]);
  EXPECT_EQ(verdict["Y1"], "yes");
  EXPECT_EQ(verdict["Y2"], "yes");
  EXPECT_EQ(verdict["Y3"], "no");
  EXPECT_EQ(verdict["Y4"], "no");
  check_csv_schema(to_csv(d), d.rows.size());
}

TEST(Commands, ExclusionZeroForceAndOverlay) {
  const auto path = std::filesystem::temp_directory_path() / "shieldcp_overlay_test.csv";
  {
    std::ofstream o(path);
    o << "# digitised elsewhere\nregion,lambda,alpha\ntorsion,1e-6,1e10\ntorsion,1e-5,1e4\n";
  }
  const std::string conf = R"({"exclusion": {"lambda": {"min": 1e-6, "max": 1e-5, "points": 4},
      "criteria": [{"label": "zero", "kind": "fixed_force", "force": 0}], "overlay": ")" + path.string() + R"("}})";
  const auto d = cmd_exclusion(cfg(conf.c_str()));
  std::size_t boundary = 0, overlay = 0;
  for (const auto& r : d.rows) {
    if (text(r[0]) == "boundary") {
      ++boundary;
      EXPECT_EQ(num(r[4]), 0.0);
    }
    if (text(r[0]) == "overlay") {
      ++overlay;
      EXPECT_EQ(text(r[1]), "torsion");
    }
  }
  EXPECT_EQ(boundary, 4u);
  EXPECT_EQ(overlay, 2u);
  std::filesystem::remove(path);
  EXPECT_THROW(cmd_exclusion(cfg(conf.c_str())), ConfigError);  // overlay file gone
}

TEST(Commands, BlochDefaultsAndEdgeCases) {
  const auto d = cmd_bloch(cfg("{}"));
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(text(d.rows[0][0]), "earth");
  EXPECT_NEAR(num(d.rows[0][2]), 1036.36, 0.01);
  EXPECT_EQ(text(d.rows[1][0]), "sensitivity");
  EXPECT_NEAR(num(d.rows[1][1]) / 1.325214029188016e-31, 1.0, 1e-12);
  EXPECT_TRUE(d.notes.empty());

  const auto none = cmd_bloch(cfg(R"({"bloch": {"forces": []}})"));
  ASSERT_EQ(none.rows.size(), 1u);
  EXPECT_TRUE(std::isnan(num(none.rows[0][3])));

  const auto neg = cmd_bloch(cfg(R"({"bloch": {"forces": [{"label": "push", "force": -1e-30}, {"label": "cp", "budget_row": "CP"}]}})"));
  EXPECT_TRUE(std::isnan(num(neg.rows[0][2])));
  EXPECT_TRUE(std::isnan(num(neg.rows[0][5])));
  EXPECT_FALSE(neg.notes.empty());
  EXPECT_GT(num(neg.rows[1][2]), 0.0);
  EXPECT_THROW(cmd_bloch(cfg(R"({"bloch": {"forces": [{"label": "x", "budget_row": "nope"}]}})")), ConfigError);
  check_csv_schema(to_csv(neg), 3);
}

TEST(Commands, OutputIndependentOfWorkerCount) {
  auto a = cfg(R"({"cp_scan": {"points": 5}})");
  auto b = a;
  b.workers = 3;
  EXPECT_EQ(to_csv(cmd_cp_scan(a)), to_csv(cmd_cp_scan(b)));
  EXPECT_EQ(to_structured(cmd_cp_scan(a)), to_structured(cmd_cp_scan(b)));
}
