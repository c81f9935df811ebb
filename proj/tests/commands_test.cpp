#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "modeswim/analytic.hpp"
#include "modeswim/commands.hpp"
#include "modeswim/error.hpp"

using namespace modeswim;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto p = fs::temp_directory_path() / ("modeswim_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST(Commands, BeamValidationPassesOnBundledFixture) {
    const auto r = commands::beam_validate(config::fixture("paper_beam"));
    EXPECT_TRUE(r.pass()) << commands::format_report(r);
    EXPECT_NEAR(r.analytic_f1 / 22.7, 1.0, 0.05);
    EXPECT_NEAR(r.analytic_f2 / 142.4, 1.0, 0.05);
    EXPECT_NEAR(r.fem_f1 / r.analytic_f1, 1.0, 0.02);
    EXPECT_NEAR(r.wet_f1, 4.2, 1e-9);
    EXPECT_LT(r.seconds, 1.0);
}

TEST(Commands, BeamWithoutFluidKeepsAirFrequencies) {
    auto c = config::fixture("paper_beam");
    c.fluid.density = 0.0;
    const auto r = commands::beam_validate(c);
    EXPECT_EQ(r.wet_f1, r.analytic_f1);
    EXPECT_EQ(r.wet_f2, r.analytic_f2);
    EXPECT_TRUE(r.pass());
}

TEST(Commands, TightToleranceFails) {
    const auto r = commands::beam_validate(config::fixture("paper_beam"), 0.01);
    EXPECT_FALSE(r.pass());
    EXPECT_THROW(commands::beam_validate(config::fixture("rect_robot")), ConfigError);
}

TEST(Commands, SimplySupportedSquareMatchesAnalyticModes) {
    const auto c = config::load_file(MODESWIM_TEST_DATA "/ss_square.conf");
    const auto result = commands::run_modes(c);
    const auto& basis = result.model.dry;
    const auto d = laminate::plate_bending_stiffness(result.model.sections.front());
    const double mu = result.model.sections.front().mass_per_area;
    // Square plate: f_mn = (pi / 2) (m^2 + n^2) / a^2 sqrt(D / mu).
    const double unit = 0.5 * std::numbers::pi / (0.32 * 0.32) * std::sqrt(d.d11 / mu);
    const double expected[] = {2, 5, 5, 8, 10, 10};
    ASSERT_EQ(basis.size(), 6u);
    for (int k = 0; k < 6; ++k) EXPECT_NEAR(basis.frequencies_hz[k] / (unit * expected[k]), 1.0, 0.02) << k;
    EXPECT_EQ(result.pairs.size(), 2u);
}

TEST(Commands, ModesWritesTableAndGrids) {
    const auto dir = scratch("modes");
    const auto result = commands::run_modes(config::fixture("circ_robot"));
    const auto outputs = commands::write_modes(result, dir.string());
    EXPECT_EQ(outputs.size(), 1u + result.model.wet.size());
    const auto csv = slurp(dir / "modes.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "order,frequency_hz,medium,degenerate_with");
    EXPECT_NE(csv.find("\n1,0,wet,\n2,0,wet,\n3,0,wet,\n"), std::string::npos);
    std::ifstream g(dir / "mode_04.grid");
    const auto grid = read_grid(g);
    EXPECT_EQ(grid.nx, 65u);
    EXPECT_EQ(grid.ny, 65u);
}

TEST(Commands, WholeEigenspacesAreKept) {
    eigen::ModalBasis b;
    b.eigenvalues = {1.0, 4.0, 4.0, 9.0};
    b.frequencies_hz = {1.0, 2.0, 2.0, 3.0};
    b.shapes.resize(4);
    EXPECT_EQ(commands::trim_to_whole_eigenspaces(b, 2).size(), 3u);
    EXPECT_EQ(commands::trim_to_whole_eigenspaces(b, 3).size(), 3u);
    EXPECT_EQ(commands::trim_to_whole_eigenspaces(b, 1).size(), 1u);
}

TEST(Commands, AtlasFiles) {
    const auto dir = scratch("atlas");
    const auto outputs = commands::write_atlas(1, 2, 1.0, 1.0, {0.0, 30.0, 45.0, 60.0, 90.0, 180.0}, 24, dir.string());
    EXPECT_EQ(outputs.size(), 8u);
    EXPECT_EQ(slurp(dir / "gamma_0.grid"), slurp(dir / "mode_1_2.grid"));
    EXPECT_EQ(slurp(dir / "gamma_90.grid"), slurp(dir / "mode_2_1.grid"));
    std::ifstream a(dir / "gamma_0.grid"), b(dir / "gamma_180.grid"), c(dir / "gamma_45.grid");
    const auto g0 = read_grid(a), g180 = read_grid(b), g45 = read_grid(c);
    for (std::size_t k = 0; k < g0.values.size(); ++k) EXPECT_EQ(g0.values[k], -g180.values[k] + 0.0);
    for (std::size_t i = 0; i <= 24; ++i) EXPECT_NEAR(g45.at(i, 24 - i), 0.0, 1e-8);
}

TEST(Commands, ManifestDetectsDigestChanges) {
    const auto dir = scratch("manifest");
    EXPECT_FALSE(commands::write_manifest(dir.string(), "modes", "x", "aaaa", {{"lambda", 2.5}}, {"modes.csv"}));
    EXPECT_FALSE(commands::write_manifest(dir.string(), "modes", "x", "aaaa", {{"lambda", 2.5}}, {"modes.csv"}));
    const auto prev = commands::write_manifest(dir.string(), "modes", "x", "bbbb", {}, {});
    ASSERT_TRUE(prev);
    EXPECT_EQ(*prev, "aaaa");
    const auto text = slurp(dir / "manifest.json");
    EXPECT_NE(text.find("\"config_digest\": \"bbbb\""), std::string::npos);
    EXPECT_NE(text.find(MODESWIM_VERSION), std::string::npos);
}

TEST(Commands, SweepDistinguishesSynchronousAndAntiphaseDrive) {
    auto c = config::fixture("rect_robot");
    c.drive.frequencies_hz = {6.0};
    c.drive.phases_deg = {0.0, 180.0};
    const auto r = commands::run_sweep(c, 1);
    const auto& a = r.map.at(0, 0);
    const auto& b = r.map.at(0, 1);
    EXPECT_NE(a.thrust[0], b.thrust[0]);
    EXPECT_NEAR(r.lambda, 2.808, 1e-12);
}

TEST(Commands, SampleDeflectionInterpolatesNodes) {
    const auto mesh = fem::generate_mesh(fem::PlateGeometry::rectangle(0.2, 0.1), 0.05);
    const auto u = fem::rigid_motion(mesh, 1.0, 2.0, -3.0);
    const auto g = commands::sample_deflection(mesh, u, 9, 5);
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(g.at(i, j), 1.0 + 2.0 * g.x(i) - 3.0 * g.y(j), 1e-12);
    }
}
