#include <gtest/gtest.h>

#include <string>

#include "modeswim/config.hpp"
#include "modeswim/error.hpp"

using namespace modeswim;

namespace {

const char* kMinimal = R"(# minimal plate
[model]
name = tiny
kind = plate

[geometry]
planform = rectangle
a = 0.1
b = 0.05

[mesh]
element_size = 0.01

[base_layer]
thickness = 2e-4
density = 1600
modulus = 1.2e11
poisson = 0.3

[drive]
frequencies = 1:3:0.5, 10
phases = -90:90:45
)";

std::string error_of(const std::string& text) {
    try {
        config::parse(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST(Config, ParsesMinimalPlate) {
    const auto c = config::parse(kMinimal);
    EXPECT_EQ(c.name, "tiny");
    EXPECT_EQ(c.kind, config::ModelKind::plate);
    EXPECT_EQ(c.geometry.a, 0.1);
    ASSERT_EQ(c.base_layers.size(), 1u);
    EXPECT_EQ(c.base_layers[0].elastic_modulus, 1.2e11);
    EXPECT_EQ(c.drive.frequencies_hz, (std::vector<double>{1.0, 1.5, 2.0, 2.5, 3.0, 10.0}));
    EXPECT_EQ(c.drive.phases_deg, (std::vector<double>{-90.0, -45.0, 0.0, 45.0, 90.0}));
    EXPECT_EQ(c.solver.modes, 10);
}

TEST(Config, UnknownKeysAndSectionsNameTheLine) {
    const std::string base = kMinimal;
    EXPECT_NE(error_of(base + "[solver]\nmodez = 4\n").find("line 24"), std::string::npos);
    EXPECT_NE(error_of(base + "[solver]\nmodez = 4\n").find("modez"), std::string::npos);
    EXPECT_NE(error_of(base + "[nonsense]\n").find("unknown section"), std::string::npos);
    EXPECT_NE(error_of(base + "[solver]\nmodes = 4\nmodes = 5\n").find("duplicate"), std::string::npos);
    EXPECT_NE(error_of(base + "[solver]\nmodes = four\n").find("line 24, key 'modes'"), std::string::npos);
    EXPECT_NE(error_of("a = 1\n").find("before any section"), std::string::npos);
}

TEST(Config, ReferentialChecks) {
    const std::string base = kMinimal;
    const std::string patch = "[patch]\ncenter_x = 0.09\ncenter_y = 0.025\nlength = 0.05\nwidth = 0.01\n"
                              "active_length = 0.04\nactive_width = 0.005\naxis = x\n";
    EXPECT_NE(error_of(base + patch).find("outside the planform"), std::string::npos);
    EXPECT_NE(error_of(base + "[fluid]\ndensity = -1\n").find("density"), std::string::npos);
    EXPECT_NE(error_of(base + "[boundary]\ncondition = free\nedges = left\n").find("edges"), std::string::npos);
    EXPECT_NE(error_of(base + "[validation]\nair_f1 = 20\nair_f2 = 10\n").find("ascending"), std::string::npos);
    EXPECT_NE(error_of(base + "[fluid]\ncalibrate_wet_f1 = 30\n[validation]\nair_f1 = 20\n").find("below"),
              std::string::npos);
}

TEST(Config, SerializeRoundTripIsExact) {
    for (const auto& name : config::fixture_names()) {
        const auto c = config::fixture(name);
        const auto text = config::serialize(c);
        const auto again = config::parse(text);
        EXPECT_EQ(config::serialize(again), text) << name;
        EXPECT_EQ(config::digest(again), config::digest(c)) << name;
    }
}

TEST(Config, DigestTracksContent) {
    auto c = config::fixture("rect_robot");
    const auto d = config::digest(c);
    EXPECT_EQ(d.size(), 16u);
    c.drive.damping_ratio = 0.06;
    EXPECT_NE(config::digest(c), d);
    EXPECT_EQ(config::digest_text(""), "cbf29ce484222325");
}

TEST(Config, BundledFixtures) {
    EXPECT_EQ(config::fixture_names(), (std::vector<std::string>{"paper_beam", "rect_robot", "circ_robot"}));
    const auto beam = config::fixture("paper_beam");
    EXPECT_EQ(beam.kind, config::ModelKind::beam);
    EXPECT_EQ(beam.base_layers.size(), 3u);
    const auto rect = config::fixture("rect_robot");
    EXPECT_EQ(rect.patches.size(), 2u);
    EXPECT_EQ(rect.geometry.heading_deg, 45.0);
    EXPECT_THROW(config::fixture("nope"), ConfigError);
}

TEST(Config, NumberLists) {
    EXPECT_EQ(config::parse_number_list("0:1:0.25"), (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
    EXPECT_EQ(config::parse_number_list(" 3 , 1,2 "), (std::vector<double>{3.0, 1.0, 2.0}));
    EXPECT_TRUE(config::parse_number_list("").empty());
    EXPECT_THROW(config::parse_number_list("1:2"), ConfigError);
    EXPECT_THROW(config::parse_number_list("1:2:0"), ConfigError);
    EXPECT_THROW(config::parse_number_list("1,,2"), ConfigError);
}
