#include <set>

#include <gtest/gtest.h>

#include "anholonome/errors.hpp"
#include "anholonome/zoo.hpp"

using namespace anholonome;

TEST(Zoo, EverySystemBuildsWithDefaults) {
  std::set<std::string> names;
  for (const auto& spec : zoo()) {
    EXPECT_TRUE(names.insert(spec.name).second) << "duplicate " << spec.name;
    const BuiltSystem b = build_system(spec);
    EXPECT_EQ(b.system.name(), spec.name);
    EXPECT_EQ(b.default_state.x.coords.size(), b.system.dim());
    EXPECT_EQ(b.default_state.v.size(), b.system.rank());
    EXPECT_EQ(static_cast<int>(b.system.coord_labels().size()), b.system.dim());
    EXPECT_NO_THROW((void)constrained_dynamics(b.system, b.default_state)) << spec.name;
    for (const auto& p : spec.parameters) EXPECT_FALSE(p.unit.empty()) << spec.name << "." << p.name;
  }
  EXPECT_EQ(names.size(), 6u);
}

TEST(Zoo, LookupAndListing) {
  ASSERT_NE(find_system("paper-particle"), nullptr);
  EXPECT_EQ(find_system("no-such-system"), nullptr);
  const std::string listing = system_names();
  for (const auto& spec : zoo()) EXPECT_NE(listing.find(spec.name), std::string::npos);
}

TEST(Zoo, SymmetryStructure) {
  auto b = [](const char* n) { return build_system(*find_system(n)); };
  EXPECT_TRUE(b("paper-particle").horizontal.has_value());
  EXPECT_TRUE(b("free-particle").horizontal.has_value());
  EXPECT_FALSE(b("chaplygin-sleigh").horizontal.has_value());
  EXPECT_TRUE(b("chaplygin-sleigh").split.has_value());
  EXPECT_TRUE(b("broken-demo").split.has_value());
  EXPECT_FALSE(b("broken-demo").horizontal.has_value());
}

TEST(Zoo, PaperParticleLabels) {
  const BuiltSystem b = build_system(*find_system("paper-particle"));
  EXPECT_EQ(b.system.coord_labels(), (std::vector<std::string>{"x", "y", "z"}));
  EXPECT_EQ(velocity_labels(b.system), (std::vector<std::string>{"x", "y"}));
  EXPECT_EQ(b.system.momentum_indices(), std::vector<int>{1});
  EXPECT_EQ(b.default_state.v, Eigen::Vector2d(1, 0));
}

TEST(Zoo, ParameterResolution) {
  const SystemSpec& sleigh = *find_system("chaplygin-sleigh");
  const ParameterMap p = resolve_parameters(sleigh, {{"a", 0.25}});
  EXPECT_EQ(p.at("a"), 0.25);
  EXPECT_EQ(p.at("m"), 1.0);
  EXPECT_EQ(p.at("I"), 0.5);
  EXPECT_THROW((void)resolve_parameters(sleigh, {{"b", 1.0}}), ConfigError);
  EXPECT_THROW((void)resolve_parameters(sleigh, {{"m", 0.0}}), ConfigError);
  EXPECT_THROW((void)resolve_parameters(sleigh, {{"m", -1.0}}), ConfigError);
  EXPECT_THROW((void)resolve_parameters(sleigh, {{"I", std::nan("")}}), ConfigError);
  // the symmetry-breaking slope may take either sign
  EXPECT_NO_THROW((void)resolve_parameters(*find_system("broken-demo"), {{"epsilon", -2.0}}));
  EXPECT_THROW((void)resolve_parameters(*find_system("paper-particle"), {{"m", 2.0}}), ConfigError);
}

TEST(Zoo, ParametersReachTheDynamics) {
  const SystemSpec& sleigh = *find_system("chaplygin-sleigh");
  const CState s{ChartPoint{Eigen::Vector3d(0, 0, 0)}, Eigen::Vector2d(0.7, 1.3)};
  const BuiltSystem centred = build_system(sleigh, {{"a", 1e-9}});
  EXPECT_NEAR(constrained_dynamics(centred.system, s)[0], 0.0, 1e-8);
  const BuiltSystem heavy = build_system(*find_system("free-particle"), {{"m", 4.0}});
  EXPECT_NEAR(energy(heavy.system, heavy.default_state), 0.5 * 4.0 * (1.0 + 0.25 + 0.0625), 1e-14);
}
