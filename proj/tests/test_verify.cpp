#include <cstdlib>
#include <sstream>

#include <gtest/gtest.h>

#include "anholonome/csv.hpp"
#include "anholonome/verify.hpp"

using namespace anholonome;

namespace {

std::string report_text(const std::vector<SystemReport>& reports, const VerifyOptions& opts) {
  std::ostringstream out;
  write_report(out, reports, opts);
  return out.str();
}

}  // namespace

TEST(Verify, PaperParticlePassesEverySuite) {
  const SystemReport r = verify_system(*find_system("paper-particle"), VerifyOptions{});
  EXPECT_TRUE(r.pass());
  for (const char* check : {"fd_check", "oracle_equivalence", "energy_identity", "energy_drift", "invariance",
                            "momentum_residual", "coefficient_crosscheck", "reduction_commutation",
                            "level_set_drift", "routh_consistency", "two_stage_reduction"}) {
    const CheckResult* c = r.find(check);
    ASSERT_NE(c, nullptr) << check;
    EXPECT_TRUE(c->pass) << check << " " << c->max_residual;
    EXPECT_TRUE(c->error.empty()) << c->error;
  }
  EXPECT_EQ(r.find("no_such_check"), nullptr);
}

TEST(Verify, BrokenDemoFailsOnlyInvariance) {
  const SystemReport r = verify_system(*find_system("broken-demo"), VerifyOptions{});
  EXPECT_FALSE(r.pass());
  const CheckResult* inv = r.find("invariance");
  ASSERT_NE(inv, nullptr);
  EXPECT_FALSE(inv->pass);
  EXPECT_GE(inv->max_residual, 0.5);
  EXPECT_TRUE(r.find("oracle_equivalence")->pass);
  EXPECT_TRUE(r.find("energy_identity")->pass);
  EXPECT_EQ(r.find("routh_consistency"), nullptr);
}

TEST(Verify, SystemsWithoutSymmetrySkipSymmetrySuites) {
  const SystemReport r = verify_system(*find_system("chaplygin-sleigh"), VerifyOptions{});
  EXPECT_TRUE(r.pass());
  EXPECT_NE(r.find("momentum_residual"), nullptr);
  EXPECT_EQ(r.find("level_set_drift"), nullptr);
}

TEST(Verify, ReportIsDeterministicAndSeedSensitive) {
  const SystemSpec& sleigh = *find_system("chaplygin-sleigh");
  VerifyOptions a;
  const std::string first = report_text({verify_system(sleigh, a)}, a);
  const std::string second = report_text({verify_system(sleigh, a)}, a);
  EXPECT_EQ(first, second);
  VerifyOptions b;
  b.seed = 8;
  const std::string other = report_text({verify_system(sleigh, b)}, b);
  EXPECT_NE(first, other);

  std::istringstream in(first);
  const CsvTable t = read_csv(in);
  EXPECT_EQ(t.header, (std::vector<std::string>{"check", "samples", "max_residual", "tol", "pass"}));
  EXPECT_EQ(t.meta("seed"), "7");
  EXPECT_EQ(t.meta("system"), "chaplygin-sleigh");
  EXPECT_EQ(t.meta("result"), "pass");
}

TEST(Verify, ToleranceOverride) {
  VerifyOptions opts;
  opts.tol = 1e-30;
  const SystemReport r = verify_system(*find_system("free-particle"), opts);
  for (const auto& c : r.checks) EXPECT_EQ(c.tol, 1e-30);
  EXPECT_FALSE(r.pass());
}

TEST(Verify, ParallelMatchesSerial) {
  const std::vector<const SystemSpec*> specs{find_system("free-particle"), find_system("vertical-rolling-disk")};
  const VerifyOptions opts;
  EXPECT_EQ(report_text(verify_systems(specs, opts, true), opts), report_text(verify_systems(specs, opts, false), opts));
}

TEST(Verify, DefaultSeedFromEnvironment) {
  const char* saved = std::getenv("ANHOLONOME_SEED");
  const std::string keep = saved ? saved : "";
  ::setenv("ANHOLONOME_SEED", "42", 1);
  EXPECT_EQ(default_seed(), 42u);
  ::setenv("ANHOLONOME_SEED", "not-a-number", 1);
  EXPECT_EQ(default_seed(), 7u);
  ::unsetenv("ANHOLONOME_SEED");
  EXPECT_EQ(default_seed(), 7u);
  if (saved) ::setenv("ANHOLONOME_SEED", keep.c_str(), 1);
}
