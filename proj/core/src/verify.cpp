#include "anholonome/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <future>
#include <limits>
#include <ostream>

#include "anholonome/csv.hpp"
#include "anholonome/errors.hpp"
#include "anholonome/rng.hpp"
#include "anholonome/version.hpp"

namespace anholonome {

namespace {

constexpr double kFdStep = 1e-5;
constexpr double kFdTol = 1e-6;
constexpr double kJacobiTol = 1e-8;
constexpr double kLiftTol = 1e-8;
constexpr double kOracleTol = 1e-9;
constexpr double kEnergyIdentityTol = 1e-10;
constexpr double kEnergyDriftTol = 1e-10;
constexpr double kInvarianceTol = 1e-6;
constexpr double kMomentumResidualTol = 1e-9;
constexpr double kCrosscheckTol = 1e-8;
constexpr double kCommutationTol = 1e-6;
constexpr double kLevelSetTol = 1e-10;
constexpr double kRouthTol = 1e-6;
constexpr double kTwoStageTol = 1e-9;

constexpr double kStep = 1e-3;
constexpr double kHorizon = 5.0;

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

class Suite {
 public:
  Suite(const BuiltSystem& built, const std::string& name, const VerifyOptions& options)
      : built_(built), name_(name), options_(options) {}

  SplitMix64 rng(std::string_view check) const { return SplitMix64(options_.seed ^ fnv1a(name_ + "/" + std::string(check))); }

  Eigen::VectorXd uniform(SplitMix64& rng, int size, double bound) const {
    Eigen::VectorXd v(size);
    for (int i = 0; i < size; ++i) v[i] = rng.uniform(-bound, bound);
    return v;
  }
  ChartPoint point(SplitMix64& rng) const { return ChartPoint{uniform(rng, sys().dim(), 2.0)}; }
  CState state(SplitMix64& rng, double bound = 2.0) const {
    ChartPoint x{uniform(rng, sys().dim(), bound)};
    return CState{std::move(x), uniform(rng, sys().rank(), bound)};
  }

  const ConstrainedSystem& sys() const { return built_.system; }

  /// Runs `body`, which returns the largest residual over `samples` samples.
  void run(const std::string& check, std::size_t samples, double tol, const std::function<double()>& body) {
    CheckResult r;
    r.name = check;
    r.samples = samples;
    r.tol = options_.tol.value_or(tol);
    try {
      r.max_residual = body();
    } catch (const std::exception& e) {
      r.max_residual = std::numeric_limits<double>::infinity();
      r.error = e.what();
    }
    r.pass = r.error.empty() && r.max_residual <= r.tol;
    checks_.push_back(std::move(r));
  }

  std::vector<CheckResult> take() { return std::move(checks_); }

 private:
  const BuiltSystem& built_;
  std::string name_;
  VerifyOptions options_;
  std::vector<CheckResult> checks_;
};

double drift(const std::vector<double>& series) {
  double worst = 0.0;
  for (double v : series) worst = std::max(worst, std::abs(v - series.front()));
  return worst;
}

double drift(const std::vector<Eigen::VectorXd>& series) {
  double worst = 0.0;
  for (const auto& v : series) worst = std::max(worst, max_abs(v - series.front()));
  return worst;
}

}  // namespace

bool SystemReport::pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
}

const CheckResult* SystemReport::find(const std::string& check) const {
  for (const auto& c : checks)
    if (c.name == check) return &c;
  return nullptr;
}

std::uint64_t default_seed() {
  const char* env = std::getenv("ANHOLONOME_SEED");
  if (env == nullptr || *env == '\0') return 7;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  return (end != nullptr && *end == '\0') ? v : 7;
}

SystemReport verify_system(const SystemSpec& spec, const VerifyOptions& options, const ParameterMap& parameters) {
  const BuiltSystem built = build_system(spec, parameters);
  const ConstrainedSystem& sys = built.system;
  const int n = sys.dim();
  Suite suite(built, spec.name, options);

  suite.run("fd_check", 100, kFdTol, [&] {
    auto rng = suite.rng("fd_check");
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
      const ChartPoint x = suite.point(rng);
      const NaturalVelocity u{suite.uniform(rng, n, 2.0)};
      worst = std::max(worst, fd_check(sys.lagrangian(), x, u, kFdStep));
    }
    return worst;
  });

  suite.run("jacobi", 20, kJacobiTol, [&] {
    auto rng = suite.rng("jacobi");
    double worst = 0.0;
    for (int s = 0; s < 20; ++s) {
      const ChartPoint x = suite.point(rng);
      for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
          for (int k = j + 1; k < n; ++k) {
            worst = std::max(worst, jacobi_residual(sys.frame().field(i), sys.frame().field(j),
                                                    sys.frame().field(k), x));
          }
    }
    return worst;
  });

  // Lifts against central differences along the lifted curves.
  suite.run("lift_consistency", 20, kLiftTol, [&] {
    auto rng = suite.rng("lift_consistency");
    double worst = 0.0;
    const double h = kFdStep;
    for (int s = 0; s < 20; ++s) {
      const ChartPoint x = suite.point(rng);
      const NaturalVelocity u{suite.uniform(rng, n, 2.0)};
      for (int i = 0; i < n; ++i) {
        const VectorField& f = sys.frame().field(i);
        const Eigen::VectorXd xi = f.coeffs(x);
        const Eigen::VectorXd ju = f.jacobian(x) * u.components;
        const double complete =
            (sys.lagrangian().value(ChartPoint{x.coords + h * xi}, NaturalVelocity{u.components + h * ju}) -
             sys.lagrangian().value(ChartPoint{x.coords - h * xi}, NaturalVelocity{u.components - h * ju})) /
            (2.0 * h);
        const double vertical = (sys.lagrangian().value(x, NaturalVelocity{u.components + h * xi}) -
                                 sys.lagrangian().value(x, NaturalVelocity{u.components - h * xi})) /
                                (2.0 * h);
        worst = std::max({worst, std::abs(complete - lift_apply(f, sys.lagrangian(), x, u, LiftMode::complete)),
                          std::abs(vertical - lift_apply(f, sys.lagrangian(), x, u, LiftMode::vertical))});
      }
    }
    return worst;
  });

  suite.run("oracle_equivalence", 200, kOracleTol, [&] {
    auto rng = suite.rng("oracle_equivalence");
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) {
      const CState s = suite.state(rng);
      const Eigen::VectorXd hamel = natural_acceleration(sys, s);
      const Eigen::VectorXd oracle = multiplier_oracle(sys, s).acceleration;
      worst = std::max(worst, max_abs(hamel - oracle) / std::max(1.0, max_abs(oracle)));
    }
    return worst;
  });

  suite.run("energy_identity", 200, kEnergyIdentityTol, [&] {
    auto rng = suite.rng("energy_identity");
    double worst = 0.0;
    for (int i = 0; i < 200; ++i) worst = std::max(worst, std::abs(energy_rate(sys, suite.state(rng))));
    return worst;
  });

  // One seeded trajectory serves the drift and commutation checks.
  auto traj_rng = suite.rng("trajectory");
  const CState s0 = suite.state(traj_rng, 1.0);
  std::optional<Trajectory> full;
  suite.run("energy_drift", 1, kEnergyDriftTol, [&] {
    full = integrate(sys, s0, kStep, kHorizon);
    return drift(full->energy);
  });

  if (built.split) {
    const InvariantFrameSplit& split = *built.split;

    suite.run("invariance", 20, kInvarianceTol, [&] {
      auto rng = suite.rng("invariance");
      std::vector<ChartPoint> pts;
      for (int i = 0; i < 20; ++i) pts.push_back(suite.point(rng));
      return verify_invariance(split, pts, kInvarianceTol).max_residual();
    });

    suite.run("momentum_residual", 100, kMomentumResidualTol, [&] {
      auto rng = suite.rng("momentum_residual");
      double worst = 0.0;
      for (int i = 0; i < 100; ++i) worst = std::max(worst, max_abs(momentum_and_residual(split, suite.state(rng)).residual));
      return worst;
    });

    suite.run("coefficient_crosscheck", 50, kCrosscheckTol, [&] {
      auto rng = suite.rng("coefficient_crosscheck");
      double worst = 0.0;
      for (int i = 0; i < 50; ++i) worst = std::max(worst, coefficient_crosscheck(split, suite.point(rng)).max());
      return worst;
    });

    suite.run("reduction_commutation", 1, kCommutationTol, [&] {
      if (!full) full = integrate(sys, s0, kStep, kHorizon);
      const ReducedTrajectory reduced = integrate_reduced(split, project_state(split, s0), kStep, kHorizon);
      return projection_gap(split, *full, reduced);
    });
  }

  if (built.horizontal) {
    const HorizontalSymmetryModel& model = *built.horizontal;
    suite.run("level_set_drift", 1, kLevelSetTol, [&] {
      if (!full) full = integrate(sys, s0, kStep, kHorizon);
      std::vector<Eigen::VectorXd> p;
      for (const CState& s : full->states) p.push_back(level_momenta(model, s));
      return drift(p);
    });

    suite.run("routh_consistency", 1, kRouthTol, [&] {
      if (!full) full = integrate(sys, s0, kStep, kHorizon);
      const MomentumLevel mu{level_momenta(model, s0)};
      const RouthTrajectory routh = integrate_routh(model, mu, project_to_level(model, s0), kStep, kHorizon);
      return routh_projection_gap(model, *full, routh);
    });

    const auto& fund = model.split().group().fundamental();
    const auto& group_coords = model.split().trivialization().group_coords;
    bool coordinate_group = fund.size() >= 2;
    for (std::size_t r = 0; r < fund.size() && coordinate_group; ++r) {
      coordinate_group = max_abs(fund[r].coeffs(s0.x) - Eigen::VectorXd::Unit(n, group_coords[r])) == 0.0;
    }
    if (coordinate_group) {
      suite.run("two_stage_reduction", 1, kTwoStageTol, [&] {
        const MomentumLevel mu{level_momenta(model, s0)};
        std::vector<int> rest;
        for (int r = 1; r < static_cast<int>(fund.size()); ++r) rest.push_back(r);
        return two_stage_gap(model, mu, project_to_level(model, s0), {0}, rest, kStep, kHorizon);
      });
    }
  }

  return SystemReport{spec.name, suite.take()};
}

std::vector<SystemReport> verify_systems(const std::vector<const SystemSpec*>& specs, const VerifyOptions& options,
                                         bool parallel) {
  std::vector<SystemReport> out;
  if (!parallel) {
    for (const SystemSpec* s : specs) out.push_back(verify_system(*s, options));
    return out;
  }
  std::vector<std::future<SystemReport>> jobs;
  for (const SystemSpec* s : specs) {
    jobs.push_back(std::async(std::launch::async, [s, &options] { return verify_system(*s, options); }));
  }
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

void write_report(std::ostream& out, const std::vector<SystemReport>& reports, const VerifyOptions& options) {
  CsvWriter csv(out);
  csv.comment("version", kVersion);
  csv.comment("seed", std::to_string(options.seed));
  csv.header({"check", "samples", "max_residual", "tol", "pass"});
  bool all = true;
  for (const SystemReport& r : reports) {
    csv.comment("system", r.system);
    for (const CheckResult& c : r.checks) {
      if (!c.error.empty()) csv.comment("error", c.name + ": " + c.error);
      csv.row(std::vector<std::string>{c.name, std::to_string(c.samples), format_double(c.max_residual),
                                       format_double(c.tol), c.pass ? "true" : "false"});
    }
    all = all && r.pass();
  }
  csv.comment("result", all ? "pass" : "fail");
}

}  // namespace anholonome
