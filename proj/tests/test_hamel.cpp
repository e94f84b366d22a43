#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "anholonome/errors.hpp"
#include "anholonome/hamel.hpp"
#include "anholonome/zoo.hpp"
#include "generators.hpp"

using namespace anholonome;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), r.data());
  return r;
}

CState cs(std::initializer_list<double> x, std::initializer_list<double> v) { return CState{ChartPoint{vec(x)}, vec(v)}; }

const ConstrainedSystem& paper() {
  static const BuiltSystem b = build_system(*find_system("paper-particle"));
  return b.system;
}

ConstrainedSystem free_particle_3d() {
  auto lag = make_scalar_on_tq(3, [](auto, auto u) { return 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]); });
  std::vector<VectorField> fs;
  for (int i = 0; i < 3; ++i)
    fs.push_back(make_vector_field(3, "d" + std::to_string(i), [i](auto, auto out) { out[i] = 1.0; }));
  return ConstrainedSystem("free", {"x", "y", "z"}, std::move(lag), AdaptedFrame(Frame(std::move(fs)), 3));
}

ConstrainedSystem oscillator() {
  auto lag = make_scalar_on_tq(1, [](auto x, auto u) { return 0.5 * (u[0] * u[0] - x[0] * x[0]); });
  return ConstrainedSystem("osc", {"x"}, std::move(lag),
                           AdaptedFrame(Frame({make_vector_field(1, "d", [](auto, auto out) { out[0] = 1.0; })}), 1));
}

}  // namespace

TEST(MassMatrix, PaperParticle) {
  EXPECT_TRUE(mass_matrix(paper(), cs({1, 0, 0}, {0.3, 0.4})).isApprox(Eigen::Matrix2d{{2, 0}, {0, 1}}));
  EXPECT_TRUE(mass_matrix(paper(), cs({0, 0, 0}, {0.3, 0.4})).isApprox(Eigen::Matrix2d::Identity()));
  EXPECT_TRUE(mass_matrix(free_particle_3d(), cs({1, 2, 3}, {1, 1, 1})).isApprox(Eigen::Matrix3d::Identity()));
}

TEST(ConstrainedDynamics, PaperParticle) {
  for (double vy : {0.0, 2.0, -7.5}) {
    const Eigen::VectorXd f = constrained_dynamics(paper(), cs({1, 0, 0}, {1, vy}));
    EXPECT_NEAR(f[0], -0.5, 1e-14);
    EXPECT_NEAR(f[1], 0.0, 1e-14);
  }
}

TEST(ConstrainedDynamics, ClosedFormOnRandomStates) {
  SplitMix64 rng(29);
  for (int s = 0; s < 50; ++s) {
    const CState st = gen::random_state(rng, paper());
    const double x = st.x.coords[0], xd = st.v[0];
    const Eigen::VectorXd f = constrained_dynamics(paper(), st);
    EXPECT_NEAR(f[0], -x * xd * xd / (1 + x * x), 1e-12);
    EXPECT_NEAR(f[1], 0.0, 1e-12);
  }
}

TEST(ConstrainedDynamics, RestAndFreeMotion) {
  SplitMix64 rng(31);
  for (int s = 0; s < 10; ++s) {
    CState st = gen::random_state(rng, paper());
    st.v.setZero();
    EXPECT_EQ(constrained_dynamics(paper(), st).cwiseAbs().maxCoeff(), 0.0);
    const auto fp = free_particle_3d();
    EXPECT_EQ(constrained_dynamics(fp, gen::random_state(rng, fp)).cwiseAbs().maxCoeff(), 0.0);
  }
}

TEST(MultiplierOracle, PaperParticle) {
  const MultiplierSolution sol = multiplier_oracle(paper(), ChartPoint{vec({1, 0, 0})}, NaturalVelocity{vec({1, 0, 1})});
  EXPECT_TRUE(sol.acceleration.isApprox(vec({-0.5, 0, 0.5}), 1e-14));
  ASSERT_EQ(sol.multipliers.size(), 1);
  EXPECT_NEAR(std::abs(sol.multipliers[0]), 0.5, 1e-14);
  const auto free = multiplier_oracle(free_particle_3d(), ChartPoint{vec({1, 2, 3})}, NaturalVelocity{vec({4, 5, 6})});
  EXPECT_EQ(free.acceleration.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(free.multipliers.size(), 0);
}

TEST(MultiplierOracle, AgreesWithNaturalAcceleration) {
  SplitMix64 rng(37);
  for (int s = 0; s < 30; ++s) {
    const CState st = gen::random_state(rng, paper());
    const Eigen::VectorXd a = natural_acceleration(paper(), st);
    EXPECT_LE((a - multiplier_oracle(paper(), st).acceleration).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Energy, PaperParticle) {
  EXPECT_NEAR(energy(paper(), cs({1, 0, 0}, {1, 2})), 3.0, 1e-14);
  EXPECT_EQ(energy(paper(), cs({1, 0, 0}, {0, 0})), 0.0);
  SplitMix64 rng(41);
  for (int s = 0; s < 20; ++s) EXPECT_LE(std::abs(energy_rate(paper(), gen::random_state(rng, paper()))), 1e-12);
}

TEST(Momenta, PaperParticleTracksVy) {
  const Eigen::VectorXd p = tracked_momenta(paper(), cs({0.4, 1, 2}, {0.5, -1.5}));
  ASSERT_EQ(p.size(), 1);
  EXPECT_NEAR(p[0], -1.5, 1e-15);
  EXPECT_LE(constraint_residual(paper(), ChartPoint{vec({1, 0, 0})}, NaturalVelocity{vec({1, 2, 1})}), 1e-15);
  EXPECT_NEAR(constraint_residual(paper(), ChartPoint{vec({1, 0, 0})}, NaturalVelocity{vec({1, 2, 3})}), 2.0, 1e-14);
}

TEST(Integrate, HarmonicOscillatorPeriod) {
  const auto traj = integrate(oscillator(), cs({1}, {0}), 1e-3, 2 * std::numbers::pi);
  EXPECT_DOUBLE_EQ(traj.times.back(), 2 * std::numbers::pi);
  EXPECT_NEAR(traj.states.back().x.coords[0], 1.0, 1e-9);
  EXPECT_NEAR(traj.states.back().v[0], 0.0, 1e-9);
}

TEST(Integrate, ZeroHorizonReturnsInitialState) {
  const CState s0 = cs({0.2, 1, -1}, {0.3, 0.7});
  const auto traj = integrate(paper(), s0, 1e-3, 0.0);
  ASSERT_EQ(traj.states.size(), 1u);
  EXPECT_EQ(traj.times[0], 0.0);
  EXPECT_TRUE(traj.states[0].x.coords == s0.x.coords);
  EXPECT_TRUE(traj.states[0].v == s0.v);
}

TEST(Integrate, PaperParticleConservation) {
  const auto traj = integrate(paper(), cs({0, 0, 0}, {1, 0}), 1e-3, 5.0);
  double drift = 0, pdrift = 0, res = 0;
  for (std::size_t i = 0; i < traj.times.size(); ++i) {
    drift = std::max(drift, std::abs(traj.energy[i] - traj.energy[0]));
    pdrift = std::max(pdrift, std::abs(traj.momenta[i][0] - traj.momenta[0][0]));
    res = std::max(res, traj.constraint_residual[i]);
  }
  EXPECT_LE(drift, 1e-10);
  EXPECT_LE(pdrift, 1e-12);
  EXPECT_LE(res, 1e-12);
  // z = x^2 / 2 along the constraint when started at the origin.
  const auto& last = traj.states.back().x.coords;
  EXPECT_NEAR(last[2], 0.5 * last[0] * last[0], 1e-9);
}

TEST(Integrate, EulerIsFirstOrder) {
  const auto coarse = integrate(oscillator(), cs({1}, {0}), 1e-2, 1.0, Method::euler);
  const auto fine = integrate(oscillator(), cs({1}, {0}), 5e-3, 1.0, Method::euler);
  const double e1 = std::abs(coarse.states.back().x.coords[0] - std::cos(1.0));
  const double e2 = std::abs(fine.states.back().x.coords[0] - std::cos(1.0));
  EXPECT_NEAR(e1 / e2, 2.0, 0.1);
}

TEST(Integrate, MultiplierFormulationTracksConstrainedFlow) {
  const CState s0 = cs({0.3, 0, 0.1}, {0.8, -0.4});
  const auto full = integrate(paper(), s0, 1e-3, 2.0);
  const auto nat = integrate_multiplier(paper(), s0.x, natural_velocity(paper(), s0), 1e-3, 2.0);
  ASSERT_EQ(full.times.size(), nat.times.size());
  EXPECT_LE((full.states.back().x.coords - nat.x.back().coords).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Integrate, FailureCarriesTime) {
  // x'' = x^2 escapes to infinity in finite time.
  auto lag = make_scalar_on_tq(1, [](auto x, auto u) { return 0.5 * u[0] * u[0] + x[0] * x[0] * x[0] / 3.0; });
  const ConstrainedSystem sys("blowup", {"x"}, std::move(lag),
                              AdaptedFrame(Frame({make_vector_field(1, "d", [](auto, auto out) { out[0] = 1.0; })}), 1));
  try {
    (void)integrate(sys, cs({1}, {1}), 1e-2, 10.0);
    FAIL() << "expected a dynamics failure";
  } catch (const DynamicsError& e) {
    EXPECT_GT(e.time(), 0.0);
    EXPECT_LT(e.time(), 10.0);
  }
}

TEST(SampleTimes, LastStepLandsOnHorizon) {
  const auto t = sample_times(0.3, 1.0);
  ASSERT_EQ(t.size(), 5u);
  EXPECT_EQ(t.back(), 1.0);
  EXPECT_EQ(sample_times(1e-3, 0.0).size(), 1u);
  EXPECT_EQ(parse_method("euler"), Method::euler);
  EXPECT_THROW((void)parse_method("leapfrog"), ConfigError);
}
