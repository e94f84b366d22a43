#include <cmath>

#include <gtest/gtest.h>

#include "anholonome/errors.hpp"
#include "anholonome/routh.hpp"
#include "anholonome/zoo.hpp"
#include "generators.hpp"

using namespace anholonome;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), r.data());
  return r;
}

ChartPoint pt(std::initializer_list<double> v) { return ChartPoint{vec(v)}; }

const BuiltSystem& built(const std::string& name) {
  static std::map<std::string, BuiltSystem> cache;
  auto it = cache.find(name);
  if (it == cache.end()) it = cache.emplace(name, build_system(*find_system(name))).first;
  return it->second;
}

const HorizontalSymmetryModel& paper() { return *built("paper-particle").horizontal; }

VectorField coord(int n, int j) {
  return make_vector_field(n, "d" + std::to_string(j), [j](auto, auto out) { out[j] = 1.0; });
}

ChartFunction identity_coefficients(int n, int k) {
  return make_chart_function(n, k * k, [k](auto, auto out) {
    for (int r = 0; r < k; ++r) out[r * k + r] = 1.0;
  });
}

std::vector<ChartPoint> samples() { return {pt({0.1, 0.2, 0.3}), pt({-1.5, 2, 0.7})}; }

// Unconstrained R^3 with a constant metric whose (y, z) block is diagonal.
const double kCross[2] = {0.4, 0.3};
const double kDiag[2] = {2.0, 3.0};

HorizontalSymmetryModel diagonal_model() {
  auto lag = make_scalar_on_tq(3, [](auto, auto u) {
    return 0.5 * (u[0] * u[0] + kDiag[0] * u[1] * u[1] + kDiag[1] * u[2] * u[2]) + kCross[0] * u[0] * u[1] +
           kCross[1] * u[0] * u[2];
  });
  ConstrainedSystem sys("diag", {"x", "y", "z"}, std::move(lag),
                        AdaptedFrame(Frame({coord(3, 0), coord(3, 1), coord(3, 2)}), 3));
  InvariantFrameSplit split(sys, GroupModel({coord(3, 1), coord(3, 2)}, Tensor3(2, 2, 2)),
                            SplitBlocks{{1, 2}, {0}, {}, {}}, identity_coefficients(3, 2),
                            Trivialization{{0}, {1, 2}, Eigen::VectorXd::Zero(2), {}});
  return HorizontalSymmetryModel(std::move(split), {0, 1}, samples());
}

// A free body on SE(2): the sleigh Lagrangian without the knife edge.
InvariantFrameSplit free_se2_split() {
  const auto& sleigh = built("chaplygin-sleigh");
  const auto& s = *sleigh.split;
  ConstrainedSystem sys("free-se2", s.system().coord_labels(), s.system().lagrangian(),
                        AdaptedFrame(s.system().frame(), 3));
  auto coeffs = make_chart_function(3, 9, [](auto x, auto out) {
    out[0] = 1.0;
    out[1] = x[1];
    out[2] = -x[0];
    out[4] = cos(x[2]);
    out[5] = sin(x[2]);
    out[7] = -sin(x[2]);
    out[8] = cos(x[2]);
  });
  return InvariantFrameSplit(sys, s.group(), SplitBlocks{{0, 1, 2}, {}, {}, {}}, std::move(coeffs),
                             s.trivialization());
}

}  // namespace

TEST(MomentumSolve, PaperParticle) {
  EXPECT_NEAR(momentum_solve(paper(), MomentumLevel{vec({2})}, pt({0.4, 1, 2}), vec({0.7}))[0], 2.0, 1e-14);
  EXPECT_EQ(momentum_solve(paper(), MomentumLevel{vec({0})}, pt({0.4, 1, 2}), vec({0.7}))[0], 0.0);
}

TEST(MomentumSolve, DiagonalLinearOracle) {
  const auto model = diagonal_model();
  SplitMix64 rng(101);
  for (int i = 0; i < 20; ++i) {
    const Eigen::VectorXd mu = gen::random_vector(rng, 2);
    const double w = rng.uniform(-2, 2);
    const Eigen::VectorXd iota = momentum_solve(model, MomentumLevel{mu}, gen::random_point(rng, 3), vec({w}));
    for (int r = 0; r < 2; ++r) EXPECT_NEAR(iota[r], (mu[r] - kCross[r] * w) / kDiag[r], 1e-12);
  }
}

TEST(MomentumSolve, NonQuadraticLagrangianConverges) {
  // L = cosh-like kinetic term in ydot: dL/dydot = ydot + ydot^3 / 3 is monotone.
  auto lag = make_scalar_on_tq(3, [](auto, auto u) {
    return 0.5 * u[0] * u[0] + 0.5 * u[1] * u[1] + u[1] * u[1] * u[1] * u[1] / 12.0 + 0.5 * u[2] * u[2];
  });
  ConstrainedSystem sys("quartic", {"x", "y", "z"}, std::move(lag),
                        AdaptedFrame(Frame({coord(3, 0), coord(3, 1), coord(3, 2)}), 2));
  InvariantFrameSplit split(sys, GroupModel({coord(3, 1), coord(3, 2)}, Tensor3(2, 2, 2)),
                            SplitBlocks{{1}, {0}, {2}, {}}, identity_coefficients(3, 2),
                            Trivialization{{0}, {1, 2}, Eigen::VectorXd::Zero(2), {}});
  const HorizontalSymmetryModel model(std::move(split), {0}, samples());
  for (double mu : {-20.0, -1.0, 0.5, 3.0, 40.0}) {
    const double iota = momentum_solve(model, MomentumLevel{vec({mu})}, pt({0, 0, 0}), vec({1}))[0];
    EXPECT_NEAR(iota + iota * iota * iota / 3.0, mu, 1e-12 * std::max(1.0, std::abs(mu)));
  }
}

TEST(Routhian, PaperClosedForm) {
  SplitMix64 rng(103);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(-2, 2), xd = rng.uniform(-2, 2), mu = rng.uniform(-3, 3);
    const double r = routhian(paper(), MomentumLevel{vec({mu})}, pt({x, 0.5, -1}), vec({xd}));
    EXPECT_NEAR(r, 0.5 * ((1 + x * x) * xd * xd - mu * mu), 1e-12);
  }
  EXPECT_NEAR(routhian(paper(), MomentumLevel{vec({1})}, pt({0, 0, 0}), vec({0})), -0.5, 1e-15);
}

TEST(Routhian, ZeroLevelIsRestrictedLagrangian) {
  const ChartPoint x = pt({0.6, 0, 0});
  const double l = paper().system().lagrangian().value(x, NaturalVelocity{vec({1.2, 0, 0.6 * 1.2})});
  EXPECT_NEAR(routhian(paper(), MomentumLevel{vec({0})}, x, vec({1.2})), l, 1e-15);
}

TEST(Routhian, JetMatchesFiniteDifferences) {
  SplitMix64 rng(107);
  const auto model = diagonal_model();
  for (const auto* m : {&paper(), &model}) {
    const MomentumLevel mu{gen::random_vector(rng, m->h_dim())};
    const ScalarOnTQ r = routhian_function(*m, mu);
    EXPECT_EQ(r.fibre_dim(), m->kappa_dim());
    for (int i = 0; i < 10; ++i) {
      EXPECT_LE(fd_check(r, gen::random_point(rng, 3), NaturalVelocity{gen::random_vector(rng, 1)}, 1e-5),
                1e-7);
    }
  }
}

TEST(RouthRhs, PaperIndependentOfLevel) {
  SplitMix64 rng(109);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(-2, 2), xd = rng.uniform(-2, 2);
    for (double mu : {0.0, 1.0, -2.5}) {
      const auto f = routh_rhs(paper(), MomentumLevel{vec({mu})}, RouthState{pt({x, 0.1, 0.2}), vec({xd})});
      EXPECT_NEAR(f[0], -x * xd * xd / (1 + x * x), 1e-12);
    }
  }
}

TEST(RouthRhs, ZeroLevelMatchesReducedRhs) {
  SplitMix64 rng(113);
  for (int i = 0; i < 50; ++i) {
    const double x = rng.uniform(-2, 2), xd = rng.uniform(-2, 2);
    const auto red = reduced_rhs(paper().split(), ReducedState{vec({x}), vec({0}), vec({xd})});
    const auto f = routh_rhs(paper(), MomentumLevel{vec({0})}, RouthState{pt({x, 0, 0}), vec({xd})});
    EXPECT_NEAR(f[0], red.f_kappa[0], 1e-9);
  }
}

TEST(RouthRhs, AgreesWithFullDynamicsOnLevelSet) {
  SplitMix64 rng(127);
  const auto model = diagonal_model();
  for (const auto* m : {&paper(), &model, &*built("free-particle").horizontal}) {
    for (int i = 0; i < 20; ++i) {
      const MomentumLevel mu{gen::random_vector(rng, m->h_dim())};
      const RouthState s{gen::random_point(rng, 3), gen::random_vector(rng, m->kappa_dim())};
      const CState full = lift_to_constraint(*m, mu, s);
      EXPECT_LE((level_momenta(*m, full) - mu.mu).cwiseAbs().maxCoeff(), 1e-11);
      const Eigen::VectorXd f_full = constrained_dynamics(m->system(), full);
      const Eigen::VectorXd f = routh_rhs(*m, mu, s);
      for (int j = 0; j < m->kappa_dim(); ++j)
        EXPECT_NEAR(f[j], f_full[m->split().blocks().kappa[j]], 1e-10);
      const RouthState back = project_to_level(*m, full);
      EXPECT_LE((back.x.coords - s.x.coords).cwiseAbs().maxCoeff(), 1e-15);
      EXPECT_LE((back.v_kappa - s.v_kappa).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(HorizontalSymmetryModel, RejectsNonIdeal) {
  // In se(2) the translations form an ideal; {theta, x} does not.
  EXPECT_THROW(HorizontalSymmetryModel(*built("chaplygin-sleigh").split, {0, 1}, samples()), InvalidModelError);
}

TEST(HorizontalSymmetryModel, RejectsBadIndices) {
  const auto& split = *built("paper-particle").split;
  EXPECT_THROW(HorizontalSymmetryModel(split, {}, samples()), InvalidModelError);
  EXPECT_THROW(HorizontalSymmetryModel(split, {5}, samples()), InvalidModelError);
  EXPECT_THROW(HorizontalSymmetryModel(split, {0}, {}), InvalidModelError);
  // z is a symmetry but leaves D.
  EXPECT_THROW(HorizontalSymmetryModel(split, {1}, samples()), InvalidModelError);
}

TEST(HorizontalSymmetryModel, RequiresVerticalPlusDistributionToSpan) {
  // D = span{d/dy}, G = y translations: d/dx and d/dz are neither in V nor in D.
  auto lag = make_scalar_on_tq(3, [](auto, auto u) { return 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]); });
  ConstrainedSystem sys("thin", {"x", "y", "z"}, std::move(lag),
                        AdaptedFrame(Frame({coord(3, 1), coord(3, 0), coord(3, 2)}), 1));
  InvariantFrameSplit split(sys, GroupModel({coord(3, 1)}, Tensor3(1, 1, 1)), SplitBlocks{{0}, {}, {}, {1, 2}},
                            identity_coefficients(3, 1), Trivialization{{0, 2}, {1}, Eigen::VectorXd::Zero(1), {}});
  EXPECT_THROW(HorizontalSymmetryModel(std::move(split), {0}, samples()), InvalidModelError);
}

TEST(Isotropy, FreeRigidBodyInThePlane) {
  const HorizontalSymmetryModel model(free_se2_split(), {0, 1, 2}, samples());
  const MomentumLevel mu{vec({0, 1, 0})};  // pure x momentum
  EXPECT_TRUE(in_isotropy_g(model, mu, vec({0, 1, 0})));
  EXPECT_FALSE(in_isotropy_g(model, mu, vec({0, 0, 1})));
  const Eigen::VectorXd res = isotropy_residual_g(model, mu, vec({0, 0, 1}));
  EXPECT_NEAR(res[0], -1.0, 1e-15);
  EXPECT_EQ(res[1], 0.0);
  EXPECT_EQ(res[2], 0.0);
  EXPECT_FALSE(in_isotropy_g(model, mu, vec({1, 0, 0})));
  EXPECT_TRUE(in_isotropy_h(model, mu, vec({0, 1, 0})));
  EXPECT_TRUE(isotropy_residual_h(model, mu, vec({0, 0, 1})).isApprox(res));
  EXPECT_THROW((void)isotropy_residual_g(model, mu, vec({1, 0})), DimensionError);
}

TEST(Isotropy, AbelianLevelsAreFullyIsotropic) {
  const MomentumLevel mu{vec({3})};
  EXPECT_TRUE(in_isotropy_g(paper(), mu, vec({1, -2})));
  EXPECT_TRUE(in_isotropy_h(paper(), mu, vec({4})));
}

TEST(IntegrateRouth, MatchesFullTrajectory) {
  for (double mu : {0.0, 1.0, 2.0}) {
    const MomentumLevel level{vec({mu})};
    const RouthState s0{pt({0, 0, 0}), vec({1})};
    const auto routh = integrate_routh(paper(), level, s0, 1e-3, 5.0);
    const auto full = integrate(paper().system(), lift_to_constraint(paper(), level, s0), 1e-3, 5.0);
    EXPECT_LE(routh_projection_gap(paper(), full, routh), 1e-6) << mu;
    double drift = 0.0;
    for (const auto& p : full.momenta) drift = std::max(drift, std::abs(p[0] - mu));
    EXPECT_LE(drift, 1e-10);
    for (std::size_t i = 0; i < routh.states.size(); i += 500) {
      const double x = routh.states[i].x.coords[0], xd = routh.states[i].v_kappa[0];
      EXPECT_NEAR(routh.routhian[i], 0.5 * ((1 + x * x) * xd * xd - mu * mu), 1e-12);
    }
  }
}

TEST(IntegrateRouth, TwoStageQuotient) {
  const MomentumLevel level{vec({2})};
  const RouthState s0{pt({0.2, 0, 0}), vec({0.8})};
  EXPECT_LE(two_stage_gap(paper(), level, s0, {0}, {1}, 1e-3, 5.0), 1e-9);
  EXPECT_LE(two_stage_gap(paper(), level, s0, {1}, {0}, 1e-3, 5.0), 1e-9);
}

TEST(IntegrateRouth, FrozenDirectionsMustBeCoordinateFields) {
  const HorizontalSymmetryModel model(free_se2_split(), {0, 1, 2}, samples());
  const RouthState s0{pt({0, 0, 0}), Eigen::VectorXd(0)};
  EXPECT_THROW((void)integrate_routh(model, MomentumLevel{vec({0, 1, 0})}, s0, 1e-2, 0.1, Method::rk4, {0}),
               InvalidModelError);
  EXPECT_THROW((void)integrate_routh(paper(), MomentumLevel{vec({1})}, RouthState{pt({0, 0, 0}), vec({1})}, 1e-2,
                                     0.1, Method::rk4, {7}),
               InvalidModelError);
}
