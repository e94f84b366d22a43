#include <gtest/gtest.h>

#include "anholonome/errors.hpp"
#include "anholonome/frame.hpp"
#include "generators.hpp"

using namespace anholonome;

namespace {

ChartPoint pt(std::initializer_list<double> v) {
  ChartPoint p{Eigen::VectorXd(static_cast<Eigen::Index>(v.size()))};
  std::copy(v.begin(), v.end(), p.coords.data());
  return p;
}

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd r(static_cast<Eigen::Index>(v.size()));
  std::copy(v.begin(), v.end(), r.data());
  return r;
}

VectorField dx(int n) {
  return make_vector_field(n, "dx", [](auto, auto out) { out[0] = 1.0; });
}

VectorField x_dy(int n) {
  return make_vector_field(n, "x dy", [](auto x, auto out) { out[1] = x[0]; });
}

Frame paper_frame() {
  return Frame({make_vector_field(3, "X1", [](auto x, auto out) { out[0] = 1.0; out[2] = x[0]; }),
                make_vector_field(3, "X2", [](auto, auto out) { out[1] = 1.0; }),
                make_vector_field(3, "X3", [](auto, auto out) { out[2] = 1.0; })});
}

const ScalarOnTQ& half_square() {
  static const ScalarOnTQ f = make_scalar_on_tq(3, [](auto, auto u) {
    return 0.5 * (u[0] * u[0] + u[1] * u[1] + u[2] * u[2]);
  });
  return f;
}

}  // namespace

TEST(Bracket, LinearCoefficients) {
  EXPECT_TRUE(bracket(dx(2), x_dy(2), pt({5, 0})).isApprox(vec({0, 1})));
  EXPECT_TRUE(bracket(x_dy(2), dx(2), pt({5, 0})).isApprox(vec({0, -1})));
  EXPECT_EQ(bracket(x_dy(2), x_dy(2), pt({5, 3})).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Bracket, PaperFrameCommutes) {
  const Frame f = paper_frame();
  SplitMix64 rng(3);
  for (int s = 0; s < 10; ++s) {
    const ChartPoint x = gen::random_point(rng, 3);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) EXPECT_LE(bracket(f.field(i), f.field(j), x).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(Bracket, JacobiIdentityOnRandomFields) {
  SplitMix64 rng(5);
  for (int s = 0; s < 20; ++s) {
    const auto sys = gen::random_system(gen::random_coefficients(rng), 3);
    const ChartPoint x = gen::random_point(rng, 3);
    const auto& fs = sys.frame().fields();
    EXPECT_LE(jacobi_residual(fs[0], fs[1], fs[2], x), 1e-12);
  }
}

TEST(Bracket, JacobianMatchesDifferences) {
  const VectorField a = make_vector_field(2, "a", [](auto x, auto out) { out[0] = sin(x[1]); out[1] = x[0] * x[1]; });
  const VectorField b = make_vector_field(2, "b", [](auto x, auto out) { out[0] = x[0] * x[0]; out[1] = cos(x[0]); });
  const ChartPoint x = pt({0.3, -0.8});
  const Eigen::MatrixXd j = bracket_jacobian(a, b, x);
  const double h = 1e-6;
  for (int m = 0; m < 2; ++m) {
    ChartPoint xp = x, xm = x;
    xp.coords[m] += h;
    xm.coords[m] -= h;
    const Eigen::VectorXd fd = (bracket(a, b, xp) - bracket(a, b, xm)) / (2 * h);
    EXPECT_LE((j.col(m) - fd).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(StructureFunctions, CoordinateFrameIsHolonomic) {
  const Frame f({dx(2), make_vector_field(2, "dy", [](auto, auto out) { out[1] = 1.0; })});
  EXPECT_EQ(structure_functions(f, pt({0.7, -2})).max_abs(), 0.0);
}

TEST(StructureFunctions, DxAndXDy) {
  const Frame f({dx(2), x_dy(2)}, "x > 0");
  const Tensor3 r = structure_functions(f, pt({2, 0}));
  EXPECT_NEAR(r(1, 0, 1), 0.5, 1e-15);
  EXPECT_NEAR(r(1, 1, 0), -0.5, 1e-15);
  EXPECT_EQ(r(0, 0, 1), 0.0);
  EXPECT_EQ(r(0, 1, 0), 0.0);
}

TEST(StructureFunctions, PaperFrameVanishes) {
  EXPECT_LE(structure_functions(paper_frame(), pt({1.3, 0.2, -4})).max_abs(), 1e-15);
}

TEST(StructureFunctions, ReproduceBrackets) {
  SplitMix64 rng(17);
  for (int s = 0; s < 20; ++s) {
    const auto sys = gen::random_system(gen::random_coefficients(rng), 3);
    const ChartPoint x = gen::random_point(rng, 3);
    const Frame& f = sys.frame();
    const Tensor3 r = structure_functions(f, x);
    const Eigen::MatrixXd m = f.matrix(x);
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        Eigen::VectorXd coeffs(3);
        for (int k = 0; k < 3; ++k) coeffs[k] = r(k, i, j);
        EXPECT_LE((m * coeffs - bracket(f.field(i), f.field(j), x)).cwiseAbs().maxCoeff(), 1e-12);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(r(k, i, j), -r(k, j, i), 1e-14);
      }
    }
  }
}

TEST(QuasiVelocity, PaperFrame) {
  const Frame f = paper_frame();
  const auto v = quasi_from_natural(f, pt({1, 5, 5}), NaturalVelocity{vec({1, 2, 3})});
  EXPECT_TRUE(v.components.isApprox(vec({1, 2, 2})));
  const auto u = natural_from_quasi(f, pt({1, 5, 5}), QuasiVelocity{vec({1, 2, 0})});
  EXPECT_TRUE(u.components.isApprox(vec({1, 2, 1})));
  EXPECT_EQ(quasi_from_natural(f, pt({1, 0, 0}), NaturalVelocity{vec({0, 0, 0})}).components.norm(), 0.0);
}

TEST(QuasiVelocity, UnitQuasiVelocityGivesFieldComponents) {
  const Frame f = paper_frame();
  const ChartPoint x = pt({-0.6, 1, 2});
  for (int i = 0; i < 3; ++i) {
    const auto u = natural_from_quasi(f, x, QuasiVelocity{Eigen::VectorXd::Unit(3, i)});
    EXPECT_TRUE(u.components.isApprox(f.field(i).coeffs(x)));
  }
}

TEST(QuasiVelocity, CoordinateFrameIsIdentity) {
  const Frame f({dx(2), make_vector_field(2, "dy", [](auto, auto out) { out[1] = 1.0; })});
  const auto v = quasi_from_natural(f, pt({0.1, 0.2}), NaturalVelocity{vec({3, -4})});
  EXPECT_TRUE(v.components.isApprox(vec({3, -4})));
}

TEST(QuasiVelocity, RoundTripOnRandomFrames) {
  SplitMix64 rng(23);
  for (int s = 0; s < 100; ++s) {
    const auto sys = gen::random_system(gen::random_coefficients(rng), 3);
    const ChartPoint x = gen::random_point(rng, 3);
    const NaturalVelocity u = gen::random_velocity(rng, 3);
    const auto back = natural_from_quasi(sys.frame(), x, quasi_from_natural(sys.frame(), x, u));
    EXPECT_LE((back.components - u.components).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Lift, VerticalAndComplete) {
  const Frame f = paper_frame();
  EXPECT_NEAR(lift_apply(f.field(0), half_square(), pt({1, 0, 0}), NaturalVelocity{vec({1, 0, 2})},
                         LiftMode::vertical),
              3.0, 1e-14);
  EXPECT_NEAR(lift_apply(f.field(0), half_square(), pt({0, 0, 0}), NaturalVelocity{vec({1, 0, 1})},
                         LiftMode::complete),
              1.0, 1e-14);
  const auto potential = make_scalar_on_tq(3, [](auto x, auto u) { return 0.0 * u[0] + x[0] * x[1]; });
  EXPECT_EQ(lift_apply(f.field(0), potential, pt({1, 2, 3}), NaturalVelocity{vec({1, 1, 1})}, LiftMode::vertical),
            0.0);
}

TEST(Lift, CompleteLiftIsDerivativeAlongLiftedFlow) {
  // X^C(f) = d/dt f(phi_t(x), Dphi_t u) at t=0; phi_t for X = dx + x dz is
  // (x+t, y, z + x t + t^2/2), so Dphi_t u = (u1, u2, u3 + t u1).
  const auto f = make_scalar_on_tq(3, [](auto x, auto u) { return sin(x[2]) * u[0] * u[2] + x[0] * u[1] * u[1]; });
  const ChartPoint x = pt({0.4, -0.3, 0.9});
  const Eigen::VectorXd u = vec({0.7, -1.2, 0.5});
  auto flowed = [&](double t) {
    ChartPoint xt = pt({x.coords[0] + t, x.coords[1], x.coords[2] + x.coords[0] * t + 0.5 * t * t});
    NaturalVelocity ut{vec({u[0], u[1], u[2] + t * u[0]})};
    return f.value(xt, ut);
  };
  const double h = 1e-5;
  const double fd = (flowed(h) - flowed(-h)) / (2 * h);
  EXPECT_NEAR(lift_apply(paper_frame().field(0), f, x, NaturalVelocity{u}, LiftMode::complete), fd, 1e-8);
}

TEST(ComposeWithFields, QuasiVelocityLagrangian) {
  const Frame f = paper_frame();
  const ScalarOnTQ l = compose_with_fields(half_square(), {f.field(0), f.field(1)});
  EXPECT_EQ(l.dim(), 3);
  EXPECT_EQ(l.fibre_dim(), 2);
  const Jet2 j = l.eval(pt({1, 0, 0}), NaturalVelocity{vec({1, 2})});
  EXPECT_NEAR(j.value, 3.0, 1e-14);  // u = (1, 2, 1)
  EXPECT_NEAR(j.d_uu(0, 0), 2.0, 1e-14);
  EXPECT_NEAR(j.d_x[0], 1.0, 1e-14);  // d/dx of x^2 s1^2 / 2
  EXPECT_LE(fd_check(l, pt({0.3, 1, 2}), NaturalVelocity{vec({-0.4, 0.8})}, 1e-5), 1e-8);
}

TEST(Frame, SingularAndMalformed) {
  const Frame f({dx(2), x_dy(2)}, "x > 0");
  EXPECT_THROW((void)f.matrix(pt({0, 1})), SingularMatrixError);
  EXPECT_THROW((void)quasi_from_natural(f, pt({0, 1}), NaturalVelocity{vec({1, 1})}), SingularMatrixError);
  EXPECT_THROW(Frame({dx(2), dx(3)}), DimensionError);
  EXPECT_THROW(AdaptedFrame(paper_frame(), 4), DimensionError);
}
