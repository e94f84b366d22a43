#include "anholonome/hamel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anholonome/errors.hpp"
#include "anholonome/linalg.hpp"

namespace anholonome {

Method parse_method(std::string_view name) {
  if (name == "rk4") return Method::rk4;
  if (name == "euler") return Method::euler;
  throw ConfigError("unknown integration method '" + std::string(name) + "' (expected rk4|euler)");
}

std::string_view method_name(Method method) { return method == Method::rk4 ? "rk4" : "euler"; }

std::vector<double> sample_times(double h, double t_final) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InvalidModelError("step size must be positive and finite");
  if (!(t_final >= 0.0) || !std::isfinite(t_final)) throw InvalidModelError("final time must be >= 0");
  std::vector<double> times{0.0};
  if (t_final == 0.0) return times;
  const auto steps = static_cast<long>(std::ceil(t_final / h - 1e-9));
  times.reserve(static_cast<std::size_t>(steps) + 1);
  for (long i = 1; i < steps; ++i) times.push_back(static_cast<double>(i) * h);
  times.push_back(t_final);
  return times;
}

ConstrainedSystem::ConstrainedSystem(std::string name, std::vector<std::string> coord_labels,
                                     ScalarOnTQ lagrangian, AdaptedFrame adapted,
                                     std::vector<int> momentum_indices)
    : name_(std::move(name)),
      coord_labels_(std::move(coord_labels)),
      lagrangian_(std::move(lagrangian)),
      adapted_(std::move(adapted)),
      momentum_indices_(std::move(momentum_indices)) {
  const int n = adapted_.frame.dim();
  if (lagrangian_.dim() != n || lagrangian_.fibre_dim() != n) {
    throw DimensionError("Lagrangian and frame of '" + name_ + "' live on different charts");
  }
  if (static_cast<int>(coord_labels_.size()) != n) throw DimensionError("one label per chart coordinate required");
  for (int idx : momentum_indices_) {
    if (idx < 0 || idx >= adapted_.m) throw DimensionError("momentum index must address a field of D");
  }
}

ConstrainedSystem ConstrainedSystem::with_lagrangian(std::string name, ScalarOnTQ lagrangian) const {
  return ConstrainedSystem(std::move(name), coord_labels_, std::move(lagrangian), adapted_, momentum_indices_);
}

namespace {

void check_state(const ConstrainedSystem& sys, const CState& s) {
  if (s.x.coords.size() != sys.dim() || s.v.size() != sys.rank()) {
    throw DimensionError("state does not match system '" + sys.name() + "'");
  }
  if (!s.x.coords.allFinite() || !s.v.allFinite()) throw EvaluationError("non-finite state");
}

Eigen::VectorXd full_quasi(const ConstrainedSystem& sys, const CState& s) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(sys.dim());
  v.head(sys.rank()) = s.v;
  return v;
}

/// Everything the Hamel solve needs at one state.
struct Workspace {
  FrameJets frame;
  Eigen::VectorXd u;
  Eigen::VectorXd xdot_of_frame;  // sum_gamma v^gamma (dX_gamma/dx) u
  Jet2 lag;
};

Workspace prepare(const ConstrainedSystem& sys, const CState& s) {
  check_state(sys, s);
  Workspace w;
  w.frame = sys.frame().jets(s.x);
  const int n = sys.dim();
  w.u = w.frame.matrix.leftCols(sys.rank()) * s.v;
  w.xdot_of_frame = Eigen::VectorXd::Zero(n);
  for (int g = 0; g < sys.rank(); ++g) w.xdot_of_frame += s.v[g] * (w.frame.jacobian[g] * w.u);
  w.lag = sys.lagrangian().eval(s.x, NaturalVelocity{w.u});
  return w;
}

Eigen::MatrixXd mass_from(const Workspace& w, int m) {
  const Eigen::MatrixXd d = w.frame.matrix.leftCols(m);
  Eigen::MatrixXd mm = d.transpose() * w.lag.d_uu * d;
  return 0.5 * (mm + mm.transpose());
}

Eigen::VectorXd quasi_accel_from(const ConstrainedSystem& sys, const Workspace& w) {
  const int m = sys.rank();
  Eigen::VectorXd b(m);
  for (int a = 0; a < m; ++a) {
    const Eigen::VectorXd xa = w.frame.matrix.col(a);
    const Eigen::VectorXd jau = w.frame.jacobian[a] * w.u;
    // X_a^C(L)
    const double complete_lift = xa.dot(w.lag.d_x) + jau.dot(w.lag.d_u);
    // (dp_a/dx^k) u^k with p_a = X_a^i dL/du^i
    const double dp_dx_u = jau.dot(w.lag.d_u) + xa.dot(w.lag.d_ux * w.u);
    // (dp_a/du^j) v^g (dX_g^j/dx^k) u^k
    const double dp_du_frame = xa.dot(w.lag.d_uu * w.xdot_of_frame);
    b[a] = complete_lift - dp_dx_u - dp_du_frame;
  }
  return solve_checked(mass_from(w, m), b, "constrained mass matrix (regularity of L w.r.t. D)");
}

}  // namespace

NaturalVelocity natural_velocity(const ConstrainedSystem& sys, const CState& s) {
  check_state(sys, s);
  return natural_from_quasi(sys.frame(), s.x, QuasiVelocity{full_quasi(sys, s)});
}

Eigen::MatrixXd mass_matrix(const ConstrainedSystem& sys, const CState& s) {
  return mass_from(prepare(sys, s), sys.rank());
}

Eigen::VectorXd constrained_dynamics(const ConstrainedSystem& sys, const CState& s) {
  return quasi_accel_from(sys, prepare(sys, s));
}

Eigen::VectorXd natural_acceleration(const ConstrainedSystem& sys, const CState& s) {
  const Workspace w = prepare(sys, s);
  const Eigen::VectorXd f = quasi_accel_from(sys, w);
  return w.xdot_of_frame + w.frame.matrix.leftCols(sys.rank()) * f;
}

MultiplierSolution multiplier_oracle(const ConstrainedSystem& sys, const ChartPoint& x, const NaturalVelocity& u) {
  const int n = sys.dim();
  const int m = sys.rank();
  const int c = n - m;
  if (x.coords.size() != n || u.components.size() != n) throw DimensionError("oracle state has wrong dimension");

  const FrameJets fj = sys.frame().jets(x);
  const Eigen::MatrixXd inv = fj.matrix.partialPivLu().inverse();
  const Jet2 lag = sys.lagrangian().eval(x, u);

  // d/dt(A) u = -[M^-1 (sum_i v^i dX_i/dx u)]_a, with v = M^-1 u.
  const Eigen::VectorXd v = inv * u.components;
  Eigen::VectorXd mdot_v = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < n; ++i) mdot_v += v[i] * (fj.jacobian[i] * u.components);
  const Eigen::VectorXd adot_u = -(inv * mdot_v).tail(c);

  const Eigen::MatrixXd a = inv.bottomRows(c);
  Eigen::MatrixXd saddle = Eigen::MatrixXd::Zero(n + c, n + c);
  saddle.topLeftCorner(n, n) = lag.d_uu;
  saddle.topRightCorner(n, c) = -a.transpose();
  saddle.bottomLeftCorner(c, n) = a;

  Eigen::VectorXd rhs(n + c);
  rhs.head(n) = lag.d_x - lag.d_ux * u.components;
  rhs.tail(c) = -adot_u;

  const Eigen::VectorXd sol = solve_checked(saddle, rhs, "multiplier saddle system");
  return {sol.head(n), sol.tail(c)};
}

MultiplierSolution multiplier_oracle(const ConstrainedSystem& sys, const CState& s) {
  return multiplier_oracle(sys, s.x, natural_velocity(sys, s));
}

double energy(const ConstrainedSystem& sys, const CState& s) {
  const NaturalVelocity u = natural_velocity(sys, s);
  const Jet2 lag = sys.lagrangian().eval(s.x, u);
  return u.components.dot(lag.d_u) - lag.value;
}

double energy_rate(const ConstrainedSystem& sys, const CState& s) {
  const Workspace w = prepare(sys, s);
  const Eigen::VectorXd f = quasi_accel_from(sys, w);
  const Eigen::VectorXd a = w.xdot_of_frame + w.frame.matrix.leftCols(sys.rank()) * f;
  // dE/dx^k = u^j d2L/du^j dx^k - dL/dx^k ; dE/du^j = u^i d2L/du^i du^j
  const Eigen::VectorXd de_dx = w.lag.d_ux.transpose() * w.u - w.lag.d_x;
  const Eigen::VectorXd de_du = w.lag.d_uu * w.u;
  return de_dx.dot(w.u) + de_du.dot(a);
}

Eigen::VectorXd tracked_momenta(const ConstrainedSystem& sys, const CState& s) {
  const NaturalVelocity u = natural_velocity(sys, s);
  const Jet2 lag = sys.lagrangian().eval(s.x, u);
  const auto& idx = sys.momentum_indices();
  Eigen::VectorXd p(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) p[static_cast<Eigen::Index>(i)] = sys.frame().field(idx[i]).coeffs(s.x).dot(lag.d_u);
  return p;
}

double constraint_residual(const ConstrainedSystem& sys, const ChartPoint& x, const NaturalVelocity& u) {
  const int c = sys.dim() - sys.rank();
  if (c == 0) return 0.0;
  const Eigen::VectorXd theta = sys.frame().inverse(x).bottomRows(c) * u.components;
  return theta.cwiseAbs().maxCoeff();
}

CState project_to_constraint(const ConstrainedSystem& sys, const ChartPoint& x, const NaturalVelocity& u) {
  const QuasiVelocity v = quasi_from_natural(sys.frame(), x, u);
  return {x, v.components.head(sys.rank())};
}

Trajectory integrate(const ConstrainedSystem& sys, const CState& s0, double h, double t_final, Method method) {
  check_state(sys, s0);
  const int n = sys.dim();
  const int m = sys.rank();

  Trajectory traj;
  for (int idx : sys.momentum_indices()) traj.momentum_labels.push_back("P_" + sys.frame().field(idx).label());

  auto unpack = [n, m](const Eigen::VectorXd& y) { return CState{ChartPoint{y.head(n)}, y.tail(m)}; };
  auto rhs = [&](const Eigen::VectorXd& y) {
    const CState s = unpack(y);
    const Workspace w = prepare(sys, s);
    Eigen::VectorXd dy(n + m);
    dy.head(n) = w.u;
    dy.tail(m) = quasi_accel_from(sys, w);
    return dy;
  };
  auto observe = [&](double t, const Eigen::VectorXd& y) {
    const CState s = unpack(y);
    const NaturalVelocity u = natural_velocity(sys, s);
    traj.times.push_back(t);
    traj.states.push_back(s);
    try {
      traj.energy.push_back(energy(sys, s));
      traj.momenta.push_back(tracked_momenta(sys, s));
      traj.constraint_residual.push_back(constraint_residual(sys, s.x, u));
    } catch (const Error& e) {
      throw DynamicsError(t, e.what());
    }
  };

  Eigen::VectorXd y0(n + m);
  y0 << s0.x.coords, s0.v;
  integrate_fixed(method, rhs, y0, h, t_final, observe);
  return traj;
}

NaturalTrajectory integrate_multiplier(const ConstrainedSystem& sys, const ChartPoint& x0,
                                       const NaturalVelocity& u0, double h, double t_final, Method method) {
  const int n = sys.dim();
  NaturalTrajectory traj;
  auto rhs = [&](const Eigen::VectorXd& y) {
    const ChartPoint x{y.head(n)};
    const NaturalVelocity u{y.tail(n)};
    Eigen::VectorXd dy(2 * n);
    dy.head(n) = u.components;
    dy.tail(n) = multiplier_oracle(sys, x, u).acceleration;
    return dy;
  };
  auto observe = [&](double t, const Eigen::VectorXd& y) {
    traj.times.push_back(t);
    traj.x.push_back(ChartPoint{y.head(n)});
    traj.u.push_back(NaturalVelocity{y.tail(n)});
  };
  Eigen::VectorXd y0(2 * n);
  y0 << x0.coords, u0.components;
  integrate_fixed(method, rhs, y0, h, t_final, observe);
  return traj;
}

}  // namespace anholonome
