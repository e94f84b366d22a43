#include "anholonome/routh.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anholonome/errors.hpp"

namespace anholonome {

namespace {

constexpr double kIdealTolerance = 1e-12;
constexpr double kInDistributionTolerance = 1e-10;
constexpr int kNewtonIterations = 50;
constexpr double kNewtonTolerance = 1e-12;

std::vector<int> complement_indices(int k, const std::vector<int>& h) {
  std::vector<int> c;
  for (int r = 0; r < k; ++r)
    if (std::find(h.begin(), h.end(), r) == h.end()) c.push_back(r);
  return c;
}

// Runs before the mixed frame is assembled, which needs valid indices.
void check_indices(const InvariantFrameSplit& split, const std::vector<int>& h) {
  const int k = split.group().dim();
  if (h.size() != split.blocks().rho.size()) {
    throw InvalidModelError("horizontal symmetries must match the rho block in size");
  }
  std::vector<int> sorted = h;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end() ||
      std::any_of(h.begin(), h.end(), [k](int r) { return r < 0 || r >= k; })) {
    throw InvalidModelError("horizontal symmetry indices must be distinct group basis indices");
  }
  if (!split.blocks().k.empty()) {
    throw InvalidModelError("V + D must span TQ: the split has transverse fields outside D");
  }
}

std::vector<VectorField> mixed_fields(const InvariantFrameSplit& split, const std::vector<int>& h) {
  const auto& sys = split.system();
  const auto& fund = split.group().fundamental();
  std::vector<VectorField> out;
  for (int i : split.blocks().kappa) out.push_back(sys.frame().field(i));
  for (int r : h) out.push_back(fund[r]);
  for (int r : complement_indices(split.group().dim(), h)) out.push_back(fund[r]);
  return out;
}

std::vector<VectorField> restricted_fields(const InvariantFrameSplit& split, const std::vector<int>& h) {
  std::vector<VectorField> all = mixed_fields(split, h);
  all.resize(split.blocks().kappa.size() + h.size(), all.front());
  return all;
}

double max_abs(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

void check_state(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const ChartPoint& x,
                 const Eigen::VectorXd& v_kappa) {
  if (mu.mu.size() != model.h_dim()) throw DimensionError("momentum level has wrong dimension");
  if (!mu.mu.allFinite()) throw DomainError("momentum level is not finite");
  if (x.coords.size() != model.system().dim() || v_kappa.size() != model.kappa_dim()) {
    throw DimensionError("Routh state has wrong dimension");
  }
}

Eigen::VectorXd stack(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size() + b.size());
  out << a, b;
  return out;
}

/// Newton on F(iota) = dPhi/diota - mu.
Eigen::VectorXd solve_iota(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const ChartPoint& x,
                           const Eigen::VectorXd& w) {
  const int nh = model.h_dim();
  const ScalarOnTQ& phi = model.restricted_lagrangian();
  const double tol = kNewtonTolerance * std::max(1.0, max_abs(mu.mu));

  Eigen::VectorXd iota = Eigen::VectorXd::Zero(nh);
  auto residual = [&](const Jet2& j) -> Eigen::VectorXd { return j.d_u.tail(nh) - mu.mu; };
  Jet2 jet = phi.eval(x, NaturalVelocity{stack(w, iota)});
  Eigen::VectorXd f = residual(jet);
  for (int it = 0; it < kNewtonIterations; ++it) {
    if (max_abs(f) <= tol) return iota;
    const Eigen::MatrixXd g = jet.d_uu.bottomRightCorner(nh, nh);
    const Eigen::VectorXd step = solve_checked(g, f, "momentum matrix g");
    double t = 1.0;
    Eigen::VectorXd trial;
    Jet2 trial_jet;
    Eigen::VectorXd trial_f;
    for (;;) {
      trial = iota - t * step;
      trial_jet = phi.eval(x, NaturalVelocity{stack(w, trial)});
      trial_f = residual(trial_jet);
      if (max_abs(trial_f) < max_abs(f) || t < 1.0 / 1024.0) break;
      t *= 0.5;
    }
    iota = trial;
    jet = std::move(trial_jet);
    f = trial_f;
  }
  if (max_abs(f) <= tol) return iota;
  throw ConvergenceError("momentum equations did not converge in " + std::to_string(kNewtonIterations) +
                         " Newton iterations");
}

struct RouthJet {
  Jet2 routhian;
  Eigen::VectorXd iota;
};

RouthJet routh_jet(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const ChartPoint& x,
                   const Eigen::VectorXd& w) {
  check_state(model, mu, x, w);
  const int nk = model.kappa_dim();
  const int nh = model.h_dim();
  RouthJet out;
  out.iota = solve_iota(model, mu, x, w);
  const Jet2 j = model.restricted_lagrangian().eval(x, NaturalVelocity{stack(w, out.iota)});

  const Eigen::MatrixXd g = j.d_uu.bottomRightCorner(nh, nh);
  const Eigen::MatrixXd p_wi = j.d_uu.topRightCorner(nk, nh);
  const Eigen::MatrixXd d_iota_dw = -solve_checked(g, Eigen::MatrixXd(p_wi.transpose()), "momentum matrix g");
  const Eigen::MatrixXd d_iota_dx = -solve_checked(g, Eigen::MatrixXd(j.d_ux.bottomRows(nh)), "momentum matrix g");

  Jet2& r = out.routhian;
  r.value = j.value - out.iota.dot(mu.mu);
  r.d_x = j.d_x;
  r.d_u = j.d_u.head(nk);
  r.d_uu = j.d_uu.topLeftCorner(nk, nk) + p_wi * d_iota_dw;
  r.d_uu = 0.5 * (r.d_uu + r.d_uu.transpose()).eval();
  r.d_ux = j.d_ux.topRows(nk) + p_wi * d_iota_dx;
  return out;
}

Eigen::VectorXd natural_on_level(const HorizontalSymmetryModel& model, const ChartPoint& x, const Eigen::VectorXd& w,
                                 const Eigen::VectorXd& iota) {
  const Eigen::MatrixXd mm = model.mixed_frame().matrix(x);
  return mm.leftCols(model.kappa_dim()) * w + mm.middleCols(model.kappa_dim(), model.h_dim()) * iota;
}

}  // namespace

HorizontalSymmetryModel::HorizontalSymmetryModel(InvariantFrameSplit split, std::vector<int> h_indices,
                                                 const std::vector<ChartPoint>& samples)
    : split_((check_indices(split, h_indices), std::move(split))),
      h_(std::move(h_indices)),
      c_(complement_indices(split_.group().dim(), h_)),
      mixed_(mixed_fields(split_, h_)),
      restricted_(compose_with_fields(split_.system().lagrangian(), restricted_fields(split_, h_))) {
  const int k = split_.group().dim();
  const int m = split_.system().rank();
  const Tensor3& cst = split_.group().constants();
  for (int rho : h_)
    for (int r = 0; r < k; ++r)
      for (int c : c_) {
        if (std::abs(cst(c, rho, r)) > kIdealTolerance) throw InvalidModelError("h is not an ideal of g");
      }
  if (samples.empty()) throw InvalidModelError("horizontal symmetry model needs sample points");
  for (const ChartPoint& x : samples) {
    try {
      (void)mixed_.matrix(x);
    } catch (const SingularMatrixError&) {
      throw InvalidModelError("X_kappa and the fundamental fields do not span TQ");
    }
    const Eigen::MatrixXd inv = split_.system().frame().inverse(x);
    for (int rho : h_) {
      const Eigen::VectorXd e = split_.group().fundamental()[rho].coeffs(x);
      const Eigen::VectorXd theta = inv.bottomRows(inv.rows() - m) * e;
      if (max_abs(theta) > kInDistributionTolerance) {
        throw InvalidModelError("fundamental field " + split_.group().fundamental()[rho].label() + " is not in D");
      }
    }
  }
}

Eigen::VectorXd momentum_solve(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const ChartPoint& x,
                               const Eigen::VectorXd& v_kappa) {
  check_state(model, mu, x, v_kappa);
  return solve_iota(model, mu, x, v_kappa);
}

double routhian(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const ChartPoint& x,
                const Eigen::VectorXd& v_kappa) {
  check_state(model, mu, x, v_kappa);
  const Eigen::VectorXd iota = solve_iota(model, mu, x, v_kappa);
  return model.restricted_lagrangian().value(x, NaturalVelocity{stack(v_kappa, iota)}) - iota.dot(mu.mu);
}

ScalarOnTQ routhian_function(const HorizontalSymmetryModel& model, const MomentumLevel& mu) {
  const auto* m = &model;
  return ScalarOnTQ(
      model.system().dim(), model.kappa_dim(),
      [m, mu](const ChartPoint& x, const NaturalVelocity& w) { return routh_jet(*m, mu, x, w.components).routhian; },
      [m, mu](const ChartPoint& x, const NaturalVelocity& w) { return routhian(*m, mu, x, w.components); });
}

Eigen::VectorXd routh_rhs(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const RouthState& s) {
  const RouthJet rj = routh_jet(model, mu, s.x, s.v_kappa);
  const Jet2& r = rj.routhian;
  const int nk = model.kappa_dim();
  const int nh = model.h_dim();
  const int n = model.system().dim();

  const Eigen::MatrixXd mm = model.mixed_frame().matrix(s.x);
  const Eigen::VectorXd u = mm.leftCols(nk) * s.v_kappa + mm.middleCols(nk, nh) * rj.iota;
  const Jet2 lj = model.system().lagrangian().eval(s.x, NaturalVelocity{u});
  const Tensor3 rm = structure_functions(model.mixed_frame(), s.x);

  // Mixed-frame momenta p_k and quasi-velocities v^j.
  Eigen::VectorXd p(n), v = Eigen::VectorXd::Zero(n);
  p.head(nk) = r.d_u;
  p.segment(nk, nh) = mu.mu;
  for (int c = nk + nh; c < n; ++c) p[c] = mm.col(c).dot(lj.d_u);
  v.head(nk) = s.v_kappa;
  v.segment(nk, nh) = rj.iota;

  Eigen::VectorXd rhs(nk);
  for (int a = 0; a < nk; ++a) {
    double sum = mm.col(a).dot(r.d_x);
    for (int j = 0; j < nk + nh; ++j)
      for (int kk = 0; kk < n; ++kk) sum += v[j] * rm(kk, j, a) * p[kk];
    rhs[a] = sum;
  }
  rhs -= r.d_ux * u;
  return solve_checked(r.d_uu, rhs, "Routhian mass matrix");
}

CState lift_to_constraint(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const RouthState& s) {
  const Eigen::VectorXd iota = momentum_solve(model, mu, s.x, s.v_kappa);
  const NaturalVelocity u{natural_on_level(model, s.x, s.v_kappa, iota)};
  return project_to_constraint(model.system(), s.x, u);
}

RouthState project_to_level(const HorizontalSymmetryModel& model, const CState& s) {
  const auto& kappa = model.split().blocks().kappa;
  RouthState out{s.x, Eigen::VectorXd(model.kappa_dim())};
  for (std::size_t i = 0; i < kappa.size(); ++i) out.v_kappa[static_cast<Eigen::Index>(i)] = s.v[kappa[i]];
  return out;
}

Eigen::VectorXd level_momenta(const HorizontalSymmetryModel& model, const CState& s) {
  const NaturalVelocity u = natural_velocity(model.system(), s);
  const Jet2 lj = model.system().lagrangian().eval(s.x, u);
  const auto& fund = model.split().group().fundamental();
  Eigen::VectorXd p(model.h_dim());
  for (int i = 0; i < model.h_dim(); ++i) p[i] = fund[model.h_indices()[i]].coeffs(s.x).dot(lj.d_u);
  return p;
}

RouthTrajectory integrate_routh(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const RouthState& s0,
                                double h, double t_final, Method method, const std::vector<int>& frozen) {
  check_state(model, mu, s0.x, s0.v_kappa);
  const int n = model.system().dim();
  const int nk = model.kappa_dim();
  const auto& tr = model.split().trivialization();
  const auto& fund = model.split().group().fundamental();

  std::vector<int> pinned;
  for (int r : frozen) {
    if (r < 0 || r >= model.split().group().dim()) throw InvalidModelError("frozen index is not a group direction");
    const int coord = tr.group_coords[static_cast<std::size_t>(r)];
    Eigen::VectorXd unit = Eigen::VectorXd::Unit(n, coord);
    if (max_abs(fund[r].coeffs(s0.x) - unit) > 0.0 || fund[r].jacobian(s0.x).cwiseAbs().maxCoeff() > 0.0) {
      throw InvalidModelError("frozen group direction " + fund[r].label() + " is not a coordinate field");
    }
    pinned.push_back(coord);
  }
  auto pin = [&](Eigen::VectorXd y) {
    for (std::size_t i = 0; i < pinned.size(); ++i) {
      const auto it = std::find(tr.group_coords.begin(), tr.group_coords.end(), pinned[i]);
      y[pinned[i]] = tr.identity[it - tr.group_coords.begin()];
    }
    return y;
  };

  auto rhs = [&](const Eigen::VectorXd& y) {
    const RouthState s{ChartPoint{pin(y.head(n))}, y.tail(nk)};
    const Eigen::VectorXd iota = solve_iota(model, mu, s.x, s.v_kappa);
    Eigen::VectorXd dy(n + nk);
    dy.head(n) = natural_on_level(model, s.x, s.v_kappa, iota);
    for (int c : pinned) dy[c] = 0.0;
    dy.tail(nk) = routh_rhs(model, mu, s);
    return dy;
  };

  RouthTrajectory traj;
  auto observe = [&](double t, const Eigen::VectorXd& y) {
    RouthState s{ChartPoint{y.head(n)}, y.tail(nk)};
    try {
      traj.routhian.push_back(routhian(model, mu, ChartPoint{pin(s.x.coords)}, s.v_kappa));
    } catch (const Error& e) {
      throw DynamicsError(t, e.what());
    }
    traj.times.push_back(t);
    traj.states.push_back(std::move(s));
  };
  Eigen::VectorXd y0(n + nk);
  y0 << pin(s0.x.coords), s0.v_kappa;
  integrate_fixed(method, rhs, y0, h, t_final, observe);
  return traj;
}

double routh_projection_gap(const HorizontalSymmetryModel& model, const Trajectory& full,
                            const RouthTrajectory& routh) {
  if (full.states.size() != routh.states.size()) throw DimensionError("trajectories sampled on different grids");
  double gap = 0.0;
  for (std::size_t i = 0; i < full.states.size(); ++i) {
    const RouthState p = project_to_level(model, full.states[i]);
    const RouthState& r = routh.states[i];
    gap = std::max({gap, max_abs(p.x.coords - r.x.coords), max_abs(p.v_kappa - r.v_kappa)});
  }
  return gap;
}

double two_stage_gap(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const RouthState& s0,
                     const std::vector<int>& first, const std::vector<int>& second, double h, double t_final) {
  const RouthTrajectory staged = integrate_routh(model, mu, s0, h, t_final, Method::rk4, first);
  std::vector<int> both = first;
  both.insert(both.end(), second.begin(), second.end());
  const RouthTrajectory direct = integrate_routh(model, mu, s0, h, t_final, Method::rk4, both);

  const auto& tr = model.split().trivialization();
  std::vector<int> kept;
  for (int j = 0; j < model.system().dim(); ++j) {
    const bool dropped = std::any_of(both.begin(), both.end(), [&](int r) { return tr.group_coords[r] == j; });
    if (!dropped) kept.push_back(j);
  }
  double gap = 0.0;
  for (std::size_t i = 0; i < staged.states.size(); ++i) {
    for (int j : kept) gap = std::max(gap, std::abs(staged.states[i].x.coords[j] - direct.states[i].x.coords[j]));
    gap = std::max(gap, max_abs(staged.states[i].v_kappa - direct.states[i].v_kappa));
  }
  return gap;
}

Eigen::VectorXd isotropy_residual_h(const HorizontalSymmetryModel& model, const MomentumLevel& mu,
                                    const Eigen::VectorXd& a_h) {
  const auto& h = model.h_indices();
  const int nh = model.h_dim();
  if (a_h.size() != nh || mu.mu.size() != nh) throw DimensionError("isotropy test: wrong dimensions");
  const Tensor3& c = model.split().group().constants();
  Eigen::VectorXd res = Eigen::VectorXd::Zero(nh);
  for (int rho = 0; rho < nh; ++rho)
    for (int sigma = 0; sigma < nh; ++sigma)
      for (int tau = 0; tau < nh; ++tau) res[rho] -= a_h[sigma] * c(h[tau], h[sigma], h[rho]) * mu.mu[tau];
  return res;
}

Eigen::VectorXd isotropy_residual_g(const HorizontalSymmetryModel& model, const MomentumLevel& mu,
                                    const Eigen::VectorXd& a) {
  const auto& h = model.h_indices();
  const int nh = model.h_dim();
  const int k = model.split().group().dim();
  if (a.size() != k || mu.mu.size() != nh) throw DimensionError("isotropy test: wrong dimensions");
  const Tensor3& c = model.split().group().constants();
  Eigen::VectorXd res = Eigen::VectorXd::Zero(nh);
  for (int rho = 0; rho < nh; ++rho)
    for (int r = 0; r < k; ++r)
      for (int sigma = 0; sigma < nh; ++sigma) res[rho] -= a[r] * c(h[sigma], r, h[rho]) * mu.mu[sigma];
  return res;
}

bool in_isotropy_h(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const Eigen::VectorXd& a_h,
                   double tol) {
  return max_abs(isotropy_residual_h(model, mu, a_h)) <= tol;
}

bool in_isotropy_g(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const Eigen::VectorXd& a,
                   double tol) {
  return max_abs(isotropy_residual_g(model, mu, a)) <= tol;
}

}  // namespace anholonome
