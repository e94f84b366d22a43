#include "anholonome/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "anholonome/errors.hpp"
#include "anholonome/rng.hpp"

namespace anholonome {

namespace {

constexpr double kConstantsTolerance = 1e-12;
constexpr double kAdaptationTolerance = 1e-8;
constexpr double kLiftedFlowStep = 1e-5;

double constants_antisymmetry(const Tensor3& c) {
  double worst = 0.0;
  const int k = c.dim0();
  for (int t = 0; t < k; ++t)
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) worst = std::max(worst, std::abs(c(t, r, s) + c(t, s, r)));
  return worst;
}

double constants_jacobi(const Tensor3& c) {
  double worst = 0.0;
  const int k = c.dim0();
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s)
      for (int t = 0; t < k; ++t)
        for (int w = 0; w < k; ++w) {
          double sum = 0.0;
          for (int u = 0; u < k; ++u) {
            sum += c(u, r, s) * c(w, u, t) + c(u, s, t) * c(w, u, r) + c(u, t, r) * c(w, u, s);
          }
          worst = std::max(worst, std::abs(sum));
        }
  return worst;
}

Eigen::MatrixXd checked_inverse_transpose(const Eigen::MatrixXd& v) {
  if (v.rows() == 0) return v;
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(v.transpose());
  if (!(std::abs(lu.determinant()) > kFrameDetTolerance)) {
    throw SingularMatrixError("vertical coefficient matrix X_r^s is singular");
  }
  return lu.inverse();
}

/// Coefficients with the intermediate quantities the cross-checks reuse.
struct RawCoefficients {
  ReducedCoefficients coeffs;
  Tensor3 r;
  Eigen::MatrixXd v;  // X_r^s
  Eigen::MatrixXd w;  // (V^T)^-1, so w(s, t) = Xbar^s_t
  FrameJets frame;
  double adaptation = 0.0;
};

RawCoefficients compute_raw(const InvariantFrameSplit& split, const ChartPoint& x) {
  const auto& vert = split.vertical();
  const auto& trans = split.transverse();
  const int k = static_cast<int>(vert.size());
  const int ni = static_cast<int>(trans.size());
  const int n = split.system().dim();

  RawCoefficients raw;
  raw.frame = split.system().frame().jets(x);
  raw.r = structure_functions(split.system().frame(), x);
  raw.v = split.vertical_matrix(x);
  raw.w = checked_inverse_transpose(raw.v);
  const Eigen::MatrixXd dv = split.vertical_matrix_jacobian(x);
  const Tensor3& c = split.group().constants();

  // Upsilon_Ir^s = Xbar^s_t X_I(X_r^t)
  raw.coeffs.upsilon = Tensor3(ni, k, k);
  for (int i = 0; i < ni; ++i) {
    const Eigen::VectorXd xi = raw.frame.matrix.col(trans[i]);
    Eigen::MatrixXd xi_of_v(k, k);  // (r, t)
    for (int r = 0; r < k; ++r)
      for (int t = 0; t < k; ++t) xi_of_v(r, t) = dv.row(r * k + t).dot(xi);
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) raw.coeffs.upsilon(i, r, s) = raw.w.row(s).dot(xi_of_v.row(r));
  }

  // Cbar^t_rs = Xbar^t_w C^w_uv X_r^u X_s^v
  raw.coeffs.cbar = Tensor3(k, k, k);
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s) {
      Eigen::VectorXd cw = Eigen::VectorXd::Zero(k);
      for (int w = 0; w < k; ++w)
        for (int u = 0; u < k; ++u)
          for (int vv = 0; vv < k; ++vv) cw[w] += c(w, u, vv) * raw.v(r, u) * raw.v(s, vv);
      for (int t = 0; t < k; ++t) raw.coeffs.cbar(t, r, s) = raw.w.row(t).dot(cw);
    }

  raw.coeffs.curvature = Tensor3(k, ni, ni);
  raw.coeffs.base_anholonomity = Tensor3(ni, ni, ni);
  for (int i = 0; i < ni; ++i)
    for (int j = 0; j < ni; ++j) {
      for (int r = 0; r < k; ++r) raw.coeffs.curvature(r, i, j) = -raw.r(vert[r], trans[i], trans[j]);
      for (int kk = 0; kk < ni; ++kk) raw.coeffs.base_anholonomity(kk, i, j) = raw.r(trans[kk], trans[i], trans[j]);
    }

  for (int big_i = 0; big_i < ni; ++big_i)
    for (int i = 0; i < n; ++i)
      for (int r = 0; r < k; ++r) raw.adaptation = std::max(raw.adaptation, std::abs(raw.r(trans[big_i], i, vert[r])));
  return raw;
}

Eigen::VectorXd full_quasi(const InvariantFrameSplit& split, const ReducedState& rs) {
  const auto& b = split.blocks();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(split.system().dim());
  for (std::size_t i = 0; i < b.rho.size(); ++i) v[b.rho[i]] = rs.v_rho[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < b.kappa.size(); ++i) v[b.kappa[i]] = rs.v_kappa[static_cast<Eigen::Index>(i)];
  return v;
}

void check_reduced(const InvariantFrameSplit& split, const ReducedState& rs) {
  if (rs.base.size() != split.base_dim() || rs.v_rho.size() != static_cast<Eigen::Index>(split.blocks().rho.size()) ||
      rs.v_kappa.size() != static_cast<Eigen::Index>(split.blocks().kappa.size())) {
    throw DimensionError("reduced state does not match the split");
  }
}

std::vector<int> sorted_copy(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

GroupModel::GroupModel(std::vector<VectorField> fundamental, Tensor3 structure_constants)
    : fundamental_(std::move(fundamental)), constants_(std::move(structure_constants)) {
  const int k = dim();
  if (constants_.dim0() != k || constants_.dim1() != k || constants_.dim2() != k) {
    throw DimensionError("structure constants must be k x k x k");
  }
  for (const auto& f : fundamental_) {
    if (f.dim() != fundamental_.front().dim()) throw DimensionError("fundamental fields on different charts");
  }
  if (constants_antisymmetry(constants_) > kConstantsTolerance) {
    throw InvalidModelError("structure constants are not antisymmetric");
  }
  if (constants_jacobi(constants_) > kConstantsTolerance) {
    throw InvalidModelError("structure constants violate the Jacobi identity");
  }
}

double GroupModel::bracket_residual(const ChartPoint& x) const {
  const int k = dim();
  double worst = 0.0;
  for (int r = 0; r < k; ++r)
    for (int s = r + 1; s < k; ++s) {
      Eigen::VectorXd res = bracket(fundamental_[r], fundamental_[s], x);
      for (int t = 0; t < k; ++t) res += constants_(t, r, s) * fundamental_[t].coeffs(x);
      worst = std::max(worst, res.cwiseAbs().maxCoeff());
    }
  return worst;
}

InvariantFrameSplit::InvariantFrameSplit(ConstrainedSystem system, GroupModel group, SplitBlocks blocks,
                                         ChartFunction vertical_coefficients, Trivialization trivialization)
    : system_(std::move(system)),
      group_(std::move(group)),
      blocks_(std::move(blocks)),
      vertical_coefficients_(std::move(vertical_coefficients)),
      trivialization_(std::move(trivialization)) {
  const int n = system_.dim();
  const int m = system_.rank();
  const int k = group_.dim();
  const auto nr = static_cast<int>(blocks_.rho.size());
  const auto nk = static_cast<int>(blocks_.kappa.size());
  const auto nc = static_cast<int>(blocks_.c.size());

  if (nr + nc != k) throw InvalidModelError("|rho| + |c| must equal the group dimension");
  if (nr + nk != m) throw InvalidModelError("|rho| + |kappa| must equal the rank of D");
  auto in_range = [](const std::vector<int>& idx, int lo, int hi) {
    return std::all_of(idx.begin(), idx.end(), [lo, hi](int i) { return i >= lo && i < hi; });
  };
  if (!in_range(blocks_.rho, 0, m) || !in_range(blocks_.kappa, 0, m)) {
    throw InvalidModelError("rho and kappa must index fields of D");
  }
  if (!in_range(blocks_.c, m, n) || !in_range(blocks_.k, m, n)) {
    throw InvalidModelError("c and k must index complement fields");
  }
  std::vector<int> all;
  for (const auto* blk : {&blocks_.rho, &blocks_.kappa, &blocks_.c, &blocks_.k}) all.insert(all.end(), blk->begin(), blk->end());
  std::vector<int> expected(static_cast<std::size_t>(n));
  std::iota(expected.begin(), expected.end(), 0);
  if (sorted_copy(all) != expected) throw InvalidModelError("split blocks must partition the frame");

  if (group_.dim() > 0 && group_.fundamental().front().dim() != n) {
    throw DimensionError("group acts on a different chart");
  }
  if (vertical_coefficients_.in_dim() != n || vertical_coefficients_.out_dim() != k * k) {
    throw DimensionError("vertical coefficients must map the chart to k x k matrices");
  }

  const auto& tr = trivialization_;
  std::vector<int> coords = tr.base_coords;
  coords.insert(coords.end(), tr.group_coords.begin(), tr.group_coords.end());
  if (sorted_copy(coords) != expected || static_cast<int>(tr.group_coords.size()) != k ||
      tr.identity.size() != k) {
    throw InvalidModelError("trivialization must split the chart into base and k group coordinates");
  }
  if (static_cast<int>(tr.base_coords.size()) != nk + static_cast<int>(blocks_.k.size())) {
    throw InvalidModelError("base dimension must equal |kappa| + |k|");
  }

  vertical_ = blocks_.rho;
  vertical_.insert(vertical_.end(), blocks_.c.begin(), blocks_.c.end());
  transverse_ = blocks_.kappa;
  transverse_.insert(transverse_.end(), blocks_.k.begin(), blocks_.k.end());
}

Eigen::MatrixXd InvariantFrameSplit::vertical_matrix(const ChartPoint& x) const {
  const int k = group_.dim();
  const Eigen::VectorXd flat = vertical_coefficients_.value(x);
  Eigen::MatrixXd v(k, k);
  for (int r = 0; r < k; ++r)
    for (int s = 0; s < k; ++s) v(r, s) = flat[r * k + s];
  return v;
}

Eigen::MatrixXd InvariantFrameSplit::vertical_matrix_jacobian(const ChartPoint& x) const {
  return vertical_coefficients_.jacobian(x);
}

double InvariantFrameSplit::vertical_consistency(const ChartPoint& x) const {
  const Eigen::MatrixXd v = vertical_matrix(x);
  const int k = group_.dim();
  double worst = 0.0;
  for (int r = 0; r < k; ++r) {
    Eigen::VectorXd sum = -system_.frame().field(vertical_[r]).coeffs(x);
    for (int s = 0; s < k; ++s) sum += v(r, s) * group_.fundamental()[s].coeffs(x);
    worst = std::max(worst, sum.cwiseAbs().maxCoeff());
  }
  return worst;
}

ChartPoint InvariantFrameSplit::section(const Eigen::VectorXd& base) const {
  const auto& tr = trivialization_;
  if (base.size() != static_cast<Eigen::Index>(tr.base_coords.size())) throw DimensionError("base point has wrong dimension");
  ChartPoint q{Eigen::VectorXd::Zero(system_.dim())};
  for (std::size_t i = 0; i < tr.base_coords.size(); ++i) q.coords[tr.base_coords[i]] = base[static_cast<Eigen::Index>(i)];
  for (std::size_t i = 0; i < tr.group_coords.size(); ++i) q.coords[tr.group_coords[i]] = tr.identity[static_cast<Eigen::Index>(i)];
  return q;
}

Eigen::VectorXd InvariantFrameSplit::base_of(const ChartPoint& x) const {
  const auto& tr = trivialization_;
  if (x.coords.size() != system_.dim()) throw DimensionError("chart point has wrong dimension");
  if (tr.contains && !tr.contains(x)) throw DomainError("state outside the trivialized chart");
  Eigen::VectorXd base(static_cast<Eigen::Index>(tr.base_coords.size()));
  for (std::size_t i = 0; i < tr.base_coords.size(); ++i) base[static_cast<Eigen::Index>(i)] = x.coords[tr.base_coords[i]];
  return base;
}

double InvarianceReport::max_residual() const {
  return std::max({max.lagrangian, max.frame, max.group, max.vertical, max.dynamics, constants_antisymmetry,
                   constants_jacobi});
}

InvarianceReport verify_invariance(const InvariantFrameSplit& split, const std::vector<ChartPoint>& samples,
                                   double tol) {
  if (samples.empty()) throw InvalidModelError("verify_invariance needs at least one sample");
  const auto& sys = split.system();
  const auto& fund = split.group().fundamental();
  const int n = sys.dim();
  const int m = sys.rank();
  const int k = split.group().dim();

  InvarianceReport report;
  report.tol = tol;
  report.constants_antisymmetry = constants_antisymmetry(split.group().constants());
  report.constants_jacobi = constants_jacobi(split.group().constants());

  for (std::size_t idx = 0; idx < samples.size(); ++idx) {
    const ChartPoint& x = samples[idx];
    SplitMix64 rng(0x1d5ea5e5ULL + idx);
    InvarianceSample s;

    for (int trial = 0; trial < 3; ++trial) {
      NaturalVelocity u{Eigen::VectorXd(n)};
      for (int j = 0; j < n; ++j) u.components[j] = rng.uniform(-2.0, 2.0);
      for (int r = 0; r < k; ++r) {
        s.lagrangian = std::max(s.lagrangian, std::abs(lift_apply(fund[r], sys.lagrangian(), x, u, LiftMode::complete)));
      }
    }
    for (int r = 0; r < k; ++r)
      for (int i = 0; i < n; ++i) {
        s.frame = std::max(s.frame, bracket(fund[r], sys.frame().field(i), x).cwiseAbs().maxCoeff());
      }
    s.group = split.group().bracket_residual(x);
    s.vertical = split.vertical_consistency(x);

    // Gamma invariance: difference f^alpha along the flow of E~_r^C.
    CState state{x, Eigen::VectorXd(m)};
    for (int a = 0; a < m; ++a) state.v[a] = rng.uniform(-1.0, 1.0);
    const NaturalVelocity u = natural_velocity(sys, state);
    const double h = kLiftedFlowStep;
    for (int r = 0; r < k; ++r) {
      const Eigen::VectorXd e = fund[r].coeffs(x);
      const Eigen::VectorXd eu = fund[r].jacobian(x) * u.components;
      const ChartPoint xp{x.coords + h * e}, xm{x.coords - h * e};
      const NaturalVelocity up{u.components + h * eu}, um{u.components - h * eu};
      const Eigen::VectorXd fp = constrained_dynamics(sys, project_to_constraint(sys, xp, up));
      const Eigen::VectorXd fm = constrained_dynamics(sys, project_to_constraint(sys, xm, um));
      s.dynamics = std::max(s.dynamics, ((fp - fm) / (2.0 * h)).cwiseAbs().maxCoeff());
    }

    report.max.lagrangian = std::max(report.max.lagrangian, s.lagrangian);
    report.max.frame = std::max(report.max.frame, s.frame);
    report.max.group = std::max(report.max.group, s.group);
    report.max.vertical = std::max(report.max.vertical, s.vertical);
    report.max.dynamics = std::max(report.max.dynamics, s.dynamics);
    report.samples.push_back(s);
  }
  report.pass = report.max_residual() <= tol;
  return report;
}

ReducedCoefficients reduced_coefficients(const InvariantFrameSplit& split, const ChartPoint& x) {
  RawCoefficients raw = compute_raw(split, x);
  if (raw.adaptation > kAdaptationTolerance) {
    throw InconsistencyError("R^I_ir = " + std::to_string(raw.adaptation) +
                             ": the supplied frame is not invariant or not adapted to the action");
  }
  return std::move(raw.coeffs);
}

double CoefficientCrosscheck::max() const {
  return std::max({upsilon_gap, cbar_gap, curvature_gap, adaptation});
}

CoefficientCrosscheck coefficient_crosscheck(const InvariantFrameSplit& split, const ChartPoint& x) {
  const RawCoefficients raw = compute_raw(split, x);
  const auto& vert = split.vertical();
  const auto& trans = split.transverse();
  const auto& fund = split.group().fundamental();
  const int k = static_cast<int>(vert.size());
  const int ni = static_cast<int>(trans.size());
  const int n = split.system().dim();

  CoefficientCrosscheck out;
  out.adaptation = raw.adaptation;
  for (int i = 0; i < ni; ++i)
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) {
        out.upsilon_gap = std::max(out.upsilon_gap, std::abs(raw.coeffs.upsilon(i, r, s) - raw.r(vert[s], trans[i], vert[r])));
      }
  for (int t = 0; t < k; ++t)
    for (int r = 0; r < k; ++r)
      for (int s = 0; s < k; ++s) {
        out.cbar_gap = std::max(out.cbar_gap, std::abs(raw.coeffs.cbar(t, r, s) - raw.r(vert[t], vert[r], vert[s])));
      }

  // Curvature route: expand [X_I, X_J] in the basis {E~_s, X_I} and convert the
  // E~ components to the X_r basis.
  if (ni > 1) {
    Eigen::MatrixXd basis(n, n);
    for (int s = 0; s < k; ++s) basis.col(s) = fund[s].coeffs(x);
    for (int i = 0; i < ni; ++i) basis.col(k + i) = raw.frame.matrix.col(trans[i]);
    const Eigen::PartialPivLU<Eigen::MatrixXd> lu(basis);
    for (int i = 0; i < ni; ++i)
      for (int j = 0; j < ni; ++j) {
        if (i == j) continue;
        const Eigen::VectorXd br = raw.frame.jacobian[trans[j]] * raw.frame.matrix.col(trans[i]) -
                                   raw.frame.jacobian[trans[i]] * raw.frame.matrix.col(trans[j]);
        const Eigen::VectorXd comps = lu.solve(br);
        const Eigen::VectorXd r_vert = raw.w * comps.head(k);
        for (int r = 0; r < k; ++r) {
          out.curvature_gap = std::max(out.curvature_gap, std::abs(-r_vert[r] - raw.coeffs.curvature(r, i, j)));
        }
      }
  }
  return out;
}

ReducedAcceleration reduced_rhs(const InvariantFrameSplit& split, const ReducedState& rs) {
  check_reduced(split, rs);
  const auto& sys = split.system();
  const auto& b = split.blocks();
  const auto& vert = split.vertical();
  const auto& trans = split.transverse();
  const auto& base_coords = split.trivialization().base_coords;
  const int nr = static_cast<int>(b.rho.size());
  const int nk = static_cast<int>(b.kappa.size());
  const int k = static_cast<int>(vert.size());
  const int ni = static_cast<int>(trans.size());
  const int nb = static_cast<int>(base_coords.size());

  const ChartPoint q = split.section(rs.base);
  const ScalarOnTQ l = compose_with_fields(sys.lagrangian(), sys.frame().fields());
  const Jet2 lj = l.eval(q, NaturalVelocity{full_quasi(split, rs)});
  const ReducedCoefficients co = reduced_coefficients(split, q);
  const Eigen::MatrixXd fm = sys.frame().matrix(q);

  // Base velocity: v^kappa Y_kappa, Y_kappa the base components of X_kappa.
  Eigen::VectorXd xdot_base = Eigen::VectorXd::Zero(nb);
  for (int j = 0; j < nb; ++j)
    for (int a = 0; a < nk; ++a) xdot_base[j] += rs.v_kappa[a] * fm(base_coords[j], b.kappa[a]);

  std::vector<int> alpha = b.rho;
  alpha.insert(alpha.end(), b.kappa.begin(), b.kappa.end());
  const int na = nr + nk;

  Eigen::MatrixXd mass(na, na);
  Eigen::VectorXd rhs(na);
  for (int a = 0; a < na; ++a) {
    for (int c = 0; c < na; ++c) mass(a, c) = lj.d_uu(alpha[a], alpha[c]);
    double mixed = 0.0;
    for (int j = 0; j < nb; ++j) mixed += lj.d_ux(alpha[a], base_coords[j]) * xdot_base[j];
    rhs[a] = -mixed;
  }
  Eigen::VectorXd dl_vert(k), dl_trans(ni);
  for (int r = 0; r < k; ++r) dl_vert[r] = lj.d_u[vert[r]];
  for (int i = 0; i < ni; ++i) dl_trans[i] = lj.d_u[trans[i]];

  // Momentum block: (Upsilon^r_{kappa rho} v^kappa - Cbar^r_{rho sigma} v^sigma) dl/dv^r.
  for (int p = 0; p < nr; ++p) {
    double sum = 0.0;
    for (int r = 0; r < k; ++r) {
      double coef = 0.0;
      for (int a = 0; a < nk; ++a) coef += co.upsilon(a, p, r) * rs.v_kappa[a];
      for (int s = 0; s < nr; ++s) coef -= co.cbar(r, p, s) * rs.v_rho[s];
      sum += coef * dl_vert[r];
    }
    rhs[p] += sum;
  }

  // Horizontal block: Y_kappa(l) - R^I_{kappa lambda} v^lambda dl/dv^I
  //   + (K^r_{kappa lambda} v^lambda - Upsilon^r_{kappa rho} v^rho) dl/dv^r.
  for (int a = 0; a < nk; ++a) {
    double sum = 0.0;
    for (int j = 0; j < nb; ++j) sum += fm(base_coords[j], b.kappa[a]) * lj.d_x[base_coords[j]];
    for (int i = 0; i < ni; ++i)
      for (int lam = 0; lam < nk; ++lam) sum -= co.base_anholonomity(i, a, lam) * rs.v_kappa[lam] * dl_trans[i];
    for (int r = 0; r < k; ++r) {
      double coef = 0.0;
      for (int lam = 0; lam < nk; ++lam) coef += co.curvature(r, a, lam) * rs.v_kappa[lam];
      for (int p = 0; p < nr; ++p) coef -= co.upsilon(a, p, r) * rs.v_rho[p];
      sum += coef * dl_vert[r];
    }
    rhs[nr + a] += sum;
  }

  const Eigen::VectorXd f = solve_checked(mass, rhs, "reduced mass matrix");
  return {f.head(nr), f.tail(nk)};
}

double reduced_energy(const InvariantFrameSplit& split, const ReducedState& rs) {
  check_reduced(split, rs);
  const auto& sys = split.system();
  const ScalarOnTQ l = compose_with_fields(sys.lagrangian(), sys.frame().fields());
  const Eigen::VectorXd v = full_quasi(split, rs);
  const Jet2 lj = l.eval(split.section(rs.base), NaturalVelocity{v});
  return v.dot(lj.d_u) - lj.value;
}

MomentumResidual momentum_and_residual(const InvariantFrameSplit& split, const CState& s) {
  const auto& sys = split.system();
  const auto& vert = split.vertical();
  const auto& trans = split.transverse();
  const int nr = static_cast<int>(split.blocks().rho.size());
  const int k = static_cast<int>(vert.size());
  const int ni = static_cast<int>(trans.size());
  const int m = sys.rank();

  MomentumResidual out{Eigen::VectorXd(nr), Eigen::VectorXd(nr)};
  if (nr == 0) return out;

  const NaturalVelocity u = natural_velocity(sys, s);
  const Jet2 lj = sys.lagrangian().eval(s.x, u);
  const Eigen::VectorXd accel = natural_acceleration(sys, s);
  const FrameJets fj = sys.frame().jets(s.x);
  const ReducedCoefficients co = reduced_coefficients(split, s.x);

  Eigen::VectorXd p_vert(k);
  for (int r = 0; r < k; ++r) p_vert[r] = fj.matrix.col(vert[r]).dot(lj.d_u);
  auto quasi = [&](int frame_index) { return frame_index < m ? s.v[frame_index] : 0.0; };

  for (int p = 0; p < nr; ++p) {
    const int fi = vert[p];
    const Eigen::VectorXd x_rho = fj.matrix.col(fi);
    const Eigen::VectorXd dp_dx = fj.jacobian[fi].transpose() * lj.d_u + lj.d_ux.transpose() * x_rho;
    const Eigen::VectorXd dp_du = lj.d_uu * x_rho;
    const double gamma_p = dp_dx.dot(u.components) + dp_du.dot(accel);

    double rhs = 0.0;
    for (int sidx = 0; sidx < k; ++sidx) {
      double coef = 0.0;
      for (int i = 0; i < ni; ++i) coef += co.upsilon(i, p, sidx) * quasi(trans[i]);
      for (int t = 0; t < k; ++t) coef -= co.cbar(sidx, p, t) * quasi(vert[t]);
      rhs += coef * p_vert[sidx];
    }
    out.momentum[p] = p_vert[p];
    out.residual[p] = gamma_p - rhs;
  }
  return out;
}

ReducedState project_state(const InvariantFrameSplit& split, const CState& s) {
  const auto& b = split.blocks();
  if (s.v.size() != split.system().rank()) throw DimensionError("state does not match the split's system");
  ReducedState rs;
  rs.base = split.base_of(s.x);
  rs.v_rho.resize(static_cast<Eigen::Index>(b.rho.size()));
  rs.v_kappa.resize(static_cast<Eigen::Index>(b.kappa.size()));
  for (std::size_t i = 0; i < b.rho.size(); ++i) rs.v_rho[static_cast<Eigen::Index>(i)] = s.v[b.rho[i]];
  for (std::size_t i = 0; i < b.kappa.size(); ++i) rs.v_kappa[static_cast<Eigen::Index>(i)] = s.v[b.kappa[i]];
  return rs;
}

ReducedTrajectory integrate_reduced(const InvariantFrameSplit& split, const ReducedState& rs0, double h,
                                    double t_final, Method method) {
  check_reduced(split, rs0);
  const auto& sys = split.system();
  const auto& b = split.blocks();
  const auto& base_coords = split.trivialization().base_coords;
  const int nb = split.base_dim();
  const int nr = static_cast<int>(b.rho.size());
  const int nk = static_cast<int>(b.kappa.size());

  auto unpack = [nb, nr, nk](const Eigen::VectorXd& y) {
    return ReducedState{y.head(nb), y.segment(nb, nr), y.tail(nk)};
  };
  auto rhs = [&](const Eigen::VectorXd& y) {
    const ReducedState rs = unpack(y);
    const Eigen::MatrixXd fm = sys.frame().matrix(split.section(rs.base));
    Eigen::VectorXd dy = Eigen::VectorXd::Zero(nb + nr + nk);
    for (int j = 0; j < nb; ++j)
      for (int a = 0; a < nk; ++a) dy[j] += rs.v_kappa[a] * fm(base_coords[j], b.kappa[a]);
    const ReducedAcceleration acc = reduced_rhs(split, rs);
    dy.segment(nb, nr) = acc.f_rho;
    dy.tail(nk) = acc.f_kappa;
    return dy;
  };

  ReducedTrajectory traj;
  const ScalarOnTQ l = compose_with_fields(sys.lagrangian(), sys.frame().fields());
  auto observe = [&](double t, const Eigen::VectorXd& y) {
    const ReducedState rs = unpack(y);
    const Eigen::VectorXd v = full_quasi(split, rs);
    try {
      const Jet2 lj = l.eval(split.section(rs.base), NaturalVelocity{v});
      Eigen::VectorXd p(nr);
      for (int i = 0; i < nr; ++i) p[i] = lj.d_u[b.rho[i]];
      traj.energy.push_back(v.dot(lj.d_u) - lj.value);
      traj.momenta.push_back(p);
    } catch (const Error& e) {
      throw DynamicsError(t, e.what());
    }
    traj.times.push_back(t);
    traj.states.push_back(rs);
  };

  Eigen::VectorXd y0(nb + nr + nk);
  y0 << rs0.base, rs0.v_rho, rs0.v_kappa;
  integrate_fixed(method, rhs, y0, h, t_final, observe);
  return traj;
}

double projection_gap(const InvariantFrameSplit& split, const Trajectory& full, const ReducedTrajectory& reduced) {
  if (full.states.size() != reduced.states.size()) throw DimensionError("trajectories sampled on different grids");
  double gap = 0.0;
  auto maxabs = [](const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); };
  for (std::size_t i = 0; i < full.states.size(); ++i) {
    const ReducedState p = project_state(split, full.states[i]);
    const ReducedState& r = reduced.states[i];
    gap = std::max({gap, maxabs(p.base - r.base), maxabs(p.v_rho - r.v_rho), maxabs(p.v_kappa - r.v_kappa)});
  }
  return gap;
}

}  // namespace anholonome
