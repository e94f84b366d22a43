#pragma once

#include <vector>

#include <Eigen/Dense>

#include "anholonome/reduction.hpp"

namespace anholonome {

/// Horizontal symmetries: the group directions h that lie inside D.
///
/// Works in the mixed frame {X_kappa, E~_h, E~_c} where kappa comes from the
/// split and c are the remaining group directions. Construction rejects
/// models where h is not an ideal, where some E~_h leaves D at a sample point,
/// or where V + D != TQ.
class HorizontalSymmetryModel {
 public:
  HorizontalSymmetryModel(InvariantFrameSplit split, std::vector<int> h_indices,
                          const std::vector<ChartPoint>& samples);

  const InvariantFrameSplit& split() const noexcept { return split_; }
  const ConstrainedSystem& system() const noexcept { return split_.system(); }
  /// Group basis indices spanning h, in the order momenta are reported.
  const std::vector<int>& h_indices() const noexcept { return h_; }
  /// Remaining group basis indices.
  const std::vector<int>& c_indices() const noexcept { return c_; }
  int kappa_dim() const noexcept { return static_cast<int>(split_.blocks().kappa.size()); }
  int h_dim() const noexcept { return static_cast<int>(h_.size()); }

  /// {X_kappa..., E~_h..., E~_c...}.
  const Frame& mixed_frame() const noexcept { return mixed_; }
  /// L(x, X_kappa w + E~_h iota) as a function of (x; w, iota).
  const ScalarOnTQ& restricted_lagrangian() const noexcept { return restricted_; }

 private:
  InvariantFrameSplit split_;
  std::vector<int> h_;
  std::vector<int> c_;
  Frame mixed_;
  ScalarOnTQ restricted_;
};

struct MomentumLevel {
  Eigen::VectorXd mu;
};

/// A point of the level set with iota eliminated.
struct RouthState {
  ChartPoint x;
  Eigen::VectorXd v_kappa;
};

/// iota solving E~_h^V(L) = mu at (x, v_kappa). Damped Newton from iota = 0,
/// at most 50 iterations, tolerance 1e-12 * max(1, |mu|).
Eigen::VectorXd momentum_solve(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const ChartPoint& x,
                               const Eigen::VectorXd& v_kappa);

/// L - iota^h mu_h at the eliminated state.
double routhian(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const ChartPoint& x,
                const Eigen::VectorXd& v_kappa);

/// The Routhian as a function of (x; v_kappa). Second derivatives account for
/// the dependence of iota on (x, v_kappa) by implicit differentiation. The
/// model must outlive the returned function.
ScalarOnTQ routhian_function(const HorizontalSymmetryModel& model, const MomentumLevel& mu);

/// f^kappa on the level set: the kappa-block Lagrange-d'Alembert equations of
/// the Routhian with the bracket forcing in the mixed frame.
Eigen::VectorXd routh_rhs(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const RouthState& s);

/// Full constrained state above a Routh state.
CState lift_to_constraint(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const RouthState& s);
RouthState project_to_level(const HorizontalSymmetryModel& model, const CState& s);

/// E~_h^V(L) at a constrained state.
Eigen::VectorXd level_momenta(const HorizontalSymmetryModel& model, const CState& s);

struct RouthTrajectory {
  std::vector<double> times;
  std::vector<RouthState> states;
  std::vector<double> routhian;
};

/// Integrates x' = X_kappa v_kappa + E~_h iota, v_kappa' = f^kappa. Group
/// directions listed in `frozen` must be coordinate fields d/dy of the
/// trivialization; their coordinates are pinned at the identity, which
/// integrates the quotient by that subgroup.
RouthTrajectory integrate_routh(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const RouthState& s0,
                                double h, double t_final, Method method = Method::rk4,
                                const std::vector<int>& frozen = {});

/// max over samples of |x - x'| and |v_kappa - v_kappa'| between a projected
/// full trajectory and a Routh trajectory on the same grid.
double routh_projection_gap(const HorizontalSymmetryModel& model, const Trajectory& full,
                            const RouthTrajectory& routh);

/// Quotient by `first` and then by `second`, against quotienting by both at
/// once. Returns the largest gap over the coordinates neither stage pins and
/// over v_kappa.
double two_stage_gap(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const RouthState& s0,
                     const std::vector<int>& first, const std::vector<int>& second, double h, double t_final);

/// Isotropy tests for Lie algebra elements A at the momentum level mu.
/// For A in h: -A^sigma C^tau_{sigma rho} mu_tau for each rho in h.
Eigen::VectorXd isotropy_residual_h(const HorizontalSymmetryModel& model, const MomentumLevel& mu,
                                    const Eigen::VectorXd& a_h);
/// For A in g: -A^r C^sigma_{r rho} mu_sigma for each rho in h.
Eigen::VectorXd isotropy_residual_g(const HorizontalSymmetryModel& model, const MomentumLevel& mu,
                                    const Eigen::VectorXd& a);
bool in_isotropy_h(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const Eigen::VectorXd& a_h,
                   double tol = 1e-12);
bool in_isotropy_g(const HorizontalSymmetryModel& model, const MomentumLevel& mu, const Eigen::VectorXd& a,
                   double tol = 1e-12);

}  // namespace anholonome
