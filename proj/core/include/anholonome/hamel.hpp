#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anholonome/frame.hpp"
#include "anholonome/integrator.hpp"
#include "anholonome/scalar_on_tq.hpp"

namespace anholonome {

/// A Lagrangian system on an n-chart with linear constraints D spanned by the
/// first m fields of an adapted frame. m == n means unconstrained.
class ConstrainedSystem {
 public:
  ConstrainedSystem(std::string name, std::vector<std::string> coord_labels, ScalarOnTQ lagrangian,
                    AdaptedFrame adapted, std::vector<int> momentum_indices = {});

  const std::string& name() const noexcept { return name_; }
  int dim() const noexcept { return adapted_.frame.dim(); }
  /// Rank m of the constraint distribution.
  int rank() const noexcept { return adapted_.m; }
  const std::vector<std::string>& coord_labels() const noexcept { return coord_labels_; }
  const ScalarOnTQ& lagrangian() const noexcept { return lagrangian_; }
  const AdaptedFrame& adapted() const noexcept { return adapted_; }
  const Frame& frame() const noexcept { return adapted_.frame; }
  /// Frame indices alpha < m whose momenta X_alpha^V(L) are tracked as diagnostics.
  const std::vector<int>& momentum_indices() const noexcept { return momentum_indices_; }

  /// Same system with a different Lagrangian (used for negative controls).
  ConstrainedSystem with_lagrangian(std::string name, ScalarOnTQ lagrangian) const;

 private:
  std::string name_;
  std::vector<std::string> coord_labels_;
  ScalarOnTQ lagrangian_;
  AdaptedFrame adapted_;
  std::vector<int> momentum_indices_;
};

/// A point of C: chart point and the m constrained quasi-velocities v^alpha.
/// The components v^a (a >= m) are identically zero.
struct CState {
  ChartPoint x;
  Eigen::VectorXd v;
};

/// u = v^alpha X_alpha(x).
NaturalVelocity natural_velocity(const ConstrainedSystem& sys, const CState& s);

/// M_ab = X_a^i X_b^j d2L/du^i du^j at (x, u(v)).
Eigen::MatrixXd mass_matrix(const ConstrainedSystem& sys, const CState& s);

/// Quasi-accelerations f^alpha of the Lagrange-d'Alembert field
/// Gamma = v^alpha X_alpha^C + f^alpha X_alpha^V on C.
Eigen::VectorXd constrained_dynamics(const ConstrainedSystem& sys, const CState& s);

/// Natural acceleration du/dt of Gamma: push-forward of constrained_dynamics.
Eigen::VectorXd natural_acceleration(const ConstrainedSystem& sys, const CState& s);

struct MultiplierSolution {
  Eigen::VectorXd acceleration;  // a^j
  Eigen::VectorXd multipliers;   // lambda_a, one per annihilator row
};

/// Independent route: d/dt(dL/du) - dL/dx = A^T lambda with A u = 0, A taken
/// as the rows a >= m of the inverse frame matrix. Solved as one saddle system
/// in natural coordinates.
MultiplierSolution multiplier_oracle(const ConstrainedSystem& sys, const ChartPoint& x, const NaturalVelocity& u);
MultiplierSolution multiplier_oracle(const ConstrainedSystem& sys, const CState& s);

/// E = u^j dL/du^j - L.
double energy(const ConstrainedSystem& sys, const CState& s);

/// Gamma(E) computed pointwise from the Lagrangian's jet; vanishes identically.
double energy_rate(const ConstrainedSystem& sys, const CState& s);

/// X_alpha^V(L) for the tracked momentum indices.
Eigen::VectorXd tracked_momenta(const ConstrainedSystem& sys, const CState& s);

/// max_a |theta^a(u)| for the annihilating covectors theta^a (a >= m).
double constraint_residual(const ConstrainedSystem& sys, const ChartPoint& x, const NaturalVelocity& u);

struct Trajectory {
  std::vector<double> times;
  std::vector<CState> states;
  std::vector<double> energy;
  std::vector<std::string> momentum_labels;
  std::vector<Eigen::VectorXd> momenta;
  std::vector<double> constraint_residual;
};

/// Fixed-step integration of (x' = u(x, v), v' = f). The constraint v^a = 0
/// holds by construction of the state.
Trajectory integrate(const ConstrainedSystem& sys, const CState& s0, double h, double t_final,
                     Method method = Method::rk4);

struct NaturalTrajectory {
  std::vector<double> times;
  std::vector<ChartPoint> x;
  std::vector<NaturalVelocity> u;
};

/// Integrates the multiplier formulation in natural coordinates (x, u). The
/// constraint is only preserved up to integration error.
NaturalTrajectory integrate_multiplier(const ConstrainedSystem& sys, const ChartPoint& x0,
                                       const NaturalVelocity& u0, double h, double t_final,
                                       Method method = Method::rk4);

/// Point of C nearest in quasi-velocity terms: keep v^alpha, drop v^a.
CState project_to_constraint(const ConstrainedSystem& sys, const ChartPoint& x, const NaturalVelocity& u);

}  // namespace anholonome
