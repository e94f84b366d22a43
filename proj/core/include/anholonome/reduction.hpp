#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "anholonome/frame.hpp"
#include "anholonome/hamel.hpp"
#include "anholonome/linalg.hpp"

namespace anholonome {

/// A Lie group acting on the chart: fundamental vector fields E~_r and the
/// structure constants C(t, r, s) = C^t_rs, with [E~_r, E~_s] = -C^t_rs E~_t.
class GroupModel {
 public:
  GroupModel(std::vector<VectorField> fundamental, Tensor3 structure_constants);

  int dim() const noexcept { return static_cast<int>(fundamental_.size()); }
  const std::vector<VectorField>& fundamental() const noexcept { return fundamental_; }
  const Tensor3& constants() const noexcept { return constants_; }

  /// max |[E~_r, E~_s] + C^t_rs E~_t| at x.
  double bracket_residual(const ChartPoint& x) const;

 private:
  std::vector<VectorField> fundamental_;
  Tensor3 constants_;
};

/// Frame indices of the four blocks of an invariant adapted frame:
/// rho, kappa span D (rho vertical); c, k complete it (c vertical).
struct SplitBlocks {
  std::vector<int> rho;
  std::vector<int> kappa;
  std::vector<int> c;
  std::vector<int> k;
};

/// Product chart Q = (base) x (group) with the section at the group identity.
struct Trivialization {
  std::vector<int> base_coords;
  std::vector<int> group_coords;
  Eigen::VectorXd identity;  // values of the group coordinates on the section
  std::function<bool(const ChartPoint&)> contains;  // optional domain predicate
};

/// An invariant adapted frame split against a group action.
///
/// Vertical frame members are ordered r = (rho..., c...) and transverse ones
/// I = (kappa..., k...). `vertical_coefficients` returns the k x k matrix
/// X_r^s (row-major, r then s) with X_r = X_r^s E~_s.
class InvariantFrameSplit {
 public:
  InvariantFrameSplit(ConstrainedSystem system, GroupModel group, SplitBlocks blocks,
                      ChartFunction vertical_coefficients, Trivialization trivialization);

  const ConstrainedSystem& system() const noexcept { return system_; }
  const GroupModel& group() const noexcept { return group_; }
  const SplitBlocks& blocks() const noexcept { return blocks_; }
  const Trivialization& trivialization() const noexcept { return trivialization_; }

  /// Frame indices in vertical order (rho..., c...).
  const std::vector<int>& vertical() const noexcept { return vertical_; }
  /// Frame indices in transverse order (kappa..., k...).
  const std::vector<int>& transverse() const noexcept { return transverse_; }
  int base_dim() const noexcept { return static_cast<int>(trivialization_.base_coords.size()); }

  Eigen::MatrixXd vertical_matrix(const ChartPoint& x) const;
  /// d X_r^s / dx^j as a k*k by n matrix, row r*k + s.
  Eigen::MatrixXd vertical_matrix_jacobian(const ChartPoint& x) const;
  /// max |X_r^s E~_s - X_r| at x.
  double vertical_consistency(const ChartPoint& x) const;

  ChartPoint section(const Eigen::VectorXd& base) const;
  Eigen::VectorXd base_of(const ChartPoint& x) const;

 private:
  ConstrainedSystem system_;
  GroupModel group_;
  SplitBlocks blocks_;
  ChartFunction vertical_coefficients_;
  Trivialization trivialization_;
  std::vector<int> vertical_;
  std::vector<int> transverse_;
};

/// A point of C/G in the product trivialization; v^a = 0 is implicit.
struct ReducedState {
  Eigen::VectorXd base;
  Eigen::VectorXd v_rho;
  Eigen::VectorXd v_kappa;
};

struct ReducedCoefficients {
  Tensor3 upsilon;            // (I, r, s): Upsilon_Ir^s
  Tensor3 cbar;               // (t, r, s): Cbar^t_rs
  Tensor3 curvature;          // (r, I, J): K^r_IJ
  Tensor3 base_anholonomity;  // (K, I, J): R^K_IJ
};

struct InvarianceSample {
  double lagrangian = 0.0;  // max_r |E~_r^C(L)| over random fibre points
  double frame = 0.0;       // max |[E~_r, X_i]|
  double group = 0.0;       // fundamental bracket relation
  double vertical = 0.0;    // X_r^s E~_s against X_r
  double dynamics = 0.0;    // max |E~_r^C(f^alpha)| by lifted-flow differences
};

struct InvarianceReport {
  std::vector<InvarianceSample> samples;
  double constants_antisymmetry = 0.0;
  double constants_jacobi = 0.0;
  InvarianceSample max;
  double tol = 0.0;
  bool pass = false;

  double max_residual() const;
};

/// Numerical invariance checks at the given chart points. A failed check is
/// reported, never thrown.
InvarianceReport verify_invariance(const InvariantFrameSplit& split, const std::vector<ChartPoint>& samples,
                                   double tol);

/// Upsilon and Cbar from their defining formulas, K and R^K_IJ from the
/// structure functions. Throws InconsistencyError when R^I_ir != 0 (tol 1e-8).
ReducedCoefficients reduced_coefficients(const InvariantFrameSplit& split, const ChartPoint& x);

struct CoefficientCrosscheck {
  double upsilon_gap = 0.0;     // Upsilon vs R^s_Ir
  double cbar_gap = 0.0;        // Cbar vs R^t_rs
  double curvature_gap = 0.0;   // vertical part of [X_I, X_J] in the E~ basis vs -R^r_IJ
  double adaptation = 0.0;      // max |R^I_ir|

  double max() const;
};

CoefficientCrosscheck coefficient_crosscheck(const InvariantFrameSplit& split, const ChartPoint& x);

struct ReducedAcceleration {
  Eigen::VectorXd f_rho;
  Eigen::VectorXd f_kappa;
};

/// Lagrange-d'Alembert-Poincare equations on C/G, evaluated on the section.
/// Empty rho or kappa blocks give empty outputs.
ReducedAcceleration reduced_rhs(const InvariantFrameSplit& split, const ReducedState& rs);

/// Reduced Lagrangian l_c-energy: v^alpha dl/dv^alpha - l on the section.
double reduced_energy(const InvariantFrameSplit& split, const ReducedState& rs);

struct MomentumResidual {
  Eigen::VectorXd momentum;  // P_rho = X_rho^V(L)
  Eigen::VectorXd residual;  // Gamma(P_rho) - (Upsilon_I rho^s v^I - Cbar^s_rho t v^t) P_s
};

MomentumResidual momentum_and_residual(const InvariantFrameSplit& split, const CState& s);

ReducedState project_state(const InvariantFrameSplit& split, const CState& s);

struct ReducedTrajectory {
  std::vector<double> times;
  std::vector<ReducedState> states;
  std::vector<double> energy;
  std::vector<Eigen::VectorXd> momenta;  // dl/dv^rho
};

ReducedTrajectory integrate_reduced(const InvariantFrameSplit& split, const ReducedState& rs0, double h,
                                    double t_final, Method method = Method::rk4);

/// max over samples of the pointwise max-norm gap between project_state of a
/// full trajectory and a reduced trajectory on the same time grid.
double projection_gap(const InvariantFrameSplit& split, const Trajectory& full, const ReducedTrajectory& reduced);

}  // namespace anholonome
