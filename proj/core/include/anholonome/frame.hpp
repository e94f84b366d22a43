#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anholonome/jet.hpp"
#include "anholonome/linalg.hpp"
#include "anholonome/scalar_on_tq.hpp"

namespace anholonome {

/// Smooth map from an n-dimensional chart to R^p. Jacobians and Hessians are
/// produced by the jet engine from the same closed-form coefficients.
class ChartFunction {
 public:
  using ValueFn = std::function<void(std::span<const double>, std::span<double>)>;
  using JetFn = std::function<void(std::span<const Jet>, std::span<Jet>)>;

  struct SecondOrder {
    Eigen::VectorXd value;
    Eigen::MatrixXd jacobian;              // (p, n): d out^a / dx^k
    std::vector<Eigen::MatrixXd> hessian;  // hessian[a](j, k) = d2 out^a / dx^j dx^k
  };

  ChartFunction(int in_dim, int out_dim, ValueFn value, JetFn jet);

  int in_dim() const noexcept { return in_dim_; }
  int out_dim() const noexcept { return out_dim_; }

  Eigen::VectorXd value(const ChartPoint& x) const;
  Eigen::MatrixXd jacobian(const ChartPoint& x) const;
  SecondOrder second_order(const ChartPoint& x) const;

 private:
  void check(const ChartPoint& x) const;

  int in_dim_;
  int out_dim_;
  ValueFn value_;
  JetFn jet_;
};

/// Build a ChartFunction from a generic callable
/// `f(std::span<const T> x, std::span<T> out)`; `out` arrives zero-filled.
template <class F>
ChartFunction make_chart_function(int in_dim, int out_dim, F f) {
  auto value = [f](std::span<const double> x, std::span<double> out) { f(x, out); };
  auto jet = [f](std::span<const Jet> x, std::span<Jet> out) { f(x, out); };
  return ChartFunction(in_dim, out_dim, std::move(value), std::move(jet));
}

/// X = X^j d/dx^j on an n-dimensional chart.
class VectorField {
 public:
  VectorField(std::string label, ChartFunction coeffs);

  const std::string& label() const noexcept { return label_; }
  int dim() const noexcept { return coeffs_.in_dim(); }

  Eigen::VectorXd coeffs(const ChartPoint& x) const { return coeffs_.value(x); }
  /// J(j, k) = dX^j/dx^k.
  Eigen::MatrixXd jacobian(const ChartPoint& x) const { return coeffs_.jacobian(x); }
  ChartFunction::SecondOrder second_order(const ChartPoint& x) const { return coeffs_.second_order(x); }

 private:
  std::string label_;
  ChartFunction coeffs_;
};

template <class F>
VectorField make_vector_field(int n, std::string label, F f) {
  return VectorField(std::move(label), make_chart_function(n, n, std::move(f)));
}

/// Coefficient matrix and its first derivatives at a point.
struct FrameJets {
  Eigen::MatrixXd matrix;                 // column i holds X_i(x)
  std::vector<Eigen::MatrixXd> jacobian;  // jacobian[i](j, k) = dX_i^j/dx^k
};

/// n pointwise independent vector fields on a chart region.
class Frame {
 public:
  Frame(std::vector<VectorField> fields, std::string domain = {}, double det_tolerance = kFrameDetTolerance);

  int dim() const noexcept { return static_cast<int>(fields_.size()); }
  const std::vector<VectorField>& fields() const noexcept { return fields_; }
  const VectorField& field(int i) const { return fields_.at(static_cast<std::size_t>(i)); }
  const std::string& domain() const noexcept { return domain_; }
  double det_tolerance() const noexcept { return det_tolerance_; }

  /// [X_i^j(x)] with X_i as column i; throws SingularMatrixError when
  /// |det| <= det_tolerance.
  Eigen::MatrixXd matrix(const ChartPoint& x) const;
  FrameJets jets(const ChartPoint& x) const;
  /// Inverse of matrix(x); row i is the dual covector theta^i.
  Eigen::MatrixXd inverse(const ChartPoint& x) const;

 private:
  std::vector<VectorField> fields_;
  std::string domain_;
  double det_tolerance_;
};

/// A frame whose first m members span the constraint distribution D.
struct AdaptedFrame {
  AdaptedFrame(Frame frame, int m);

  Frame frame;
  int m;
};

struct QuasiVelocity {
  Eigen::VectorXd components;
};

/// [X, Y] at x: X^j dY^k/dx^j - Y^j dX^k/dx^j.
Eigen::VectorXd bracket(const VectorField& x_field, const VectorField& y_field, const ChartPoint& x);

/// d[X, Y]^k / dx^m at x, exact from jet Hessians. Entry (k, m).
Eigen::MatrixXd bracket_jacobian(const VectorField& x_field, const VectorField& y_field, const ChartPoint& x);

/// max-norm of [[X,Y],Z] + [[Y,Z],X] + [[Z,X],Y] at x.
double jacobi_residual(const VectorField& x_field, const VectorField& y_field, const VectorField& z_field,
                       const ChartPoint& x);

/// Object of anholonomity: R(k, i, j) = R^k_ij with [X_i, X_j] = R^k_ij X_k.
Tensor3 structure_functions(const Frame& frame, const ChartPoint& x);

QuasiVelocity quasi_from_natural(const Frame& frame, const ChartPoint& x, const NaturalVelocity& u);
NaturalVelocity natural_from_quasi(const Frame& frame, const ChartPoint& x, const QuasiVelocity& v);

enum class LiftMode { complete, vertical };

/// X^V(f) or X^C(f) at (x, u), in natural coordinates.
double lift_apply(const VectorField& field, const ScalarOnTQ& f, const ChartPoint& x, const NaturalVelocity& u,
                  LiftMode mode);

/// l(x, s) = L(x, sum_a s^a Y_a(x)); a function on a chart of TQ with fibre
/// dimension fields.size(). With a full frame this is the Lagrangian in
/// quasi-velocities.
ScalarOnTQ compose_with_fields(const ScalarOnTQ& lagrangian, std::vector<VectorField> fields);

}  // namespace anholonome
