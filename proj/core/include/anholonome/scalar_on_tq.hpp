#pragma once

#include <functional>
#include <span>
#include <type_traits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "anholonome/errors.hpp"
#include "anholonome/jet.hpp"

namespace anholonome {

/// Chart coordinates x^j of a point of Q.
struct ChartPoint {
  Eigen::VectorXd coords;
};

/// Fibre coordinates u^j paired with the coordinate basis d/dx^j.
struct NaturalVelocity {
  Eigen::VectorXd components;
};

/// Value and derivative blocks of a scalar function on TQ at one point.
///
/// d_uu(i, k) = d2f/du^i du^k, d_ux(i, k) = d2f/du^i dx^k. The (x, x) block is
/// never computed.
struct Jet2 {
  double value = 0.0;
  Eigen::VectorXd d_x;
  Eigen::VectorXd d_u;
  Eigen::MatrixXd d_uu;
  Eigen::MatrixXd d_ux;
};

/// A function on a chart of TQ (or of a fibred submanifold of it) evaluable
/// together with its Jet2.
///
/// The base dimension is the chart dimension; the fibre dimension equals it
/// for Lagrangians and may differ for functions built on constraint or level
/// sets (eliminated velocities). Immutable and safe to share across threads.
class ScalarOnTQ {
 public:
  using JetEvaluator = std::function<Jet2(const ChartPoint&, const NaturalVelocity&)>;
  using ValueEvaluator = std::function<double(const ChartPoint&, const NaturalVelocity&)>;

  ScalarOnTQ(int dim, JetEvaluator jet, ValueEvaluator value = {});
  ScalarOnTQ(int base_dim, int fibre_dim, JetEvaluator jet, ValueEvaluator value = {});

  int dim() const noexcept { return base_dim_; }
  int fibre_dim() const noexcept { return fibre_dim_; }

  /// Jet at (x, u); throws DimensionError or EvaluationError.
  Jet2 eval(const ChartPoint& x, const NaturalVelocity& u) const;
  double value(const ChartPoint& x, const NaturalVelocity& u) const;

 private:
  void check_dims(const ChartPoint& x, const NaturalVelocity& u) const;

  int base_dim_;
  int fibre_dim_;
  JetEvaluator jet_;
  ValueEvaluator value_;
};

Jet2 eval_jet(const ScalarOnTQ& f, const ChartPoint& x, const NaturalVelocity& u);

/// Largest absolute gap between the jet derivatives and central differences
/// with step h. First derivatives are differenced from values, second-order
/// blocks from the jet's first derivatives.
double fd_check(const ScalarOnTQ& f, const ChartPoint& x, const NaturalVelocity& u, double h);

namespace detail {

Jet2 jet2_from_result(const Jet& r, int n);

}  // namespace detail

/// Wrap a generic callable `f(std::span<const T> x, std::span<const T> u) -> T`
/// as a ScalarOnTQ of dimension n. The callable must be pure and use only
/// arithmetic and the primitives declared in jet.hpp.
template <class F>
ScalarOnTQ make_scalar_on_tq(int n, F f) {
  if (n < 1 || n > kMaxDim) throw DimensionError("chart dimension outside [1, kMaxDim]");
  auto jet = [n, f](const ChartPoint& x, const NaturalVelocity& u) {
    std::vector<Jet> xs(n), us(n);
    for (int j = 0; j < n; ++j) {
      xs[j] = Jet::variable(x.coords[j], j, 2 * n, n, n);
      us[j] = Jet::variable(u.components[j], n + j, 2 * n, n, n);
    }
    const Jet r = f(std::span<const Jet>(xs), std::span<const Jet>(us));
    return detail::jet2_from_result(r, n);
  };
  auto value = [n, f](const ChartPoint& x, const NaturalVelocity& u) {
    return static_cast<double>(f(std::span<const double>(x.coords.data(), n),
                                 std::span<const double>(u.components.data(), n)));
  };
  return ScalarOnTQ(n, std::move(jet), std::move(value));
}

}  // namespace anholonome
