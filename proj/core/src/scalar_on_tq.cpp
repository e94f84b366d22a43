#include "anholonome/scalar_on_tq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace anholonome {

namespace {

bool all_finite(const Jet2& j) {
  return std::isfinite(j.value) && j.d_x.allFinite() && j.d_u.allFinite() && j.d_uu.allFinite() &&
         j.d_ux.allFinite();
}

}  // namespace

namespace detail {

Jet2 jet2_from_result(const Jet& r, int n) {
  Jet2 out;
  out.value = r.value();
  out.d_x.resize(n);
  out.d_u.resize(n);
  out.d_uu.resize(n, n);
  out.d_ux.resize(n, n);
  for (int k = 0; k < n; ++k) {
    out.d_x[k] = r.grad(k);
    out.d_u[k] = r.grad(n + k);
  }
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      out.d_uu(i, k) = r.hess(i, n + k);
      out.d_ux(i, k) = r.hess(i, k);
    }
  }
  return out;
}

}  // namespace detail

ScalarOnTQ::ScalarOnTQ(int dim, JetEvaluator jet, ValueEvaluator value)
    : ScalarOnTQ(dim, dim, std::move(jet), std::move(value)) {}

ScalarOnTQ::ScalarOnTQ(int base_dim, int fibre_dim, JetEvaluator jet, ValueEvaluator value)
    : base_dim_(base_dim), fibre_dim_(fibre_dim), jet_(std::move(jet)), value_(std::move(value)) {
  if (base_dim_ < 0 || fibre_dim_ < 0) throw DimensionError("negative ScalarOnTQ dimension");
  if (!jet_) throw InvalidModelError("ScalarOnTQ requires a jet evaluator");
}

void ScalarOnTQ::check_dims(const ChartPoint& x, const NaturalVelocity& u) const {
  if (x.coords.size() != base_dim_ || u.components.size() != fibre_dim_) {
    throw DimensionError("ScalarOnTQ expects (" + std::to_string(base_dim_) + ", " +
                         std::to_string(fibre_dim_) + ") inputs, got (" +
                         std::to_string(x.coords.size()) + ", " +
                         std::to_string(u.components.size()) + ")");
  }
}

Jet2 ScalarOnTQ::eval(const ChartPoint& x, const NaturalVelocity& u) const {
  check_dims(x, u);
  Jet2 j = jet_(x, u);
  if (!all_finite(j)) throw EvaluationError("evaluator produced a non-finite jet");
  return j;
}

double ScalarOnTQ::value(const ChartPoint& x, const NaturalVelocity& u) const {
  check_dims(x, u);
  const double v = value_ ? value_(x, u) : jet_(x, u).value;
  if (!std::isfinite(v)) throw EvaluationError("evaluator produced a non-finite value");
  return v;
}

Jet2 eval_jet(const ScalarOnTQ& f, const ChartPoint& x, const NaturalVelocity& u) {
  return f.eval(x, u);
}

double fd_check(const ScalarOnTQ& f, const ChartPoint& x, const NaturalVelocity& u, double h) {
  if (!(h > 0.0)) throw DimensionError("fd_check step must be positive");
  const Jet2 j = f.eval(x, u);
  const int n = f.dim();
  const int p = f.fibre_dim();
  double gap = 0.0;

  for (int k = 0; k < n; ++k) {
    ChartPoint xp = x, xm = x;
    xp.coords[k] += h;
    xm.coords[k] -= h;
    const double fd = (f.value(xp, u) - f.value(xm, u)) / (2.0 * h);
    gap = std::max(gap, std::abs(fd - j.d_x[k]));

    if (p > 0) {
      const Eigen::VectorXd dfd = (f.eval(xp, u).d_u - f.eval(xm, u).d_u) / (2.0 * h);
      gap = std::max(gap, (dfd - j.d_ux.col(k)).cwiseAbs().maxCoeff());
    }
  }
  for (int k = 0; k < p; ++k) {
    NaturalVelocity up = u, um = u;
    up.components[k] += h;
    um.components[k] -= h;
    const double fd = (f.value(x, up) - f.value(x, um)) / (2.0 * h);
    gap = std::max(gap, std::abs(fd - j.d_u[k]));

    const Eigen::VectorXd dfd = (f.eval(x, up).d_u - f.eval(x, um).d_u) / (2.0 * h);
    gap = std::max(gap, (dfd - j.d_uu.col(k)).cwiseAbs().maxCoeff());
  }
  return gap;
}

}  // namespace anholonome
