#include "anholonome/frame.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>

#include "anholonome/errors.hpp"

namespace anholonome {

ChartFunction::ChartFunction(int in_dim, int out_dim, ValueFn value, JetFn jet)
    : in_dim_(in_dim), out_dim_(out_dim), value_(std::move(value)), jet_(std::move(jet)) {
  if (in_dim_ < 0 || in_dim_ > kMaxDim || out_dim_ < 0) {
    throw DimensionError("chart function dimensions out of range");
  }
}

void ChartFunction::check(const ChartPoint& x) const {
  if (x.coords.size() != in_dim_) {
    throw DimensionError("chart function expects " + std::to_string(in_dim_) + " coordinates, got " +
                         std::to_string(x.coords.size()));
  }
}

Eigen::VectorXd ChartFunction::value(const ChartPoint& x) const {
  check(x);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(out_dim_);
  value_(std::span<const double>(x.coords.data(), static_cast<std::size_t>(in_dim_)),
         std::span<double>(out.data(), static_cast<std::size_t>(out_dim_)));
  if (!out.allFinite()) throw EvaluationError("chart function produced a non-finite value");
  return out;
}

Eigen::MatrixXd ChartFunction::jacobian(const ChartPoint& x) const {
  check(x);
  const int n = in_dim_;
  std::vector<Jet> xs(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) xs[j] = Jet::variable(x.coords[j], j, n, 0, 0);
  std::vector<Jet> out(static_cast<std::size_t>(out_dim_), Jet(0.0));
  jet_(std::span<const Jet>(xs), std::span<Jet>(out));
  Eigen::MatrixXd jac(out_dim_, n);
  for (int a = 0; a < out_dim_; ++a) {
    for (int k = 0; k < n; ++k) jac(a, k) = out[a].grad(k);
  }
  if (!jac.allFinite()) throw EvaluationError("chart function produced a non-finite Jacobian");
  return jac;
}

ChartFunction::SecondOrder ChartFunction::second_order(const ChartPoint& x) const {
  check(x);
  const int n = in_dim_;
  std::vector<Jet> xs(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) xs[j] = Jet::variable(x.coords[j], j, n, 0, n);
  std::vector<Jet> out(static_cast<std::size_t>(out_dim_), Jet(0.0));
  jet_(std::span<const Jet>(xs), std::span<Jet>(out));

  SecondOrder so;
  so.value.resize(out_dim_);
  so.jacobian.resize(out_dim_, n);
  so.hessian.assign(static_cast<std::size_t>(out_dim_), Eigen::MatrixXd::Zero(n, n));
  for (int a = 0; a < out_dim_; ++a) {
    so.value[a] = out[a].value();
    for (int k = 0; k < n; ++k) {
      so.jacobian(a, k) = out[a].grad(k);
      for (int j = 0; j < n; ++j) so.hessian[a](j, k) = out[a].hess(j, k);
    }
    if (!so.hessian[a].allFinite()) throw EvaluationError("chart function produced a non-finite Hessian");
  }
  if (!so.value.allFinite() || !so.jacobian.allFinite()) {
    throw EvaluationError("chart function produced a non-finite jet");
  }
  return so;
}

VectorField::VectorField(std::string label, ChartFunction coeffs)
    : label_(std::move(label)), coeffs_(std::move(coeffs)) {
  if (coeffs_.in_dim() != coeffs_.out_dim()) throw DimensionError("vector field must map R^n to R^n");
}

Frame::Frame(std::vector<VectorField> fields, std::string domain, double det_tolerance)
    : fields_(std::move(fields)), domain_(std::move(domain)), det_tolerance_(det_tolerance) {
  const int n = dim();
  if (n < 1 || n > kMaxDim) throw DimensionError("frame size outside [1, kMaxDim]");
  for (const auto& f : fields_) {
    if (f.dim() != n) throw DimensionError("frame field '" + f.label() + "' has the wrong dimension");
  }
}

Eigen::MatrixXd Frame::matrix(const ChartPoint& x) const {
  const int n = dim();
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) m.col(i) = fields_[i].coeffs(x);
  const double det = m.partialPivLu().determinant();
  if (!(std::abs(det) > det_tolerance_)) {
    throw SingularMatrixError("frame matrix singular at point (|det| = " + std::to_string(std::abs(det)) + ")");
  }
  return m;
}

FrameJets Frame::jets(const ChartPoint& x) const {
  FrameJets fj;
  fj.matrix = matrix(x);
  fj.jacobian.reserve(fields_.size());
  for (const auto& f : fields_) fj.jacobian.push_back(f.jacobian(x));
  return fj;
}

Eigen::MatrixXd Frame::inverse(const ChartPoint& x) const {
  return matrix(x).partialPivLu().inverse();
}

AdaptedFrame::AdaptedFrame(Frame f, int m_) : frame(std::move(f)), m(m_) {
  if (m < 1 || m > frame.dim()) throw DimensionError("adapted frame rank m must satisfy 1 <= m <= n");
}

Eigen::VectorXd bracket(const VectorField& x_field, const VectorField& y_field, const ChartPoint& x) {
  if (x_field.dim() != y_field.dim()) throw DimensionError("bracket of fields on different charts");
  return y_field.jacobian(x) * x_field.coeffs(x) - x_field.jacobian(x) * y_field.coeffs(x);
}

Eigen::MatrixXd bracket_jacobian(const VectorField& x_field, const VectorField& y_field, const ChartPoint& x) {
  if (x_field.dim() != y_field.dim()) throw DimensionError("bracket of fields on different charts");
  const auto xs = x_field.second_order(x);
  const auto ys = y_field.second_order(x);
  const int n = x_field.dim();
  // B^k = X^j dY^k/dx^j - Y^j dX^k/dx^j
  Eigen::MatrixXd out = ys.jacobian * xs.jacobian - xs.jacobian * ys.jacobian;
  for (int k = 0; k < n; ++k) {
    out.row(k) += (ys.hessian[k] * xs.value).transpose() - (xs.hessian[k] * ys.value).transpose();
  }
  return out;
}

double jacobi_residual(const VectorField& x_field, const VectorField& y_field, const VectorField& z_field,
                       const ChartPoint& x) {
  // [[A,B],C] = J_C [A,B] - J_[A,B] C
  auto nested = [&x](const VectorField& a, const VectorField& b, const VectorField& c) {
    return Eigen::VectorXd(c.jacobian(x) * bracket(a, b, x) - bracket_jacobian(a, b, x) * c.coeffs(x));
  };
  const Eigen::VectorXd sum =
      nested(x_field, y_field, z_field) + nested(y_field, z_field, x_field) + nested(z_field, x_field, y_field);
  return sum.cwiseAbs().maxCoeff();
}

Tensor3 structure_functions(const Frame& frame, const ChartPoint& x) {
  const int n = frame.dim();
  const FrameJets fj = frame.jets(x);
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(fj.matrix);
  Tensor3 r(n, n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Eigen::VectorXd br =
          fj.jacobian[j] * fj.matrix.col(i) - fj.jacobian[i] * fj.matrix.col(j);
      const Eigen::VectorXd c = lu.solve(br);
      for (int k = 0; k < n; ++k) {
        r(k, i, j) = c[k];
        r(k, j, i) = -c[k];
      }
    }
  }
  return r;
}

QuasiVelocity quasi_from_natural(const Frame& frame, const ChartPoint& x, const NaturalVelocity& u) {
  if (u.components.size() != frame.dim()) throw DimensionError("velocity dimension does not match frame");
  return {frame.matrix(x).partialPivLu().solve(u.components)};
}

NaturalVelocity natural_from_quasi(const Frame& frame, const ChartPoint& x, const QuasiVelocity& v) {
  if (v.components.size() != frame.dim()) throw DimensionError("quasi-velocity dimension does not match frame");
  Eigen::MatrixXd m(frame.dim(), frame.dim());
  for (int i = 0; i < frame.dim(); ++i) m.col(i) = frame.field(i).coeffs(x);
  return {m * v.components};
}

double lift_apply(const VectorField& field, const ScalarOnTQ& f, const ChartPoint& x, const NaturalVelocity& u,
                  LiftMode mode) {
  if (field.dim() != f.dim() || f.fibre_dim() != f.dim()) {
    throw DimensionError("lift_apply needs a field and a function on the same chart");
  }
  const Jet2 j = f.eval(x, u);
  const Eigen::VectorXd xc = field.coeffs(x);
  if (mode == LiftMode::vertical) return xc.dot(j.d_u);
  return xc.dot(j.d_x) + (field.jacobian(x) * u.components).dot(j.d_u);
}

ScalarOnTQ compose_with_fields(const ScalarOnTQ& lagrangian, std::vector<VectorField> fields) {
  const int n = lagrangian.dim();
  const int p = static_cast<int>(fields.size());
  if (lagrangian.fibre_dim() != n) throw DimensionError("compose_with_fields needs a Lagrangian on TQ");
  for (const auto& f : fields) {
    if (f.dim() != n) throw DimensionError("composed field lives on a different chart");
  }
  auto shared = std::make_shared<const std::vector<VectorField>>(std::move(fields));

  auto jet = [lagrangian, shared, n, p](const ChartPoint& x, const NaturalVelocity& s) {
    const auto& fs = *shared;
    Eigen::MatrixXd b(n, p);
    std::vector<Eigen::MatrixXd> db;
    db.reserve(fs.size());
    for (int a = 0; a < p; ++a) {
      b.col(a) = fs[a].coeffs(x);
      db.push_back(fs[a].jacobian(x));
    }
    // W(:, k) = du/dx^k at fixed s
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
    for (int a = 0; a < p; ++a) w += s.components[a] * db[a];

    const Jet2 lj = lagrangian.eval(x, NaturalVelocity{b * s.components});
    Jet2 out;
    out.value = lj.value;
    out.d_u = b.transpose() * lj.d_u;
    out.d_x = lj.d_x + w.transpose() * lj.d_u;
    out.d_uu = b.transpose() * lj.d_uu * b;
    out.d_ux = b.transpose() * (lj.d_ux + lj.d_uu * w);
    for (int a = 0; a < p; ++a) out.d_ux.row(a) += (db[a].transpose() * lj.d_u).transpose();
    return out;
  };
  auto value = [lagrangian, shared, n, p](const ChartPoint& x, const NaturalVelocity& s) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(n);
    for (int a = 0; a < p; ++a) u += s.components[a] * (*shared)[a].coeffs(x);
    return lagrangian.value(x, NaturalVelocity{u});
  };
  return ScalarOnTQ(n, p, std::move(jet), std::move(value));
}

}  // namespace anholonome
