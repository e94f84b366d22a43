#include "anholonome/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "anholonome/errors.hpp"

namespace anholonome {

namespace {

Eigen::PartialPivLU<Eigen::MatrixXd> factor(const Eigen::MatrixXd& a, const char* what, double pivot_tol) {
  if (a.rows() != a.cols()) throw DimensionError(std::string(what) + ": matrix is not square");
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  if (a.rows() > 0) {
    const double smallest = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (!(smallest >= pivot_tol)) {
      throw SingularMatrixError(std::string(what) + " is singular (pivot " + std::to_string(smallest) + ")");
    }
  }
  return lu;
}

}  // namespace

Eigen::VectorXd solve_checked(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const char* what,
                              double pivot_tol) {
  if (b.size() != a.rows()) throw DimensionError(std::string(what) + ": right-hand side size mismatch");
  if (a.rows() == 0) return Eigen::VectorXd(0);
  return factor(a, what, pivot_tol).solve(b);
}

Eigen::MatrixXd solve_checked(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what,
                              double pivot_tol) {
  if (b.rows() != a.rows()) throw DimensionError(std::string(what) + ": right-hand side size mismatch");
  if (a.rows() == 0) return Eigen::MatrixXd(0, b.cols());
  return factor(a, what, pivot_tol).solve(b);
}

double Tensor3::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

double Tensor3::max_abs_diff(const Tensor3& other) const {
  if (d0_ != other.d0_ || d1_ != other.d1_ || d2_ != other.d2_) {
    throw DimensionError("Tensor3 shape mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < data_.size(); ++i) m = std::max(m, std::abs(data_[i] - other.data_[i]));
  return m;
}

}  // namespace anholonome
