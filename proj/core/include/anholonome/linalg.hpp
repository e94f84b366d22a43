#pragma once

#include <vector>

#include <Eigen/Dense>

namespace anholonome {

/// Pivot magnitude below which a partial-pivot factorization is declared singular.
inline constexpr double kPivotTolerance = 1e-12;

/// Library-wide invertibility threshold on |det| of frame matrices.
inline constexpr double kFrameDetTolerance = 1e-10;

/// Solve A x = b by partial-pivot LU; throws SingularMatrixError when the
/// smallest pivot falls below `pivot_tol`. `what` names the matrix in the message.
Eigen::VectorXd solve_checked(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, const char* what,
                              double pivot_tol = kPivotTolerance);

/// Same factorization, multiple right-hand sides.
Eigen::MatrixXd solve_checked(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const char* what,
                              double pivot_tol = kPivotTolerance);

/// Dense rank-3 array with T(a, b, c) addressing, row-major in (a, b, c).
class Tensor3 {
 public:
  Tensor3() = default;
  Tensor3(int d0, int d1, int d2) : d0_(d0), d1_(d1), d2_(d2), data_(static_cast<std::size_t>(d0 * d1 * d2), 0.0) {}

  int dim0() const noexcept { return d0_; }
  int dim1() const noexcept { return d1_; }
  int dim2() const noexcept { return d2_; }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(int a, int b, int c) { return data_[index(a, b, c)]; }
  double operator()(int a, int b, int c) const { return data_[index(a, b, c)]; }

  double max_abs() const;
  /// max |this - other| over all entries; dimensions must agree.
  double max_abs_diff(const Tensor3& other) const;

 private:
  std::size_t index(int a, int b, int c) const noexcept {
    return static_cast<std::size_t>((a * d1_ + b) * d2_ + c);
  }

  int d0_ = 0;
  int d1_ = 0;
  int d2_ = 0;
  std::vector<double> data_;
};

}  // namespace anholonome
