#pragma once

// Truncated second-order forward-mode jet.
//
// A Jet carries a value, its gradient with respect to `nvars` seeded
// variables, and a partial Hessian: only the rows belonging to a contiguous
// block of "row" variables [row0, row0 + nrows) are propagated. For a
// Lagrangian seeded over (x, u) with the u-block as rows this yields exactly
// the (u,u) and (u,x) second-derivative blocks and never touches (x,x).
//
// Constants have nvars == 0 and mix with any seeded jet. Two non-constant
// operands must share the same seeding layout.

#include <array>
#include <cmath>
#include <string>

#include "anholonome/errors.hpp"

namespace anholonome {

/// Largest chart dimension supported by the jet engine.
inline constexpr int kMaxDim = 12;

class Jet {
 public:
  static constexpr int kMaxVars = 2 * kMaxDim;
  static constexpr int kMaxRows = kMaxDim;

  Jet() noexcept : value_(0.0) {}
  Jet(double c) noexcept : value_(c) {}  // NOLINT(google-explicit-constructor)

  /// Seed variable `index` out of `nvars`, with Hessian rows [row0, row0+nrows).
  static Jet variable(double value, int index, int nvars, int row0, int nrows) {
    if (nvars > kMaxVars || nrows > kMaxRows || index < 0 || index >= nvars || row0 < 0 ||
        row0 + nrows > nvars) {
      throw DimensionError("jet seeding exceeds engine capacity or is malformed");
    }
    Jet j(value);
    j.nvars_ = nvars;
    j.row0_ = row0;
    j.nrows_ = nrows;
    for (int k = 0; k < nvars; ++k) j.grad_[k] = 0.0;
    for (int i = 0; i < nrows * nvars; ++i) j.hess_[i] = 0.0;
    j.grad_[index] = 1.0;
    return j;
  }

  double value() const noexcept { return value_; }
  int nvars() const noexcept { return nvars_; }
  int nrows() const noexcept { return nrows_; }
  int row0() const noexcept { return row0_; }
  bool is_constant() const noexcept { return nvars_ == 0; }

  double grad(int k) const noexcept { return k < nvars_ ? grad_[k] : 0.0; }
  /// Second derivative with respect to row variable `row0 + i` and variable `k`.
  double hess(int i, int k) const noexcept {
    return (i < nrows_ && k < nvars_) ? hess_[i * nvars_ + k] : 0.0;
  }

  Jet operator-() const {
    Jet r = *this;
    r.value_ = -value_;
    for (int k = 0; k < nvars_; ++k) r.grad_[k] = -grad_[k];
    for (int i = 0; i < nrows_ * nvars_; ++i) r.hess_[i] = -hess_[i];
    return r;
  }
  Jet operator+() const { return *this; }

  friend Jet operator+(const Jet& a, const Jet& b) {
    if (b.is_constant()) return a.shifted(b.value_);
    if (a.is_constant()) return b.shifted(a.value_);
    check_layout(a, b);
    Jet r = a;
    r.value_ += b.value_;
    for (int k = 0; k < r.nvars_; ++k) r.grad_[k] += b.grad_[k];
    for (int i = 0; i < r.nrows_ * r.nvars_; ++i) r.hess_[i] += b.hess_[i];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) { return a + (-b); }

  friend Jet operator*(const Jet& a, const Jet& b) {
    if (b.is_constant()) return a.scaled(b.value_);
    if (a.is_constant()) return b.scaled(a.value_);
    check_layout(a, b);
    Jet r;
    r.nvars_ = a.nvars_;
    r.nrows_ = a.nrows_;
    r.row0_ = a.row0_;
    r.value_ = a.value_ * b.value_;
    const int n = r.nvars_;
    for (int k = 0; k < n; ++k) r.grad_[k] = a.value_ * b.grad_[k] + b.value_ * a.grad_[k];
    for (int i = 0; i < r.nrows_; ++i) {
      const double ga_i = a.grad_[r.row0_ + i];
      const double gb_i = b.grad_[r.row0_ + i];
      for (int k = 0; k < n; ++k) {
        r.hess_[i * n + k] = a.value_ * b.hess_[i * n + k] + b.value_ * a.hess_[i * n + k] +
                             (ga_i * b.grad_[k] + gb_i * a.grad_[k]);
      }
    }
    return r;
  }

  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.value_ == 0.0) throw EvaluationError("division by zero in evaluator");
    if (b.is_constant()) return a.scaled(1.0 / b.value_);
    return a * reciprocal(b);
  }

  Jet& operator+=(const Jet& o) { return *this = *this + o; }
  Jet& operator-=(const Jet& o) { return *this = *this - o; }
  Jet& operator*=(const Jet& o) { return *this = *this * o; }
  Jet& operator/=(const Jet& o) { return *this = *this / o; }

  /// phi(a) given phi(a.value), phi'(a.value), phi''(a.value).
  static Jet chain(const Jet& a, double f, double df, double d2f) {
    if (!std::isfinite(f) || !std::isfinite(df) || !std::isfinite(d2f)) {
      throw EvaluationError("non-finite intermediate in evaluator");
    }
    Jet r;
    r.value_ = f;
    r.nvars_ = a.nvars_;
    r.nrows_ = a.nrows_;
    r.row0_ = a.row0_;
    const int n = r.nvars_;
    for (int k = 0; k < n; ++k) r.grad_[k] = df * a.grad_[k];
    for (int i = 0; i < r.nrows_; ++i) {
      const double g_i = a.grad_[r.row0_ + i];
      for (int k = 0; k < n; ++k) {
        r.hess_[i * n + k] = df * a.hess_[i * n + k] + d2f * g_i * a.grad_[k];
      }
    }
    return r;
  }

  static Jet reciprocal(const Jet& a) {
    const double inv = 1.0 / a.value_;
    return chain(a, inv, -inv * inv, 2.0 * inv * inv * inv);
  }

 private:
  static void check_layout(const Jet& a, const Jet& b) {
    if (a.nvars_ != b.nvars_ || a.nrows_ != b.nrows_ || a.row0_ != b.row0_) {
      throw DimensionError("jets with different seeding layouts were combined");
    }
  }

  Jet shifted(double c) const {
    Jet r = *this;
    r.value_ += c;
    return r;
  }

  Jet scaled(double c) const {
    Jet r = *this;
    r.value_ *= c;
    for (int k = 0; k < nvars_; ++k) r.grad_[k] *= c;
    for (int i = 0; i < nrows_ * nvars_; ++i) r.hess_[i] *= c;
    return r;
  }

  double value_;
  int nvars_ = 0;
  int nrows_ = 0;
  int row0_ = 0;
  std::array<double, kMaxVars> grad_;
  std::array<double, kMaxRows * kMaxVars> hess_;
};

inline Jet operator+(const Jet& a, double b) { return a + Jet(b); }
inline Jet operator+(double a, const Jet& b) { return Jet(a) + b; }
inline Jet operator-(const Jet& a, double b) { return a + Jet(-b); }
inline Jet operator-(double a, const Jet& b) { return Jet(a) - b; }
inline Jet operator*(const Jet& a, double b) { return a * Jet(b); }
inline Jet operator*(double a, const Jet& b) { return Jet(a) * b; }
inline Jet operator/(const Jet& a, double b) { return a / Jet(b); }
inline Jet operator/(double a, const Jet& b) { return Jet(a) / b; }

// Primitive set. Each one is also available for plain doubles through std::,
// so evaluators written as generic lambdas work for both.

inline Jet sin(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return Jet::chain(a, s, c, -s);
}

inline Jet cos(const Jet& a) {
  const double s = std::sin(a.value()), c = std::cos(a.value());
  return Jet::chain(a, c, -s, -c);
}

inline Jet tan(const Jet& a) {
  const double t = std::tan(a.value());
  const double sec2 = 1.0 + t * t;
  return Jet::chain(a, t, sec2, 2.0 * t * sec2);
}

inline Jet exp(const Jet& a) {
  const double e = std::exp(a.value());
  return Jet::chain(a, e, e, e);
}

inline Jet log(const Jet& a) {
  if (a.value() <= 0.0) throw EvaluationError("log of non-positive argument");
  const double inv = 1.0 / a.value();
  return Jet::chain(a, std::log(a.value()), inv, -inv * inv);
}

inline Jet sqrt(const Jet& a) {
  if (a.value() <= 0.0) throw EvaluationError("sqrt at or below its branch point");
  const double s = std::sqrt(a.value());
  return Jet::chain(a, s, 0.5 / s, -0.25 / (s * a.value()));
}

inline Jet pow(const Jet& a, double p) {
  if (p == 0.0) return Jet(1.0);
  if (p == 1.0) return a;
  if (p == 2.0) return a * a;
  const double x = a.value();
  return Jet::chain(a, std::pow(x, p), p * std::pow(x, p - 1.0), p * (p - 1.0) * std::pow(x, p - 2.0));
}

inline Jet square(const Jet& a) { return a * a; }
inline double square(double a) { return a * a; }

using std::cos;
using std::exp;
using std::log;
using std::pow;
using std::sin;
using std::sqrt;
using std::tan;

}  // namespace anholonome
