#pragma once

// Exact scalar types and scalar-generic dense routines (row reduction,
// symmetric signature by congruence). Everything here is templated on the
// scalar so the same code runs on GMP rationals and on doubles.

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace lefschetz {

using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;
using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using IntMatrix = MatrixX<Integer>;
using IntVector = VectorX<Integer>;
using RatMatrix = MatrixX<Rational>;

/// "p/q" with q > 0, always carrying the denominator.
inline std::string to_fraction_string(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

/// Reduced display form: "p" when the denominator is 1, else "p/q".
inline std::string to_display_string(const Rational& q) {
  if (denominator(q) == 1) return numerator(q).str();
  return to_fraction_string(q);
}

namespace detail {

template <typename Scalar>
bool is_zero(const Scalar& x) {
  if constexpr (std::is_floating_point_v<Scalar>) {
    return std::abs(x) <= Scalar(1e-12);
  } else {
    return x == 0;
  }
}

template <typename Scalar>
int sign_of(const Scalar& x) {
  if (is_zero(x)) return 0;
  return x > 0 ? 1 : -1;
}

}  // namespace detail

/// Basis of the right null space of `m`, one basis vector per column.
/// Exact for rational scalars; uses a fixed absolute pivot threshold for
/// floating scalars.
template <typename Derived>
MatrixX<typename Derived::Scalar> null_space(const Eigen::MatrixBase<Derived>& m) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> r = m;
  const Eigen::Index rows = r.rows();
  const Eigen::Index cols = r.cols();
  std::vector<Eigen::Index> pivot_cols;
  Eigen::Index row = 0;
  for (Eigen::Index col = 0; col < cols && row < rows; ++col) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = row; i < rows; ++i) {
      if (!detail::is_zero(r(i, col))) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) continue;
    r.row(row).swap(r.row(pivot));
    const Scalar inv = Scalar(1) / r(row, col);
    r.row(row) *= inv;
    for (Eigen::Index i = 0; i < rows; ++i) {
      if (i == row || detail::is_zero(r(i, col))) continue;
      const Scalar f = r(i, col);
      r.row(i) -= f * r.row(row);
    }
    pivot_cols.push_back(col);
    ++row;
  }

  std::vector<bool> is_pivot(static_cast<std::size_t>(cols), false);
  for (auto c : pivot_cols) is_pivot[static_cast<std::size_t>(c)] = true;

  const Eigen::Index nullity = cols - static_cast<Eigen::Index>(pivot_cols.size());
  MatrixX<Scalar> basis = MatrixX<Scalar>::Zero(cols, nullity);
  Eigen::Index k = 0;
  for (Eigen::Index free = 0; free < cols; ++free) {
    if (is_pivot[static_cast<std::size_t>(free)]) continue;
    basis(free, k) = Scalar(1);
    for (std::size_t p = 0; p < pivot_cols.size(); ++p) {
      basis(pivot_cols[p], k) = -r(static_cast<Eigen::Index>(p), free);
    }
    ++k;
  }
  return basis;
}

struct Inertia {
  int positive = 0;
  int negative = 0;
  int zero = 0;

  int signature() const { return positive - negative; }
  int rank() const { return positive + negative; }
  friend bool operator==(const Inertia&, const Inertia&) = default;
};

/// Inertia of a symmetric matrix by symmetric Gaussian elimination
/// (congruence). A nonzero diagonal pivot is eliminated directly; when the
/// remaining diagonal is all zero but an off-diagonal entry a_ij is not, the
/// congruence e_i <- e_i + e_j produces the diagonal pivot 2·a_ij.
/// Sylvester's law makes the pivot sign count the inertia.
template <typename Derived>
Inertia symmetric_inertia(const Eigen::MatrixBase<Derived>& sym) {
  using Scalar = typename Derived::Scalar;
  MatrixX<Scalar> a = sym;
  Inertia out;
  Eigen::Index n = a.rows();
  while (n > 0) {
    Eigen::Index pivot = -1;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!detail::is_zero(a(i, i))) {
        pivot = i;
        break;
      }
    }
    if (pivot < 0) {
      Eigen::Index pi = -1, pj = -1;
      for (Eigen::Index i = 0; i < n && pi < 0; ++i) {
        for (Eigen::Index j = i + 1; j < n; ++j) {
          if (!detail::is_zero(a(i, j))) {
            pi = i;
            pj = j;
            break;
          }
        }
      }
      if (pi < 0) {
        out.zero += static_cast<int>(n);
        break;
      }
      a.row(pi) += a.row(pj);
      a.col(pi) += a.col(pj);
      pivot = pi;
    }

    // Move the pivot to the last slot, then take the Schur complement.
    const Eigen::Index last = n - 1;
    if (pivot != last) {
      a.row(pivot).head(n).swap(a.row(last).head(n));
      a.col(pivot).head(n).swap(a.col(last).head(n));
    }
    const Scalar d = a(last, last);
    if (d > 0) {
      ++out.positive;
    } else {
      ++out.negative;
    }
    for (Eigen::Index i = 0; i < last; ++i) {
      if (detail::is_zero(a(i, last))) continue;
      const Scalar f = a(i, last) / d;
      for (Eigen::Index j = 0; j < last; ++j) {
        a(i, j) -= f * a(last, j);
      }
    }
    n = last;
  }
  return out;
}

}  // namespace lefschetz
