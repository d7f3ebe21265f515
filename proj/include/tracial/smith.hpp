#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <boost/multiprecision/cpp_int.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <cstdint>
#include <utility>

namespace tracial {

/// Arbitrary-precision integer; expression templates off so it behaves as a
/// plain value type inside Eigen containers.
using BigInt = boost::multiprecision::number<boost::multiprecision::cpp_int_backend<>,
                                             boost::multiprecision::et_off>;

template <typename Scalar>
using IntegerMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using BigMatrix = IntegerMatrix<BigInt>;

/// D = U * M * V with U, V unimodular and D diagonal, d_1 | d_2 | ... and
/// d_i >= 0. The inverses of U and V are tracked alongside.
template <typename Scalar>
struct SmithForm {
  IntegerMatrix<Scalar> U, D, V;
  IntegerMatrix<Scalar> U_inv, V_inv;
  Eigen::Index rank = 0;

  Scalar diagonal(Eigen::Index i) const { return D(i, i); }
};

namespace detail {

template <typename Scalar>
Scalar floor_div(const Scalar& a, const Scalar& b) {
  Scalar q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) q -= 1;
  return q;
}

template <typename Scalar>
Scalar abs_value(const Scalar& a) {
  return a < 0 ? Scalar(-a) : a;
}

// Extended gcd: returns (g, x, y) with a x + b y = g >= 0.
template <typename Scalar>
std::tuple<Scalar, Scalar, Scalar> extended_gcd(Scalar a, Scalar b) {
  Scalar x0 = 1, y0 = 0, x1 = 0, y1 = 1;
  while (b != 0) {
    Scalar q = floor_div(a, b);
    Scalar r = a - q * b;
    a = b;
    b = r;
    Scalar t = x0 - q * x1;
    x0 = x1;
    x1 = t;
    t = y0 - q * y1;
    y0 = y1;
    y1 = t;
  }
  if (a < 0) return {Scalar(-a), Scalar(-x0), Scalar(-y0)};
  return {a, x0, y0};
}

// Rows i, j <- [[x, y], [-b/g, a/g]] applied to (row i, row j); the 2x2 block
// has determinant 1 and its inverse is [[a/g, -y], [b/g, x]].
template <typename Scalar>
void combine_rows(IntegerMatrix<Scalar>& m, Eigen::Index i, Eigen::Index j, const Scalar& x,
                  const Scalar& y, const Scalar& ag, const Scalar& bg) {
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const Scalar ri = m(i, c), rj = m(j, c);
    m(i, c) = x * ri + y * rj;
    m(j, c) = ag * rj - bg * ri;
  }
}

template <typename Scalar>
void combine_cols(IntegerMatrix<Scalar>& m, Eigen::Index i, Eigen::Index j, const Scalar& x,
                  const Scalar& y, const Scalar& ag, const Scalar& bg) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Scalar ci = m(r, i), cj = m(r, j);
    m(r, i) = x * ci + y * cj;
    m(r, j) = ag * cj - bg * ci;
  }
}

// Inverse bookkeeping: if rows transform by T, U_inv transforms columns by T^{-1}.
template <typename Scalar>
void combine_cols_inverse(IntegerMatrix<Scalar>& m, Eigen::Index i, Eigen::Index j, const Scalar& x,
                          const Scalar& y, const Scalar& ag, const Scalar& bg) {
  // new_inv = inv * T^{-1}, T^{-1} = [[ag, -y], [bg, x]] acting on columns (i, j)
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    const Scalar ci = m(r, i), cj = m(r, j);
    m(r, i) = ag * ci + bg * cj;
    m(r, j) = x * cj - y * ci;
  }
}

template <typename Scalar>
void combine_rows_inverse(IntegerMatrix<Scalar>& m, Eigen::Index i, Eigen::Index j, const Scalar& x,
                          const Scalar& y, const Scalar& ag, const Scalar& bg) {
  // V' = V * S with S acting on columns i, j as [[x, -bg], [y, ag]];
  // V_inv' = S^{-1} * V_inv, S^{-1} = [[ag, bg], [-y, x]] on rows i, j.
  for (Eigen::Index c = 0; c < m.cols(); ++c) {
    const Scalar ri = m(i, c), rj = m(j, c);
    m(i, c) = ag * ri + bg * rj;
    m(j, c) = x * rj - y * ri;
  }
}

}  // namespace detail

/// Smith normal form by gcd row/column combinations, exact in Scalar.
template <typename Scalar>
SmithForm<Scalar> smith_normal_form(const IntegerMatrix<Scalar>& m) {
  using detail::abs_value;
  const Eigen::Index rows = m.rows(), cols = m.cols();
  SmithForm<Scalar> out;
  out.D = m;
  out.U = IntegerMatrix<Scalar>::Identity(rows, rows);
  out.U_inv = IntegerMatrix<Scalar>::Identity(rows, rows);
  out.V = IntegerMatrix<Scalar>::Identity(cols, cols);
  out.V_inv = IntegerMatrix<Scalar>::Identity(cols, cols);
  auto& d = out.D;

  auto swap_rows = [&](Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    d.row(a).swap(d.row(b));
    out.U.row(a).swap(out.U.row(b));
    out.U_inv.col(a).swap(out.U_inv.col(b));
  };
  auto swap_cols = [&](Eigen::Index a, Eigen::Index b) {
    if (a == b) return;
    d.col(a).swap(d.col(b));
    out.V.col(a).swap(out.V.col(b));
    out.V_inv.row(a).swap(out.V_inv.row(b));
  };
  // Replace (row k, row i) so that d(k,k) becomes gcd(d(k,k), d(i,k)) and d(i,k) = 0.
  auto eliminate_row = [&](Eigen::Index k, Eigen::Index i) {
    const Scalar a = d(k, k), b = d(i, k);
    if (b % a == 0) {  // plain subtraction; the gcd step may swap and cycle with the column pass
      const Scalar one = 1, zero = 0, f = b / a;
      detail::combine_rows(d, k, i, one, zero, one, f);
      detail::combine_rows(out.U, k, i, one, zero, one, f);
      detail::combine_cols_inverse(out.U_inv, k, i, one, zero, one, f);
      return;
    }
    auto [g, x, y] = detail::extended_gcd(a, b);
    const Scalar ag = a / g, bg = b / g;
    detail::combine_rows(d, k, i, x, y, ag, bg);
    detail::combine_rows(out.U, k, i, x, y, ag, bg);
    detail::combine_cols_inverse(out.U_inv, k, i, x, y, ag, bg);
  };
  auto eliminate_col = [&](Eigen::Index k, Eigen::Index j) {
    const Scalar a = d(k, k), b = d(k, j);
    if (b % a == 0) {
      const Scalar one = 1, zero = 0, f = b / a;
      detail::combine_cols(d, k, j, one, zero, one, f);
      detail::combine_cols(out.V, k, j, one, zero, one, f);
      detail::combine_rows_inverse(out.V_inv, k, j, one, zero, one, f);
      return;
    }
    auto [g, x, y] = detail::extended_gcd(a, b);
    const Scalar ag = a / g, bg = b / g;
    detail::combine_cols(d, k, j, x, y, ag, bg);
    detail::combine_cols(out.V, k, j, x, y, ag, bg);
    detail::combine_rows_inverse(out.V_inv, k, j, x, y, ag, bg);
  };

  const Eigen::Index n = std::min(rows, cols);
  for (Eigen::Index k = 0; k < n; ++k) {
    // pivot: smallest nonzero magnitude in the trailing block
    Eigen::Index pr = -1, pc = -1;
    for (Eigen::Index i = k; i < rows; ++i)
      for (Eigen::Index j = k; j < cols; ++j)
        if (d(i, j) != 0 && (pr < 0 || abs_value(d(i, j)) < abs_value(d(pr, pc)))) {
          pr = i;
          pc = j;
        }
    if (pr < 0) break;
    swap_rows(k, pr);
    swap_cols(k, pc);

    for (;;) {
      for (Eigen::Index i = k + 1; i < rows; ++i)
        if (d(i, k) != 0) eliminate_row(k, i);
      for (Eigen::Index j = k + 1; j < cols; ++j)
        if (d(k, j) != 0) eliminate_col(k, j);
      bool clean = true;
      for (Eigen::Index i = k + 1; i < rows && clean; ++i) clean = d(i, k) == 0;
      if (!clean) continue;
      // divisibility: the pivot must divide every trailing entry
      Eigen::Index bad = -1;
      for (Eigen::Index i = k + 1; i < rows && bad < 0; ++i)
        for (Eigen::Index j = k + 1; j < cols; ++j)
          if (d(i, j) % d(k, k) != 0) {
            bad = i;
            break;
          }
      if (bad < 0) break;
      // add the offending row to row k and repeat
      for (Eigen::Index c = 0; c < cols; ++c) d(k, c) += d(bad, c);
      for (Eigen::Index c = 0; c < rows; ++c) out.U(k, c) += out.U(bad, c);
      for (Eigen::Index r = 0; r < rows; ++r) out.U_inv(r, bad) -= out.U_inv(r, k);
    }
    if (d(k, k) < 0) {
      d.row(k) = -d.row(k);
      out.U.row(k) = -out.U.row(k);
      out.U_inv.col(k) = -out.U_inv.col(k);
    }
    out.rank = k + 1;
  }
  return out;
}

}  // namespace tracial
