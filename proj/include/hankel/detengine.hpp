#pragma once

// Direct determinant evaluation over F_q: dense matrices, the Hankel matrices
// X_{i,j} of a sequence, and small linear solves.
//
// Elimination pivots on the first nonzero entry of each column; exact
// arithmetic needs no magnitude pivoting. Over F_2 rows are bit-packed.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hankel/errors.hpp"
#include "hankel/field.hpp"
#include "hankel/gf2.hpp"
#include "hankel/sequence.hpp"

namespace hankel {

/// Square m x m matrix over F_q, row-major.
class DenseMatrix {
 public:
  explicit DenseMatrix(std::size_t dim) : dim_(dim), data_(dim * dim) {}
  DenseMatrix(std::size_t dim, std::vector<FieldElement> data) : dim_(dim), data_(std::move(data)) {
    if (data_.size() != dim_ * dim_) throw ShapeMismatch("matrix data is not dim x dim");
  }

  static DenseMatrix identity(std::size_t dim) {
    DenseMatrix m(dim);
    for (std::size_t k = 0; k < dim; ++k) m(k, k) = FieldElement{1};
    return m;
  }

  static DenseMatrix from_rows(const PrimeField& f,
                               std::initializer_list<std::initializer_list<std::int64_t>> rows) {
    DenseMatrix m(rows.size());
    std::size_t r = 0;
    for (const auto& row : rows) {
      if (row.size() != rows.size()) throw ShapeMismatch("matrix is not square");
      std::size_t c = 0;
      for (std::int64_t v : row) m(r, c++) = f.element(v);
      ++r;
    }
    return m;
  }

  std::size_t dim() const { return dim_; }
  FieldElement& operator()(std::size_t r, std::size_t c) { return data_[r * dim_ + c]; }
  FieldElement operator()(std::size_t r, std::size_t c) const { return data_[r * dim_ + c]; }
  std::span<FieldElement> data() { return data_; }
  std::span<const FieldElement> data() const { return data_; }

  /// Copy without row `skip_r` and column `skip_c`.
  DenseMatrix minor(std::size_t skip_r, std::size_t skip_c) const {
    DenseMatrix m(dim_ - 1);
    for (std::size_t r = 0, rr = 0; r < dim_; ++r) {
      if (r == skip_r) continue;
      for (std::size_t c = 0, cc = 0; c < dim_; ++c) {
        if (c == skip_c) continue;
        m(rr, cc++) = (*this)(r, c);
      }
      ++rr;
    }
    return m;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t dim_;
  std::vector<FieldElement> data_;
};

namespace detail {

inline FieldElement det_residues_inplace(std::span<FieldElement> a, std::size_t dim,
                                         const PrimeField& f) {
  const std::uint64_t q = f.modulus();
  FieldElement det = f.one();
  bool negate = false;
  for (std::size_t c = 0; c < dim; ++c) {
    std::size_t p = c;
    while (p < dim && a[p * dim + c].is_zero()) ++p;
    if (p == dim) return f.zero();
    if (p != c) {
      for (std::size_t k = c; k < dim; ++k) std::swap(a[c * dim + k], a[p * dim + k]);
      negate = !negate;
    }
    const FieldElement pivot = a[c * dim + c];
    det = f.mul(det, pivot);
    const std::uint64_t pivot_inv = f.inv(pivot).value;
    for (std::size_t r = c + 1; r < dim; ++r) {
      FieldElement* row = &a[r * dim];
      if (row[c].is_zero()) continue;
      const std::uint64_t factor = row[c].value * pivot_inv % q;
      const FieldElement* prow = &a[c * dim];
      for (std::size_t k = c + 1; k < dim; ++k) {
        const std::uint64_t sub = factor * prow[k].value % q;
        const std::uint64_t v = row[k].value;
        row[k].value = static_cast<std::uint32_t>(v >= sub ? v - sub : v + q - sub);
      }
      row[c] = f.zero();
    }
  }
  return negate ? f.neg(det) : det;
}

inline FieldElement det_binary(std::span<const FieldElement> a, std::size_t dim) {
  const std::size_t stride = gf2::words_for(dim);
  thread_local std::vector<std::uint64_t> rows;
  rows.assign(dim * stride, 0);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      if (a[r * dim + c].value) rows[r * stride + (c >> 6)] |= std::uint64_t{1} << (c & 63);
    }
  }
  return FieldElement{gf2::det_inplace(rows.data(), dim, stride) ? 1u : 0u};
}

}  // namespace detail

/// Determinant of the dim x dim row-major matrix in `a`; `a` is clobbered.
inline FieldElement det_inplace(std::span<FieldElement> a, std::size_t dim, const PrimeField& f) {
  if (dim == 0) return f.one();
  if (f.is_binary()) return detail::det_binary(a, dim);
  return detail::det_residues_inplace(a, dim, f);
}

inline FieldElement det_generic(const DenseMatrix& m, const PrimeField& f) {
  std::vector<FieldElement> scratch(m.data().begin(), m.data().end());
  return det_inplace(scratch, m.dim(), f);
}

namespace detail {

inline void check_hankel_index(const Sequence& x, int i, int j) {
  const int n = x.size();
  const int h = (n + 1) / 2;
  if (j < 0 || j > h) {
    throw IndexOutOfRange("Hankel size " + std::to_string(j) + " outside [0, " +
                          std::to_string(h) + "]");
  }
  const int lo = j == 0 ? 0 : j - 1;
  const int hi = j == 0 ? n - 1 : n - j;
  if (i < lo || i > hi) {
    throw IndexOutOfRange("column " + std::to_string(i) + " invalid for size " +
                          std::to_string(j));
  }
}

}  // namespace detail

/// Entry (r, c) of X_{i,j}, which is x_{i-r+c}.
inline FieldElement hankel_entry(const Sequence& x, int i, int j, int r, int c) {
  if (j < 1) throw IndexOutOfRange("Hankel entry needs size >= 1");
  detail::check_hankel_index(x, i, j);
  if (r < 0 || r >= j || c < 0 || c >= j) throw IndexOutOfRange("entry outside j x j matrix");
  return x[i - r + c];
}

/// d_{i,j} = det X_{i,j} by Gaussian elimination.
inline FieldElement det_elimination(const Sequence& x, int i, int j) {
  detail::check_hankel_index(x, i, j);
  const PrimeField& f = x.field();
  if (j == 0) return f.one();
  if (j == 1) return x[i];
  const auto dim = static_cast<std::size_t>(j);

  if (f.is_binary()) {
    const std::size_t stride = gf2::words_for(dim);
    thread_local std::vector<std::uint64_t> rows;
    rows.resize(dim * stride);
    for (std::size_t r = 0; r < dim; ++r) {
      gf2::extract_bits(x.bits(), static_cast<std::size_t>(i) - r, dim, rows.data() + r * stride);
    }
    return FieldElement{gf2::det_inplace(rows.data(), dim, stride) ? 1u : 0u};
  }

  thread_local std::vector<FieldElement> a;
  a.resize(dim * dim);
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) a[r * dim + c] = x[i - static_cast<int>(r) + static_cast<int>(c)];
  }
  return detail::det_residues_inplace(a, dim, f);
}

/// d_{i,j} = det X_{i,j}. Over F_2 the determinant is 1 exactly when the
/// window x_{i-j+1} .. x_{i+j-1} has linear complexity j (X_{i,j} with its
/// rows reversed is the Hankel matrix of that window); other fields use
/// elimination.
inline FieldElement det_direct(const Sequence& x, int i, int j) {
  detail::check_hankel_index(x, i, j);
  const PrimeField& f = x.field();
  if (j == 0) return f.one();
  if (j == 1) return x[i];
  if (f.is_binary()) {
    const bool nz = gf2::hankel_nonsingular(x.bits(), static_cast<std::size_t>(i - j + 1),
                                            static_cast<std::size_t>(j));
    return FieldElement{nz ? 1u : 0u};
  }
  return det_elimination(x, i, j);
}

/// Solves A y = b. Returns nullopt when A is singular.
inline std::optional<std::vector<FieldElement>> solve_linear(DenseMatrix a, std::vector<FieldElement> b,
                                                             const PrimeField& f) {
  const std::size_t n = a.dim();
  if (b.size() != n) throw ShapeMismatch("right-hand side length differs from matrix size");
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    while (p < n && a(p, c).is_zero()) ++p;
    if (p == n) return std::nullopt;
    if (p != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a(c, k), a(p, k));
      std::swap(b[c], b[p]);
    }
    const FieldElement pinv = f.inv(a(c, c));
    for (std::size_t k = c; k < n; ++k) a(c, k) = f.mul(a(c, k), pinv);
    b[c] = f.mul(b[c], pinv);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a(r, c).is_zero()) continue;
      const FieldElement factor = a(r, c);
      for (std::size_t k = c; k < n; ++k) a(r, k) = f.sub(a(r, k), f.mul(factor, a(c, k)));
      b[r] = f.sub(b[r], f.mul(factor, b[c]));
    }
  }
  return b;
}

}  // namespace hankel
