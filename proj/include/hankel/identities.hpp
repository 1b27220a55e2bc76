#pragma once

// Rules that produce d_{i,j} from rows above it without evaluating the
// j x j determinant:
//
//   * zero squares: a maximal run of zeros on row j0 under a nonzero row
//     forces a (b-a+1)-row block of zeros below it;
//   * NSEW:  d_{i,j} d_{i,j-2} = d_{i,j-1}^2 - d_{i+1,j-1} d_{i-1,j-1};
//   * cross: d_{i,j} = d_{i,j0-1}^{j0-j} det[d_{i-r+c,j0}], 0 <= r,c <= j-j0,
//     where j0 is the top of the zero run in column i ending at row j-1;
//   * ball grid: solve det G_{i,j,k} = 0 for the bottom-right unknown, with
//     G_{i,j,k}(r, c) = d_{i-r+c, j-2k+r+c}. This rule is conjectural.
//
// Solvers read through a TableReader so that tests can audit which cells
// they touch.

#include <algorithm>
#include <array>
#include <concepts>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hankel/detengine.hpp"
#include "hankel/errors.hpp"
#include "hankel/field.hpp"
#include "hankel/gf2.hpp"
#include "hankel/table.hpp"

namespace hankel {

template <class R>
concept TableReader = requires(const R& r, int i, int j) {
  { r.value(i, j) } -> std::same_as<FieldElement>;
  { r.field() } -> std::convertible_to<const PrimeField&>;
  { r.n() } -> std::convertible_to<int>;
};

/// Reader that refuses cells on rows >= row_limit and cells that are not
/// Known yet.
class AuditedReader {
 public:
  AuditedReader(const DetTable& table, int row_limit) : table_(&table), limit_(row_limit) {}

  FieldElement value(int i, int j) const {
    if (j >= limit_) {
      throw IndexOutOfRange("read of row " + std::to_string(j) + " while solving row " +
                            std::to_string(limit_));
    }
    const Cell cell = table_->get(i, j);
    if (cell.status != CellStatus::known) {
      throw IndexOutOfRange("read of unset cell (" + std::to_string(i) + ", " + std::to_string(j) + ")");
    }
    return cell.value;
  }
  const PrimeField& field() const { return table_->field(); }
  int n() const { return table_->n(); }

 private:
  const DetTable* table_;
  int limit_;
};

// --------------------------------------------------------------------------
// Zero squares

/// Zero block with columns [a, b] starting on row j0. It spans rows
/// j0..j1 with j1 = j0 + (b - a); its flanks a-1, b+1 are nonzero when in range.
struct ZeroSquare {
  int a = 0;
  int b = 0;
  int j0 = 0;

  int j1() const { return j0 + (b - a); }
  int run_length() const { return b - a + 1; }
  bool covers(int a2, int b2, int row) const { return a <= a2 && b2 <= b && j0 <= row && row <= j1(); }

  friend bool operator==(const ZeroSquare&, const ZeroSquare&) = default;
};

/// Maximal zero runs on row j-1 that seed a new square: row j-2 nonzero over
/// [a-1, b+1] (clipped to the table), not inside an already registered
/// square. A run may touch the triangle's edge; the square then extends past
/// the table and only its in-range part is filled.
inline std::vector<ZeroSquare> find_zero_squares(const DetTable& t, int j,
                                                 std::span<const ZeroSquare> registered = {}) {
  if (j < 2 || j > t.h()) throw IndexOutOfRange("square search needs 2 <= j <= h");
  const int row = j - 1;
  const int above = j - 2;
  const ColumnRange cols = t.cols(row);
  const ColumnRange cols_above = t.cols(above);
  std::vector<ZeroSquare> found;

  int i = cols.lo;
  while (i <= cols.hi) {
    if (!t.value(i, row).is_zero()) {
      ++i;
      continue;
    }
    const int a = i;
    while (i <= cols.hi && t.value(i, row).is_zero()) ++i;
    const int b = i - 1;

    bool covered_above = true;
    for (int k = std::max(a - 1, cols_above.lo); k <= std::min(b + 1, cols_above.hi); ++k) {
      if (t.value(k, above).is_zero()) {
        covered_above = false;
        break;
      }
    }
    if (!covered_above) continue;

    const bool seen = std::any_of(registered.begin(), registered.end(),
                                  [&](const ZeroSquare& s) { return s.covers(a, b, row); });
    if (!seen) found.push_back({a, b, row});
  }
  return found;
}

/// Writes 0 into every Unset cell of the square on rows
/// [max(from_row, j0), min(j1, h)], clipped by the triangle edges.
inline std::uint64_t fill_zero_square(DetTable& t, const ZeroSquare& sq, int from_row) {
  std::uint64_t written = 0;
  const int last = std::min(sq.j1(), t.h());
  for (int r = std::max(from_row, sq.j0); r <= last; ++r) {
    const ColumnRange cols = t.cols(r);
    const int lo = std::max(sq.a, cols.lo);
    const int hi = std::min(sq.b, cols.hi);
    for (int i = lo; i <= hi; ++i) {
      if (t.known(i, r)) {
        if (!t.value(i, r).is_zero()) {
          throw DoubleWrite("zero square (" + std::to_string(sq.a) + ", " + std::to_string(sq.b) +
                            ", " + std::to_string(sq.j0) + ") overlaps nonzero cell (" +
                            std::to_string(i) + ", " + std::to_string(r) + ")");
        }
        continue;
      }
      t.set(i, r, t.field().zero(), Branch::square_fill);
      ++written;
    }
  }
  return written;
}

// --------------------------------------------------------------------------
// NSEW

template <TableReader R>
std::optional<FieldElement> nsew_solve(const R& t, int i, int j) {
  const PrimeField& f = t.field();
  const FieldElement south = t.value(i, j - 2);
  if (south.is_zero()) return std::nullopt;
  const FieldElement centre = t.value(i, j - 1);
  const FieldElement numer =
      f.sub(f.mul(centre, centre), f.mul(t.value(i + 1, j - 1), t.value(i - 1, j - 1)));
  return f.div(numer, south);
}

// --------------------------------------------------------------------------
// Cross shape

struct CrossSolution {
  FieldElement value;
  int j0 = 0;
  int depth() const { return j - j0; }
  int j = 0;
};

/// Applies when d_{i,j-1} = 0: finds the top j0 of the zero run in column i
/// ending at row j-1 and evaluates the (j-j0+1)-square Toeplitz determinant
/// of row j0 around column i.
template <TableReader R>
std::optional<CrossSolution> cross_solve(const R& t, int i, int j) {
  if (j < 2 || !t.value(i, j - 1).is_zero()) return std::nullopt;
  int j0 = j - 1;
  while (j0 > 0 && t.value(i, j0 - 1).is_zero()) --j0;
  if (j0 == 0) return std::nullopt;  // row 0 is all ones; unreachable on a valid table
  const int m = j - j0;
  const int n = t.n();
  if (i - m < j0 - 1 || i + m > n - j0) return std::nullopt;

  const PrimeField& f = t.field();
  const auto dim = static_cast<std::size_t>(m + 1);
  FieldElement det;
  if (f.is_binary()) {
    // Row r of the matrix is the window of row j0 starting at column i-r.
    thread_local std::vector<std::uint64_t> window;
    thread_local std::vector<std::uint64_t> rows;
    const auto span_len = static_cast<std::size_t>(2 * m + 1);
    window.assign(gf2::words_for(span_len), 0);
    for (int c = i - m, k = 0; c <= i + m; ++c, ++k) {
      if (!t.value(c, j0).is_zero()) window[static_cast<std::size_t>(k) >> 6] |= std::uint64_t{1} << (k & 63);
    }
    const std::size_t stride = gf2::words_for(dim);
    rows.resize(dim * stride);
    for (std::size_t r = 0; r < dim; ++r) {
      gf2::extract_bits(window, static_cast<std::size_t>(m) - r, dim, rows.data() + r * stride);
    }
    det = FieldElement{gf2::det_inplace(rows.data(), dim, stride) ? 1u : 0u};
  } else {
    thread_local std::vector<FieldElement> a;
    a.resize(dim * dim);
    for (int r = 0; r <= m; ++r) {
      for (int c = 0; c <= m; ++c) a[static_cast<std::size_t>(r) * dim + c] = t.value(i - r + c, j0);
    }
    det = det_inplace(a, dim, f);
  }
  const FieldElement pivot = t.value(i, j0 - 1);
  return CrossSolution{f.mul(f.pow(pivot, j0 - j), det), j0, j};
}

// --------------------------------------------------------------------------
// Ball grid G_{i,j,k}

struct GridSpec {
  int i = 0;
  int j = 0;
  int k = 0;
};

/// The (k+1)-square matrix G_{i,j,k}; with zero_unknown the bottom-right
/// entry d_{i,j} is replaced by 0.
template <TableReader R>
DenseMatrix grid_matrix(const R& t, GridSpec g, bool zero_unknown) {
  if (g.k < 0 || g.j < 2 * g.k) throw IndexOutOfRange("grid needs 0 <= k and j >= 2k");
  const auto dim = static_cast<std::size_t>(g.k + 1);
  DenseMatrix m(dim);
  const int n = t.n();
  for (int r = 0; r <= g.k; ++r) {
    for (int c = 0; c <= g.k; ++c) {
      if (zero_unknown && r == g.k && c == g.k) continue;
      const int col = g.i - r + c;
      const int row = g.j - 2 * g.k + r + c;
      const int lo = row == 0 ? 0 : row - 1;
      const int hi = row == 0 ? n - 1 : n - row;
      if (col < lo || col > hi) {
        throw IndexOutOfRange("grid cell (" + std::to_string(col) + ", " + std::to_string(row) +
                              ") outside table");
      }
      m(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = t.value(col, row);
    }
  }
  return m;
}

namespace detail {

/// det G_{i,j,k} (optionally with the bottom-right entry zeroed) without
/// heap traffic. Assumes all referenced cells are in range.
template <TableReader R>
FieldElement grid_det(const R& t, int i, int j, int k, bool zero_unknown) {
  const PrimeField& f = t.field();
  const auto dim = static_cast<std::size_t>(k + 1);
  if (f.is_binary()) {
    std::array<std::uint64_t, kMaxGridRadius + 1> rows{};
    for (int r = 0; r <= k; ++r) {
      std::uint64_t bits = 0;
      for (int c = 0; c <= k; ++c) {
        if (zero_unknown && r == k && c == k) continue;
        if (!t.value(i - r + c, j - 2 * k + r + c).is_zero()) bits |= std::uint64_t{1} << c;
      }
      rows[static_cast<std::size_t>(r)] = bits;
    }
    return FieldElement{gf2::det_small(rows.data(), dim) ? 1u : 0u};
  }
  std::array<FieldElement, (kMaxGridRadius + 1) * (kMaxGridRadius + 1)> a{};
  for (int r = 0; r <= k; ++r) {
    for (int c = 0; c <= k; ++c) {
      if (zero_unknown && r == k && c == k) continue;
      a[static_cast<std::size_t>(r) * dim + c] = t.value(i - r + c, j - 2 * k + r + c);
    }
  }
  return det_inplace(std::span<FieldElement>(a.data(), dim * dim), dim, f);
}

}  // namespace detail

/// Largest grid radius used by default. Over F_2 the full k <= 7 rule holds
/// on every table we have checked; over larger primes only k = 2 does.
inline int default_grid_radius(const PrimeField& f) { return f.is_binary() ? kMaxGridRadius : 2; }

struct GridSolution {
  FieldElement value;
  int k = 0;
};

/// Solves det G_{i,j,k} = 0 for d_{i,j} at the smallest k in 2..6 whose
/// cofactor det G_{i,j-2,k-1} is nonzero; k = 7 additionally needs
/// d_{i,j-7} = 0. Reads rows < j only.
template <TableReader R>
std::optional<GridSolution> grid_solve(const R& t, int i, int j, int max_radius = kMaxGridRadius) {
  const PrimeField& f = t.field();
  const int top = std::min(max_radius, kMaxGridRadius);
  auto solve_at = [&](int k) -> std::optional<GridSolution> {
    const FieldElement cofactor = detail::grid_det(t, i, j - 2, k - 1, false);
    if (cofactor.is_zero()) return std::nullopt;
    const FieldElement rest = detail::grid_det(t, i, j, k, true);
    return GridSolution{f.neg(f.div(rest, cofactor)), k};
  };
  for (int k = 2; k <= std::min(top, kMaxGridRadius - 1); ++k) {
    if (j < 2 * k) return std::nullopt;
    if (auto s = solve_at(k)) return s;
  }
  if (top >= kMaxGridRadius && j >= 2 * kMaxGridRadius && t.value(i, j - kMaxGridRadius).is_zero()) {
    return solve_at(kMaxGridRadius);
  }
  return std::nullopt;
}

}  // namespace hankel
