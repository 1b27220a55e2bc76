#pragma once

// The triangular table of all Hankel determinants d_{i,j}.
//
// Row j (0 <= j <= h = ceil(n/2)) holds columns valid_cols(j). Row 0 is all
// ones, row 1 is the sequence. Cell (i, j) is stored at offset i - lo(j) of
// row j; all rows share one contiguous buffer.

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "hankel/errors.hpp"
#include "hankel/field.hpp"
#include "hankel/sequence.hpp"

namespace hankel {

/// Largest radius of the ball grid G_{i,j,k} the solver may use.
inline constexpr int kMaxGridRadius = 7;

/// Inclusive column range of a table row.
struct ColumnRange {
  int lo = 0;
  int hi = -1;

  int size() const { return hi - lo + 1; }
  bool contains(int i) const { return lo <= i && i <= hi; }
  friend bool operator==(ColumnRange, ColumnRange) = default;
};

constexpr int table_height(int n) { return (n + 1) / 2; }

inline ColumnRange valid_cols(int j, int n) {
  if (n < 1 || j < 0 || j > table_height(n)) {
    throw IndexOutOfRange("row " + std::to_string(j) + " outside table of length " +
                          std::to_string(n));
  }
  if (j == 0) return {0, n - 1};
  return {j - 1, n - j};
}

/// Number of cells in rows 2..h, i.e. the cells a scan has to produce.
constexpr std::uint64_t entry_count(int n) {
  std::uint64_t total = 0;
  for (int j = 2; j <= table_height(n); ++j) total += static_cast<std::uint64_t>(n - 2 * j + 2);
  return total;
}

/// Which rule produced a cell.
enum class Branch : std::uint8_t { unset = 0, initial, nsew, square_fill, direct, cross, grid };

inline const char* branch_name(Branch b) {
  switch (b) {
    case Branch::unset: return "unset";
    case Branch::initial: return "initial";
    case Branch::nsew: return "nsew";
    case Branch::square_fill: return "square_fill";
    case Branch::direct: return "direct";
    case Branch::cross: return "cross";
    case Branch::grid: return "grid";
  }
  return "?";
}

enum class CellStatus : std::uint8_t { unset, known };

struct Cell {
  CellStatus status = CellStatus::unset;
  FieldElement value;
};

struct BranchTimings {
  double nsew_ms = 0;
  double square_fill_ms = 0;
  double direct_ms = 0;
  double grid_ms = 0;
  double cross_ms = 0;

  BranchTimings& operator+=(const BranchTimings& o) {
    nsew_ms += o.nsew_ms;
    square_fill_ms += o.square_fill_ms;
    direct_ms += o.direct_ms;
    grid_ms += o.grid_ms;
    cross_ms += o.cross_ms;
    return *this;
  }
};

/// How many cells each rule produced.
struct BranchStats {
  std::uint64_t nsew = 0;
  std::uint64_t square_fill = 0;
  std::uint64_t direct = 0;
  std::array<std::uint64_t, kMaxGridRadius + 1> grid{};  // index = radius k (2..7)
  std::map<int, std::uint64_t> cross;                    // key = depth j - j0
  BranchTimings timing_ms;

  std::uint64_t grid_total() const {
    std::uint64_t s = 0;
    for (auto c : grid) s += c;
    return s;
  }
  std::uint64_t cross_total() const {
    std::uint64_t s = 0;
    for (const auto& [depth, c] : cross) s += c;
    return s;
  }
  std::uint64_t total() const { return nsew + square_fill + direct + grid_total() + cross_total(); }

  BranchStats& operator+=(const BranchStats& o) {
    nsew += o.nsew;
    square_fill += o.square_fill;
    direct += o.direct;
    for (std::size_t k = 0; k < grid.size(); ++k) grid[k] += o.grid[k];
    for (const auto& [depth, c] : o.cross) cross[depth] += c;
    timing_ms += o.timing_ms;
    return *this;
  }

  /// Equality of the counters only; timings differ run to run.
  bool same_counts(const BranchStats& o) const {
    return nsew == o.nsew && square_fill == o.square_fill && direct == o.direct &&
           grid == o.grid && cross == o.cross;
  }
};

class DetTable {
 public:
  /// Empty table (every cell Unset). Tags cost one byte per cell.
  DetTable(int n, PrimeField field, bool with_tags = true)
      : n_(n), h_(table_height(n)), field_(std::move(field)) {
    if (n < 2) throw BadLength("table needs n >= 2");
    offset_.resize(static_cast<std::size_t>(h_) + 2);
    word_offset_.resize(static_cast<std::size_t>(h_) + 2);
    std::size_t cells = 0, words = 0;
    for (int j = 0; j <= h_; ++j) {
      offset_[j] = cells;
      word_offset_[j] = words;
      const auto len = static_cast<std::size_t>(valid_cols(j, n_).size());
      cells += len;
      words += (len + 63) / 64;
    }
    offset_[h_ + 1] = cells;
    word_offset_[h_ + 1] = words;
    values_.assign(cells, FieldElement{});
    known_.assign(words, 0);
    if (with_tags) tags_.assign(cells, 0);
  }

  int n() const { return n_; }
  int h() const { return h_; }
  const PrimeField& field() const { return field_; }
  bool has_tags() const { return !tags_.empty(); }

  ColumnRange cols(int j) const { return valid_cols(j, n_); }
  bool in_range(int i, int j) const {
    if (j < 0 || j > h_) return false;
    const int lo = j == 0 ? 0 : j - 1;
    const int hi = j == 0 ? n_ - 1 : n_ - j;
    return lo <= i && i <= hi;
  }

  /// Unchecked read of a cell's value; callers guarantee (i, j) is in range.
  FieldElement value(int i, int j) const { return values_[index(i, j)]; }

  bool known(int i, int j) const {
    const std::size_t k = static_cast<std::size_t>(i - row_lo(j));
    return (known_[word_offset_[j] + (k >> 6)] >> (k & 63)) & 1;
  }

  Cell get(int i, int j) const {
    check(i, j);
    if (!known(i, j)) return {CellStatus::unset, FieldElement{}};
    return {CellStatus::known, value(i, j)};
  }

  /// Unset -> Known. Rewriting a Known cell with its own value is a no-op;
  /// with a different value it throws DoubleWrite.
  ///
  /// Concurrent calls are safe only for cells of the same row whose offsets
  /// lie in distinct 64-cell blocks.
  void set(int i, int j, FieldElement v, Branch branch, int radius = 0) {
    check(i, j);
    if (!field_.contains(v.value)) throw Error("value not reduced mod q");
    if (known(i, j)) {
      if (value(i, j) == v) return;
      throw DoubleWrite("cell (" + std::to_string(i) + ", " + std::to_string(j) + ") holds " +
                        std::to_string(value(i, j).value) + ", refusing " +
                        std::to_string(v.value));
    }
    const std::size_t idx = index(i, j);
    values_[idx] = v;
    if (!tags_.empty()) tags_[idx] = encode_tag(branch, radius);
    const std::size_t k = static_cast<std::size_t>(i - row_lo(j));
    known_[word_offset_[j] + (k >> 6)] |= std::uint64_t{1} << (k & 63);
  }

  Branch branch(int i, int j) const {
    check(i, j);
    if (tags_.empty()) return known(i, j) ? Branch::initial : Branch::unset;
    return static_cast<Branch>(tags_[index(i, j)] & 0x0F);
  }

  /// Grid radius recorded for cells produced by the ball-grid solver, else 0.
  int grid_radius(int i, int j) const {
    check(i, j);
    if (tags_.empty()) return 0;
    return tags_[index(i, j)] >> 4;
  }

  std::span<const FieldElement> row(int j) const {
    if (j < 0 || j > h_) throw IndexOutOfRange("row " + std::to_string(j));
    return std::span<const FieldElement>(values_).subspan(offset_[j], offset_[j + 1] - offset_[j]);
  }

  bool row_complete(int j) const {
    const int len = cols(j).size();
    for (int k = 0; k < len; ++k) {
      if (!known(row_lo(j) + k, j)) return false;
    }
    return true;
  }

  /// Number of Known cells in rows [first, last].
  std::uint64_t known_count(int first, int last) const {
    std::uint64_t total = 0;
    for (int j = std::max(first, 0); j <= std::min(last, h_); ++j) {
      for (std::size_t w = word_offset_[j]; w < word_offset_[j + 1]; ++w) {
        total += static_cast<std::uint64_t>(__builtin_popcountll(known_[w]));
      }
    }
    return total;
  }

  /// Values and status equal; tags are ignored.
  friend bool operator==(const DetTable& a, const DetTable& b) {
    return a.n_ == b.n_ && a.field_ == b.field_ && a.values_ == b.values_ && a.known_ == b.known_;
  }

 private:
  static std::uint8_t encode_tag(Branch b, int radius) {
    return static_cast<std::uint8_t>(static_cast<int>(b) | (radius << 4));
  }
  int row_lo(int j) const { return j == 0 ? 0 : j - 1; }
  std::size_t index(int i, int j) const {
    return offset_[j] + static_cast<std::size_t>(i - row_lo(j));
  }
  void check(int i, int j) const {
    if (!in_range(i, j)) {
      throw IndexOutOfRange("cell (" + std::to_string(i) + ", " + std::to_string(j) +
                            ") outside table of length " + std::to_string(n_));
    }
  }

  int n_;
  int h_;
  PrimeField field_;
  std::vector<std::size_t> offset_;
  std::vector<std::size_t> word_offset_;
  std::vector<FieldElement> values_;
  std::vector<std::uint64_t> known_;
  std::vector<std::uint8_t> tags_;
};

/// Table with rows 0 and 1 Known: d_{i,0} = 1 and d_{i,1} = x_i.
inline DetTable init_table(const Sequence& x, bool with_tags = true) {
  DetTable t(x.size(), x.field(), with_tags);
  for (int i = 0; i < x.size(); ++i) {
    t.set(i, 0, x.field().one(), Branch::initial);
    t.set(i, 1, x[i], Branch::initial);
  }
  return t;
}

}  // namespace hankel
