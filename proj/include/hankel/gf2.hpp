#pragma once

// Bit-packed GF(2) kernels. Bit k of a packed string lives in word k/64 at
// position k%64.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace hankel::gf2 {

constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

/// Copies `len` bits starting at bit `pos` of `src` into `out`, which must
/// hold words_for(len) words. Unused high bits of the last word are cleared.
inline void extract_bits(std::span<const std::uint64_t> src, std::size_t pos, std::size_t len,
                         std::uint64_t* out) {
  const std::size_t nwords = words_for(len);
  const std::size_t shift = pos & 63;
  std::size_t w = pos >> 6;
  if (shift == 0) {
    for (std::size_t k = 0; k < nwords; ++k, ++w) out[k] = w < src.size() ? src[w] : 0;
  } else {
    for (std::size_t k = 0; k < nwords; ++k, ++w) {
      std::uint64_t lo = w < src.size() ? src[w] >> shift : 0;
      std::uint64_t hi = w + 1 < src.size() ? src[w + 1] << (64 - shift) : 0;
      out[k] = lo | hi;
    }
  }
  if (const std::size_t tail = len & 63; tail != 0) {
    out[nwords - 1] &= (std::uint64_t{1} << tail) - 1;
  }
}

/// Determinant of a dim x dim matrix with single-word rows (dim <= 64).
/// Destroys `rows`.
inline bool det_small(std::uint64_t* rows, std::size_t dim) {
  for (std::size_t c = 0; c < dim; ++c) {
    const std::uint64_t bit = std::uint64_t{1} << c;
    std::size_t p = c;
    while (p < dim && !(rows[p] & bit)) ++p;
    if (p == dim) return false;
    std::swap(rows[c], rows[p]);
    const std::uint64_t pivot = rows[c];
    for (std::size_t r = c + 1; r < dim; ++r) {
      if (rows[r] & bit) rows[r] ^= pivot;
    }
  }
  return true;
}

/// Determinant of a dim x dim matrix stored as dim rows of `stride` words.
/// Destroys `rows`.
inline bool det_inplace(std::uint64_t* rows, std::size_t dim, std::size_t stride) {
  if (stride == 1) return det_small(rows, dim);
  thread_local std::vector<std::uint64_t*> ptr;
  ptr.resize(dim);
  for (std::size_t r = 0; r < dim; ++r) ptr[r] = rows + r * stride;

  for (std::size_t c = 0; c < dim; ++c) {
    const std::size_t w = c >> 6;
    const std::uint64_t bit = std::uint64_t{1} << (c & 63);
    std::size_t p = c;
    while (p < dim && !(ptr[p][w] & bit)) ++p;
    if (p == dim) return false;
    std::swap(ptr[c], ptr[p]);
    const std::uint64_t* __restrict pivot = ptr[c];
    for (std::size_t r = c + 1; r < dim; ++r) {
      std::uint64_t* __restrict row = ptr[r];
      if (row[w] & bit) {
        for (std::size_t k = w; k < stride; ++k) row[k] ^= pivot[k];
      }
    }
  }
  return true;
}

/// Whether the m x m Hankel matrix [s_{start+r+c}] is nonsingular, where s is
/// the packed string `src`. That holds exactly when s_start .. s_{start+2m-2}
/// has linear complexity m, which Berlekamp-Massey decides in O(m^2 / 64).
inline bool hankel_nonsingular(std::span<const std::uint64_t> src, std::size_t start,
                               std::size_t m) {
  if (m == 0) return true;
  const std::size_t len = 2 * m - 1;
  const std::size_t words = words_for(len + 1);
  thread_local std::vector<std::uint64_t> win, rev, c, b, tmp;
  win.assign(words, 0);
  rev.assign(words + 1, 0);
  extract_bits(src, start, len, win.data());
  // rev bit t = s_{len-1-t}: the reversed window lets each discrepancy be one
  // AND + popcount against the connection polynomial.
  for (std::size_t t = 0; t < len; ++t) {
    const std::size_t k = len - 1 - t;
    if ((win[k >> 6] >> (k & 63)) & 1) rev[t >> 6] |= std::uint64_t{1} << (t & 63);
  }
  c.assign(words, 0);
  b.assign(words, 0);
  c[0] = b[0] = 1;
  std::size_t lc = 0, shift = 1;
  for (std::size_t k = 0; k < len; ++k) {
    // discrepancy = sum_{i=0}^{lc} c_i s_{k-i} = sum_i c_i rev[len-1-k+i]
    const std::size_t off = len - 1 - k;
    const std::size_t ow = off >> 6, os = off & 63;
    const std::size_t cw = words_for(lc + 1);
    std::uint64_t acc = 0;
    for (std::size_t w = 0; w < cw; ++w) {
      std::uint64_t r = rev[ow + w] >> os;
      if (os != 0 && ow + w + 1 < rev.size()) r |= rev[ow + w + 1] << (64 - os);
      acc ^= c[w] & r;
    }
    if ((std::popcount(acc) & 1) == 0) {
      ++shift;
      continue;
    }
    const bool grow = 2 * lc <= k;
    if (grow) tmp = c;
    // c ^= b << shift
    const std::size_t sw = shift >> 6, sb = shift & 63;
    for (std::size_t w = words; w-- > sw;) {
      std::uint64_t v = b[w - sw] << sb;
      if (sb != 0 && w > sw) v |= b[w - sw - 1] >> (64 - sb);
      c[w] ^= v;
    }
    if (grow) {
      lc = k + 1 - lc;
      if (lc > m) return false;
      b.swap(tmp);
      shift = 1;
    } else {
      ++shift;
    }
  }
  return lc == m;
}

}  // namespace hankel::gf2
