#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "hankel/sequence.hpp"
#include "oracle.hpp"

namespace support {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string read_text(const std::string& rel) { return read_file(std::string(HANKEL_SOURCE_DIR) + "/" + rel); }

inline const char* kSeq32 = "01010110100111010011101011101110";
inline const char* kSeq81 =
    "101100000010101111011010110101100100011110101100100010101111011001100110000000100";

inline hankel::Sequence to_sequence(const std::vector<std::int64_t>& v, std::uint64_t q) {
  std::vector<std::uint32_t> u(v.begin(), v.end());
  return hankel::Sequence::from_values(hankel::PrimeField(q), u);
}

}  // namespace support

#include "hankel/table.hpp"

namespace support {

/// DetTable holding every oracle value, tagged as initial.
inline hankel::DetTable full_table(const std::vector<std::int64_t>& v, std::uint64_t q) {
  const auto d = oracle::table(v, static_cast<std::int64_t>(q));
  const int n = static_cast<int>(v.size());
  hankel::DetTable t(n, hankel::PrimeField(q));
  for (int j = 0; j <= t.h(); ++j) {
    for (int i = t.cols(j).lo; i <= t.cols(j).hi; ++i) {
      t.set(i, j, hankel::FieldElement{static_cast<std::uint32_t>(d[j][i])}, hankel::Branch::initial);
    }
  }
  return t;
}

/// Random sequence with linear stretches: after the first 12 symbols each
/// block of 16 either stays random or follows a short random recurrence.
inline std::vector<std::int64_t> structured_sequence(int n, std::int64_t q, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::int64_t> x(static_cast<std::size_t>(n));
  for (auto& v : x) v = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q));
  int pos = 12;
  while (pos < n) {
    const int len = 8 + static_cast<int>(rng() % 24);
    const int d = 1 + static_cast<int>(rng() % 4);
    if (rng() % 2) {
      std::vector<std::int64_t> c(static_cast<std::size_t>(d));
      for (auto& v : c) v = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(q));
      for (int k = pos; k < std::min(n, pos + len); ++k) {
        std::int64_t s = 0;
        for (int m = 0; m < d; ++m) s += c[m] * x[k - 1 - m];
        x[k] = oracle::mod(s, q);
      }
    }
    pos += len;
  }
  return x;
}

}  // namespace support
