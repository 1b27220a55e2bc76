#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hankel/errors.hpp"
#include "hankel/field.hpp"
#include "hankel/gf2.hpp"

namespace hankel {

/// Input vector x = (x_0, ..., x_{n-1}) over F_q, n >= 2.
class Sequence {
 public:
  Sequence(PrimeField field, std::vector<FieldElement> elems)
      : field_(std::move(field)), elems_(std::move(elems)) {
    if (elems_.size() < 2) throw BadLength("sequence needs at least two symbols");
    if (elems_.size() > static_cast<std::size_t>(std::numeric_limits<int>::max() / 2)) {
      throw BadLength("sequence too long");
    }
    for (FieldElement e : elems_) {
      if (!field_.contains(e.value)) {
        throw Error("symbol " + std::to_string(e.value) + " is not reduced mod " +
                    std::to_string(field_.modulus()));
      }
    }
    if (field_.is_binary()) {
      bits_.assign(gf2::words_for(elems_.size()), 0);
      for (std::size_t k = 0; k < elems_.size(); ++k) {
        if (elems_[k].value) bits_[k >> 6] |= std::uint64_t{1} << (k & 63);
      }
    }
  }

  static Sequence from_values(PrimeField field, std::span<const std::uint32_t> values) {
    std::vector<FieldElement> elems;
    elems.reserve(values.size());
    for (std::uint32_t v : values) elems.emplace_back(v);
    return Sequence(std::move(field), std::move(elems));
  }

  /// Parses single-digit symbols ("0101..."), q <= 10.
  static Sequence from_digits(PrimeField field, std::string_view digits) {
    std::vector<FieldElement> elems;
    elems.reserve(digits.size());
    for (char ch : digits) {
      if (ch < '0' || ch > '9') throw ParseError(std::string("not a digit: '") + ch + "'");
      elems.emplace_back(static_cast<std::uint32_t>(ch - '0'));
    }
    return Sequence(std::move(field), std::move(elems));
  }

  int size() const { return static_cast<int>(elems_.size()); }
  FieldElement operator[](int i) const { return elems_[static_cast<std::size_t>(i)]; }
  const PrimeField& field() const { return field_; }
  std::span<const FieldElement> elements() const { return elems_; }

  /// Packed bits (q = 2 only; empty otherwise).
  std::span<const std::uint64_t> bits() const { return bits_; }

  std::string to_digits() const {
    if (field_.modulus() > 10) throw Unrenderable("digit rendering needs q <= 10");
    std::string s;
    s.reserve(elems_.size());
    for (FieldElement e : elems_) s.push_back(static_cast<char>('0' + e.value));
    return s;
  }

  friend bool operator==(const Sequence& a, const Sequence& b) {
    return a.field_ == b.field_ && a.elems_ == b.elems_;
  }

 private:
  PrimeField field_;
  std::vector<FieldElement> elems_;
  std::vector<std::uint64_t> bits_;
};

}  // namespace hankel
