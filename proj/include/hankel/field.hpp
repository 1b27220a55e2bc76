#pragma once

// Prime field arithmetic F_q.
//
// Elements are plain residues in [0, q). The modulus is restricted to
// q < 2^31 so that a product of two residues fits in 64 bits.

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "hankel/errors.hpp"

namespace hankel {

struct FieldElement {
  std::uint32_t value = 0;

  constexpr FieldElement() = default;
  constexpr explicit FieldElement(std::uint32_t v) : value(v) {}

  constexpr bool is_zero() const { return value == 0; }
  friend constexpr bool operator==(FieldElement, FieldElement) = default;
};

/// Deterministic primality test by trial division (q < 2^31).
constexpr bool is_prime(std::uint64_t q) {
  if (q < 2) return false;
  if (q < 4) return true;
  if (q % 2 == 0 || q % 3 == 0) return false;
  for (std::uint64_t f = 5; f * f <= q; f += 6) {
    if (q % f == 0 || q % (f + 2) == 0) return false;
  }
  return true;
}

/// Arithmetic context for F_q. Immutable after construction.
class PrimeField {
 public:
  static constexpr std::uint64_t kMaxModulus = (std::uint64_t{1} << 31) - 1;
  // Moduli up to this bound get a precomputed inverse table.
  static constexpr std::uint32_t kInverseTableLimit = 1u << 16;

  explicit PrimeField(std::uint64_t q) : q_(static_cast<std::uint32_t>(q)) {
    if (q < 2 || q > kMaxModulus || !is_prime(q)) {
      throw NotPrime("modulus " + std::to_string(q) + " is not a supported prime");
    }
    if (q_ <= kInverseTableLimit) {
      inverse_.resize(q_);
      for (std::uint32_t a = 1; a < q_; ++a) inverse_[a] = euclid_inverse(a);
    }
  }

  std::uint32_t modulus() const { return q_; }
  bool is_binary() const { return q_ == 2; }

  FieldElement zero() const { return FieldElement{0}; }
  FieldElement one() const { return FieldElement{1}; }

  /// Reduces an arbitrary signed integer into the field.
  FieldElement element(std::int64_t v) const {
    std::int64_t r = v % static_cast<std::int64_t>(q_);
    if (r < 0) r += q_;
    return FieldElement{static_cast<std::uint32_t>(r)};
  }

  bool contains(std::uint64_t v) const { return v < q_; }

  FieldElement add(FieldElement a, FieldElement b) const {
    std::uint32_t s = a.value + b.value;
    return FieldElement{s >= q_ ? s - q_ : s};
  }
  FieldElement sub(FieldElement a, FieldElement b) const {
    return FieldElement{a.value >= b.value ? a.value - b.value : a.value + q_ - b.value};
  }
  FieldElement neg(FieldElement a) const {
    return FieldElement{a.value == 0 ? 0 : q_ - a.value};
  }
  FieldElement mul(FieldElement a, FieldElement b) const {
    return FieldElement{static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(a.value) * b.value % q_)};
  }

  FieldElement inv(FieldElement a) const {
    if (a.value == 0) throw DivisionByZero();
    if (!inverse_.empty()) return FieldElement{inverse_[a.value]};
    return FieldElement{euclid_inverse(a.value)};
  }

  FieldElement div(FieldElement a, FieldElement b) const { return mul(a, inv(b)); }

  /// a^e; negative exponents use the inverse of a.
  FieldElement pow(FieldElement a, std::int64_t e) const {
    if (e < 0) {
      a = inv(a);
      // -e overflows only for INT64_MIN; q-1 divides the order anyway.
      e = e == std::numeric_limits<std::int64_t>::min()
              ? -(e % static_cast<std::int64_t>(q_ - 1))
              : -e;
    }
    FieldElement result = one();
    while (e > 0) {
      if (e & 1) result = mul(result, a);
      a = mul(a, a);
      e >>= 1;
    }
    return result;
  }

  friend bool operator==(const PrimeField& a, const PrimeField& b) { return a.q_ == b.q_; }

 private:
  std::uint32_t euclid_inverse(std::uint32_t a) const {
    std::int64_t t = 0, new_t = 1;
    std::int64_t r = q_, new_r = a;
    while (new_r != 0) {
      std::int64_t quot = r / new_r;
      std::int64_t tmp = t - quot * new_t;
      t = new_t;
      new_t = tmp;
      tmp = r - quot * new_r;
      r = new_r;
      new_r = tmp;
    }
    if (t < 0) t += q_;
    return static_cast<std::uint32_t>(t);
  }

  std::uint32_t q_;
  std::vector<std::uint32_t> inverse_;
};

inline PrimeField make_field(std::uint64_t q) { return PrimeField(q); }

}  // namespace hankel
