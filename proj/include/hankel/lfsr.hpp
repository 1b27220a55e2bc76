#pragma once

// Linear subsequences.
//
// A generator c = (c_0, ..., c_{d-1}) with c_{d-1} = 1 holds at position l when
// sum_i c_i x_{l-d+i} = 0, i.e. x_{l-1} is fixed by the d-1 symbols before it.
// A window [s, t] is a run of positions where it holds, so the generated
// symbols are x_{s-1} .. x_{t-1}.
//
// Such a window shows up in the table as a zero square on row d with columns
// a = s-1 .. b = t-d.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hankel/detengine.hpp"
#include "hankel/errors.hpp"
#include "hankel/field.hpp"
#include "hankel/identities.hpp"
#include "hankel/scan.hpp"
#include "hankel/sequence.hpp"
#include "hankel/table.hpp"

namespace hankel {

/// splitmix64: state += 0x9E3779B97F4A7C15, then the usual xor-shift-multiply mix.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    for (;;) {
      const std::uint64_t v = next();
      if (v < limit) return v % bound;
    }
  }

  FieldElement element(const PrimeField& f) {
    return FieldElement{static_cast<std::uint32_t>(below(f.modulus()))};
  }

 private:
  std::uint64_t state_;
};

struct Generator {
  std::vector<FieldElement> c;

  Generator() = default;
  explicit Generator(std::vector<FieldElement> coeffs) : c(std::move(coeffs)) {
    if (c.empty()) throw BadLength("generator needs d >= 1");
    if (c.back().value != 1) throw Error("generator must have c_{d-1} = 1");
  }
  static Generator from_values(std::initializer_list<std::uint32_t> v) {
    std::vector<FieldElement> c;
    for (auto e : v) c.emplace_back(e);
    return Generator(std::move(c));
  }

  int d() const { return static_cast<int>(c.size()); }
  friend bool operator==(const Generator&, const Generator&) = default;
};

struct LinearInstance {
  Sequence x;
  Generator gen;
  int s = 0;
  int t = 0;
  std::uint64_t seed = 0;

  int first_generated() const { return s - 1; }
  int last_generated() const { return t - 1; }
};

/// True when gen holds at position l (d <= l <= n).
inline bool recurrence_holds(std::span<const FieldElement> x, const Generator& gen, int l,
                             const PrimeField& f) {
  const int d = gen.d();
  FieldElement acc = f.zero();
  for (int i = 0; i < d; ++i) acc = f.add(acc, f.mul(gen.c[i], x[l - d + i]));
  return acc.is_zero();
}

/// Appends `count` symbols to `prefix` (d symbols) by the recurrence.
inline std::vector<FieldElement> extend_linear(std::span<const FieldElement> prefix,
                                               const Generator& gen, int count,
                                               const PrimeField& f) {
  const int d = gen.d();
  if (static_cast<int>(prefix.size()) != d) {
    throw LengthMismatch("prefix has " + std::to_string(prefix.size()) + " symbols, generator needs " +
                         std::to_string(d));
  }
  if (count < 0) throw BadLength("negative count");
  std::vector<FieldElement> buf(prefix.begin(), prefix.end());
  buf.reserve(buf.size() + static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const std::size_t l = buf.size() + 1;  // new symbol is x_{l-1}
    FieldElement acc = f.zero();
    for (int i = 0; i + 1 < d; ++i) acc = f.add(acc, f.mul(gen.c[i], buf[l - d + i]));
    buf.push_back(f.neg(acc));
  }
  return {buf.begin() + d, buf.end()};
}

/// Builds prefix + count generated symbols + suffix; the window is
/// [prefix.size() + 1, prefix.size() + count].
inline LinearInstance make_planted(const PrimeField& f, std::span<const FieldElement> prefix,
                                   const Generator& gen, int count,
                                   std::span<const FieldElement> suffix, std::uint64_t seed = 0) {
  const int d = gen.d();
  if (static_cast<int>(prefix.size()) < d - 1) throw BadLength("prefix shorter than d - 1");
  if (count < 1) throw BadLength("window needs at least one generated symbol");
  std::vector<FieldElement> xs(prefix.begin(), prefix.end());
  std::vector<FieldElement> reg(d, f.zero());
  std::copy(xs.end() - (d - 1), xs.end(), reg.begin() + 1);
  const auto gen_part = extend_linear(reg, gen, count, f);
  xs.insert(xs.end(), gen_part.begin(), gen_part.end());
  xs.insert(xs.end(), suffix.begin(), suffix.end());
  const int s = static_cast<int>(prefix.size()) + 1;
  return {Sequence(f, std::move(xs)), gen, s, s + count - 1, seed};
}

namespace detail {

inline Generator random_generator(int d, const PrimeField& f, SplitMix64& rng) {
  std::vector<FieldElement> c(static_cast<std::size_t>(d));
  for (int i = 0; i + 1 < d; ++i) c[i] = rng.element(f);
  c[d - 1] = f.one();
  if (d >= 2) {
    while (c[0].is_zero()) c[0] = rng.element(f);
  }
  return Generator(std::move(c));
}

inline std::vector<FieldElement> random_symbols(int count, const PrimeField& f, SplitMix64& rng) {
  std::vector<FieldElement> v(static_cast<std::size_t>(std::max(count, 0)));
  for (auto& e : v) e = rng.element(f);
  return v;
}

/// The generated run has full order d-1: det X_{s-1,d-1} != 0.
inline bool full_order(const LinearInstance& inst) {
  const int d = inst.gen.d();
  if (d <= 1) return true;
  return !det_direct(inst.x, inst.first_generated(), d - 1).is_zero();
}

}  // namespace detail

/// Random symbols on [0, s-2], generated x_{s-1} .. x_{t-1}, random after.
/// The generator has c_0 != 0 and the register is redrawn until the run has
/// full order, so the window is recoverable from the table.
inline LinearInstance gen_planted_instance(int n, int d, int s, int t, const PrimeField& f,
                                           std::uint64_t seed) {
  if (d < 1 || s < d || t < s || t >= n + 1) {
    throw BadLength("planted window needs 1 <= d <= s <= t <= n");
  }
  SplitMix64 rng(seed);
  const Generator gen = detail::random_generator(d, f, rng);
  for (;;) {
    const auto prefix = detail::random_symbols(s - 1, f, rng);
    const auto suffix = detail::random_symbols(n - t, f, rng);
    LinearInstance inst = make_planted(f, prefix, gen, t - s + 1, suffix, seed);
    if (detail::full_order(inst)) return inst;
  }
}

/// Random on [0, 7n/16], generated on (7n/16, 9n/16], random after; d = n/16.
inline LinearInstance gen_hard_instance(int n, const PrimeField& f, std::uint64_t seed) {
  if (n <= 0 || n % 16 != 0) throw BadLength("hard instance needs 16 | n");
  const int d = n / 16;
  return gen_planted_instance(n, d, 7 * n / 16 + 2, 9 * n / 16 + 1, f, seed);
}

/// Random prefix of d = n/16 symbols, generated to the end.
inline LinearInstance gen_easy_instance(int n, const PrimeField& f, std::uint64_t seed) {
  if (n <= 0 || n % 16 != 0) throw BadLength("easy instance needs 16 | n");
  const int d = n / 16;
  LinearInstance inst = gen_planted_instance(n, d, d + 1, n, f, seed);
  inst.t = n - 1;
  return inst;
}

/// Default run length that counts as unusual: 2 ceil(log2 n) + 3. A random
/// table has about n^2/4 cells and a zero run of length L starts at a given
/// cell with probability about 2^-L, so chance runs reach about 2 log2 n.
inline int detection_threshold(int n) {
  int bits = 0;
  while ((std::int64_t{1} << bits) < n) ++bits;
  return 2 * bits + 3;
}

/// Topmost zero square with run length >= tau.
inline std::optional<ZeroSquare> detect_linear_run(const ScanReport& report, int tau) {
  std::optional<ZeroSquare> best;
  for (const ZeroSquare& sq : report.squares) {
    if (sq.run_length() < tau) continue;
    if (!best || sq.j0 < best->j0 || (sq.j0 == best->j0 && sq.a < best->a)) best = sq;
  }
  return best;
}

struct Window {
  int s = 0;
  int t = 0;
  friend bool operator==(const Window&, const Window&) = default;
};

/// Longest run of positions l in [d, n-1] where gen holds; ties go to the
/// smallest s.
inline std::optional<Window> find_linear_window(const Sequence& x, const Generator& gen) {
  const int d = gen.d();
  const int n = x.size();
  if (d > n) throw BadLength("generator longer than sequence");
  std::optional<Window> best;
  int run_start = -1;
  for (int l = d; l <= n; ++l) {
    const bool holds = l <= n - 1 && recurrence_holds(x.elements(), gen, l, x.field());
    if (holds && run_start < 0) run_start = l;
    if (!holds && run_start >= 0) {
      if (!best || l - 1 - run_start > best->t - best->s) best = Window{run_start, l - 1};
      run_start = -1;
    }
  }
  return best;
}

struct DetectionResult {
  ZeroSquare square;
  Generator gen;
  std::optional<Window> window;
  bool success = false;
};

namespace detail {

/// Solves for c_0..c_{d-2} from the d-1 positions l = i+2 .. i+d; the system
/// matrix is X_{i,d-1} with its rows reversed.
inline std::optional<Generator> solve_generator_at(const Sequence& x, int i, int d) {
  const PrimeField& f = x.field();
  const auto m = static_cast<std::size_t>(d - 1);
  DenseMatrix a(m);
  std::vector<FieldElement> rhs(m);
  for (std::size_t k = 0; k < m; ++k) {
    const int l = i + 2 + static_cast<int>(k);
    for (std::size_t c = 0; c < m; ++c) a(k, c) = x[l - d + static_cast<int>(c)];
    rhs[k] = f.neg(x[l - 1]);
  }
  auto sol = solve_linear(std::move(a), std::move(rhs), f);
  if (!sol) return std::nullopt;
  sol->push_back(f.one());
  return Generator(std::move(*sol));
}

}  // namespace detail

/// Generator of length d = sq.j0 behind a zero square, and the window it
/// spans in x.
inline DetectionResult recover_generator(const DetTable& table, const Sequence& x,
                                         const ZeroSquare& sq) {
  const int d = sq.j0;
  if (d < 1 || d > table.h() || !table.in_range(sq.a, d) || !table.in_range(sq.b, d)) {
    throw NoSquare("square outside the table");
  }
  if (table.n() != x.size()) throw ShapeMismatch("table and sequence lengths differ");

  std::optional<Generator> gen;
  if (d == 1) {
    gen = Generator({x.field().one()});
  } else {
    for (int i : {sq.a, sq.b}) {
      if (!table.known(i, d - 1) || table.value(i, d - 1).is_zero()) continue;
      gen = detail::solve_generator_at(x, i, d);
      if (gen) break;
    }
  }
  if (!gen) throw SingularSystem("no nonsingular system next to the square");

  DetectionResult out{sq, *gen, find_linear_window(x, *gen), false};
  out.success = out.window && out.window->s <= sq.a + 1 && out.window->t >= sq.b + d;
  return out;
}

/// Scans (stopping at the first run >= tau), then recovers the generator.
inline DetectionResult detect_and_recover(const Sequence& x, int tau, ScanOptions opts = {}) {
  opts.mode = ScanMode::accelerated;
  opts.early_stop_run_length = tau;
  const ScanReport report = scan(x, opts);
  const auto sq = detect_linear_run(report, tau);
  if (!sq) throw NoSquare("no zero run of length >= " + std::to_string(tau));
  return recover_generator(report.table, x, *sq);
}

}  // namespace hankel
