#pragma once

// Text formats: sequence files, table rendering and the JSON stats document.
//
// Sequence file:
//   #q=2 n=32                        (optional header)
//   01010110100111010011101011101110 (digits when q <= 10)
// For q > 10 the body is whitespace-separated integers.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hankel/errors.hpp"
#include "hankel/field.hpp"
#include "hankel/lfsr.hpp"
#include "hankel/scan.hpp"
#include "hankel/sequence.hpp"
#include "hankel/table.hpp"

namespace hankel {

struct SequenceHeader {
  std::uint64_t q = 2;
  std::optional<int> n;
};

namespace detail {

inline SequenceHeader parse_header(std::string_view line) {
  SequenceHeader h;
  std::istringstream in{std::string(line.substr(1))};
  std::string tok;
  bool saw_q = false;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("bad header token '" + tok + "'");
    const std::string key = tok.substr(0, eq);
    const std::string val = tok.substr(eq + 1);
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(val, &used);
    } catch (const std::exception&) {
      throw ParseError("bad header value '" + tok + "'");
    }
    if (used != val.size() || v <= 0) throw ParseError("bad header value '" + tok + "'");
    if (key == "q") {
      h.q = static_cast<std::uint64_t>(v);
      saw_q = true;
    } else if (key == "n") {
      h.n = static_cast<int>(v);
    } else {
      throw ParseError("unknown header key '" + key + "'");
    }
  }
  if (!saw_q) throw ParseError("header lacks q=");
  return h;
}

}  // namespace detail

/// Parses a sequence file. Without a header the field is `default_q`.
inline Sequence parse_sequence(std::string_view text, std::uint64_t default_q = 2) {
  SequenceHeader h{default_q, std::nullopt};
  std::string_view body = text;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '#') {
    const auto eol = text.find('\n', first);
    h = detail::parse_header(text.substr(first, eol == std::string_view::npos ? std::string_view::npos
                                                                               : eol - first));
    body = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
  }
  PrimeField f = [&] {
    try {
      return PrimeField(h.q);
    } catch (const NotPrime& e) {
      throw ParseError(e.what());
    }
  }();

  std::vector<FieldElement> elems;
  if (h.q <= 10) {
    for (char ch : body) {
      if (std::isspace(static_cast<unsigned char>(ch))) continue;
      if (ch < '0' || ch > '9') throw ParseError(std::string("not a digit: '") + ch + "'");
      elems.emplace_back(static_cast<std::uint32_t>(ch - '0'));
    }
  } else {
    std::istringstream in{std::string(body)};
    std::string tok;
    while (in >> tok) {
      std::size_t used = 0;
      long long v = -1;
      try {
        v = std::stoll(tok, &used);
      } catch (const std::exception&) {
      }
      if (used != tok.size() || v < 0) throw ParseError("not a symbol: '" + tok + "'");
      elems.emplace_back(static_cast<std::uint32_t>(std::min<long long>(v, 0xFFFFFFFFLL)));
    }
  }
  for (FieldElement e : elems) {
    if (!f.contains(e.value)) {
      throw ParseError("symbol " + std::to_string(e.value) + " not below q = " + std::to_string(h.q));
    }
  }
  if (h.n && *h.n != static_cast<int>(elems.size())) {
    throw ParseError("header says n=" + std::to_string(*h.n) + " but body has " +
                     std::to_string(elems.size()) + " symbols");
  }
  if (elems.size() < 2) throw ParseError("sequence needs at least two symbols");
  return Sequence(std::move(f), std::move(elems));
}

inline std::string format_sequence(const Sequence& x) {
  std::string out = "#q=" + std::to_string(x.field().modulus()) + " n=" + std::to_string(x.size()) + "\n";
  if (x.field().modulus() <= 10) {
    out += x.to_digits();
  } else {
    for (int i = 0; i < x.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(x[i].value);
    }
  }
  out += '\n';
  return out;
}

struct RenderOptions {
  bool colour = false;  // ANSI: zero-square cells blue
};

/// One line per row: right-aligned label, " :", j-1 spaces, the row's symbols.
inline std::string render_table(const DetTable& t, const RenderOptions& opts = {}) {
  if (t.field().modulus() > 10) throw Unrenderable("rendering needs single-digit symbols (q <= 10)");
  const int width = std::max<int>(2, static_cast<int>(std::to_string(t.h()).size()));
  std::string out;
  for (int j = 0; j <= t.h(); ++j) {
    std::string label = std::to_string(j);
    out.append(static_cast<std::size_t>(width) - label.size(), ' ');
    out += label;
    out += " :";
    out.append(static_cast<std::size_t>(j >= 1 ? j - 1 : 0), ' ');
    const ColumnRange cols = t.cols(j);
    bool in_colour = false;
    for (int i = cols.lo; i <= cols.hi; ++i) {
      const char ch = t.known(i, j) ? static_cast<char>('0' + t.value(i, j).value) : '.';
      if (opts.colour) {
        const bool want = t.has_tags() && t.branch(i, j) == Branch::square_fill;
        if (want != in_colour) {
          out += want ? "\x1b[34m" : "\x1b[0m";
          in_colour = want;
        }
      }
      out += ch;
    }
    if (in_colour) out += "\x1b[0m";
    out += '\n';
  }
  return out;
}

inline const char* mode_name(ScanMode m) { return m == ScanMode::trivial ? "trivial" : "accelerated"; }
inline const char* conjecture_name(ConjectureMode m) {
  switch (m) {
    case ConjectureMode::on: return "on";
    case ConjectureMode::off: return "off";
    case ConjectureMode::verify: return "verify";
  }
  return "?";
}
inline const char* order_name(BranchOrder o) { return o == BranchOrder::paper ? "paper" : "safe"; }

inline nlohmann::json counters_json(const BranchStats& s) {
  nlohmann::json grid = nlohmann::json::object();
  for (std::size_t k = 2; k < s.grid.size(); ++k) grid[std::to_string(k)] = s.grid[k];
  nlohmann::json cross = nlohmann::json::object();
  for (const auto& [depth, c] : s.cross) cross[std::to_string(depth)] = c;
  return {{"nsew", s.nsew},   {"square_fill", s.square_fill}, {"direct", s.direct},
          {"grid", grid},     {"cross", cross},               {"total", s.total()}};
}

inline nlohmann::json timings_json(const BranchTimings& t) {
  return {{"nsew", t.nsew_ms},   {"square_fill", t.square_fill_ms}, {"direct", t.direct_ms},
          {"grid", t.grid_ms},   {"cross", t.cross_ms}};
}

/// Rounds milliseconds to microsecond precision.
inline double round_ms(double ms) { return std::round(ms * 1000.0) / 1000.0; }

inline nlohmann::json stats_document(const ScanReport& r) {
  nlohmann::json squares = nlohmann::json::array();
  for (const ZeroSquare& s : r.squares) squares.push_back({{"a", s.a}, {"b", s.b}, {"j0", s.j0}, {"j1", s.j1()}});
  nlohmann::json mism = nlohmann::json::array();
  for (const ConjectureMismatch& m : r.mismatches) {
    mism.push_back({{"i", m.i}, {"j", m.j}, {"k", m.k}, {"solved", m.solved.value}, {"oracle", m.oracle.value}});
  }
  nlohmann::json timings = timings_json(r.stats.timing_ms);
  for (auto& v : timings) v = round_ms(v.get<double>());
  return {
      {"n", r.table.n()},
      {"q", r.table.field().modulus()},
      {"mode", mode_name(r.options.mode)},
      {"workers", r.options.workers},
      {"conjecture", conjecture_name(r.options.conjecture)},
      {"order", order_name(r.options.order)},
      {"entries", entry_count(r.table.n())},
      {"elapsed_ms", round_ms(r.elapsed_ms)},
      {"early_stopped", r.early_stopped},
      {"last_row", r.last_row},
      {"counters", counters_json(r.stats)},
      {"timings_ms", timings},
      {"squares", squares},
      {"conjecture_mismatches", mism},
  };
}

inline nlohmann::json instance_json(const LinearInstance& inst, std::string_view kind) {
  nlohmann::json c = nlohmann::json::array();
  for (FieldElement e : inst.gen.c) c.push_back(e.value);
  return {{"kind", kind},
          {"n", inst.x.size()},
          {"q", inst.x.field().modulus()},
          {"d", inst.gen.d()},
          {"s", inst.s},
          {"t", inst.t},
          {"first_generated", inst.first_generated()},
          {"last_generated", inst.last_generated()},
          {"seed", inst.seed},
          {"generator", c}};
}

/// Answer sidecar for a generated instance: the stats document shape with an
/// "instance" object and no scan data yet.
inline nlohmann::json answer_document(const LinearInstance& inst, std::string_view kind) {
  return {{"n", inst.x.size()},
          {"q", inst.x.field().modulus()},
          {"mode", nullptr},
          {"workers", nullptr},
          {"elapsed_ms", nullptr},
          {"counters", nullptr},
          {"squares", nlohmann::json::array()},
          {"conjecture_mismatches", nlohmann::json::array()},
          {"instance", instance_json(inst, kind)}};
}

inline Generator generator_from_json(const nlohmann::json& j) {
  std::vector<FieldElement> c;
  for (const auto& v : j.at("generator")) c.emplace_back(v.get<std::uint32_t>());
  return Generator(std::move(c));
}

}  // namespace hankel
