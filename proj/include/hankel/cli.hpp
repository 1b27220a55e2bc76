#pragma once

// Command layer for the `hankel` tool: gen, scan, verify, bench, render.
// Exit codes: 0 success, 1 mismatch or failed verification, 2 usage or input
// error.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hankel/errors.hpp"
#include "hankel/field.hpp"
#include "hankel/io.hpp"
#include "hankel/lfsr.hpp"
#include "hankel/scan.hpp"

#if defined(__unix__) || defined(__APPLE__)
#include <unistd.h>
#endif

namespace hankel::cli {

enum ExitCode : int { kOk = 0, kMismatch = 1, kUsage = 2 };

struct Hooks {
  // Called on the accelerated table before verify compares it to the oracle.
  std::function<void(DetTable&)> tamper;
  // Overrides terminal detection for --colour.
  std::optional<bool> stdout_is_tty;
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ParseError("write to '" + path + "' failed");
}

inline std::vector<FieldElement> parse_symbols(const std::string& text, const PrimeField& f) {
  std::vector<FieldElement> out;
  if (text.find(',') != std::string::npos || f.modulus() > 10) {
    std::string tok;
    std::istringstream in(text);
    while (std::getline(in, tok, ',')) {
      std::size_t used = 0;
      const long long v = std::stoll(tok, &used);
      if (v < 0 || !f.contains(static_cast<std::uint64_t>(v))) throw ParseError("symbol out of range: " + tok);
      out.emplace_back(static_cast<std::uint32_t>(v));
    }
  } else {
    for (char ch : text) {
      if (ch < '0' || ch > '9' || !f.contains(static_cast<std::uint64_t>(ch - '0'))) {
        throw ParseError(std::string("bad symbol '") + ch + "'");
      }
      out.emplace_back(static_cast<std::uint32_t>(ch - '0'));
    }
  }
  return out;
}

inline ScanMode parse_mode(const std::string& s) {
  return s == "trivial" ? ScanMode::trivial : ScanMode::accelerated;
}
inline ConjectureMode parse_conjecture(const std::string& s) {
  if (s == "off") return ConjectureMode::off;
  if (s == "verify") return ConjectureMode::verify;
  return ConjectureMode::on;
}
inline BranchOrder parse_order(const std::string& s) {
  return s == "safe" ? BranchOrder::safe : BranchOrder::paper;
}

inline bool is_tty(const Hooks& hooks) {
  if (hooks.stdout_is_tty) return *hooks.stdout_is_tty;
#if defined(__unix__) || defined(__APPLE__)
  return ::isatty(STDOUT_FILENO) != 0;
#else
  return false;
#endif
}

inline std::string generator_text(const Generator& g) {
  std::string s = "(";
  for (int i = 0; i < g.d(); ++i) {
    if (i) s += ",";
    s += std::to_string(g.c[i].value);
  }
  return s + ")";
}

struct ScanFlags {
  std::string mode = "accelerated";
  std::string conjecture = "on";
  std::string order = "paper";
  int workers = 1;
  bool early_stop = false;
  std::optional<int> tau;
  std::optional<int> max_radius;

  ScanOptions options(int n) const {
    ScanOptions o;
    o.mode = parse_mode(mode);
    o.conjecture = parse_conjecture(conjecture);
    o.order = parse_order(order);
    o.workers = workers;
    o.max_grid_radius = max_radius;
    if (early_stop) o.early_stop_run_length = tau.value_or(detection_threshold(n));
    return o;
  }
};

inline void add_scan_flags(CLI::App* cmd, ScanFlags& f) {
  cmd->add_option("--mode", f.mode, "accelerated or trivial")
      ->check(CLI::IsMember({"accelerated", "trivial"}));
  cmd->add_option("--conjecture", f.conjecture, "grid rule: on, off or verify")
      ->check(CLI::IsMember({"on", "off", "verify"}));
  cmd->add_option("--order", f.order, "paper (grid before cross) or safe")
      ->check(CLI::IsMember({"paper", "safe"}));
  cmd->add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--max-radius", f.max_radius, "largest grid radius")->check(CLI::Range(0, kMaxGridRadius));
}

}  // namespace detail

/// Runs the tool. `argv[0]` is the program name.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
               const Hooks& hooks = {}) {
  CLI::App app{"Hankel determinant tables over prime fields"};
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t q = 2;
  app.add_option("-q,--field", q, "prime field size (for files without a header)");

  // gen
  auto* gen = app.add_subcommand("gen", "write a sequence with a planted linear window");
  std::string gen_kind = "hard", gen_out, gen_answer;
  int gen_n = 0, gen_d = 0, gen_s = 0, gen_t = 0;
  std::uint64_t gen_seed = 1;
  std::string gen_prefix, gen_generator, gen_suffix;
  int gen_count = 0;
  gen->add_option("kind", gen_kind, "hard, easy or planted")
      ->check(CLI::IsMember({"hard", "easy", "planted"}))
      ->required();
  gen->add_option("-n", gen_n, "sequence length");
  gen->add_option("--seed", gen_seed, "splitmix64 seed");
  gen->add_option("-o,--out", gen_out, "sequence file (default: stdout)");
  gen->add_option("--answer", gen_answer, "answer sidecar (default: <out>.answer.json)");
  gen->add_option("-d", gen_d, "planted: generator length");
  gen->add_option("-s", gen_s, "planted: first window position");
  gen->add_option("-t", gen_t, "planted: last window position");
  gen->add_option("--prefix", gen_prefix, "planted: explicit prefix symbols");
  gen->add_option("--generator", gen_generator, "planted: explicit generator c_0,...,c_{d-1}");
  gen->add_option("--count", gen_count, "planted: generated symbols after the prefix");
  gen->add_option("--suffix", gen_suffix, "planted: explicit suffix symbols");

  // scan
  auto* scan_cmd = app.add_subcommand("scan", "fill the determinant table");
  std::string scan_in, scan_stats;
  bool scan_render = false, scan_colour = false;
  detail::ScanFlags scan_flags;
  scan_cmd->add_option("input", scan_in, "sequence file")->required();
  detail::add_scan_flags(scan_cmd, scan_flags);
  scan_cmd->add_option("--stats", scan_stats, "write the stats document here");
  scan_cmd->add_flag("--render", scan_render, "print the table");
  scan_cmd->add_flag("--colour,--color", scan_colour, "colour zero squares when printing to a terminal");
  scan_cmd->add_flag("--early-stop", scan_flags.early_stop, "stop at the first zero run >= tau and recover its generator");
  scan_cmd->add_option("--tau", scan_flags.tau, "run length that counts as unusual")->check(CLI::PositiveNumber);

  // verify
  auto* verify = app.add_subcommand("verify", "compare accelerated and trivial tables");
  std::vector<std::string> verify_in;
  std::string verify_corpus;
  int verify_count = 0, verify_n = 256;
  std::uint64_t verify_seed = 1;
  detail::ScanFlags verify_flags;
  verify_flags.conjecture = "verify";
  verify->add_option("inputs", verify_in, "sequence files");
  verify->add_option("--corpus", verify_corpus, "random, hard or easy")
      ->check(CLI::IsMember({"random", "hard", "easy"}));
  verify->add_option("--count", verify_count, "corpus size");
  verify->add_option("-n", verify_n, "corpus sequence length");
  verify->add_option("--seed", verify_seed, "first corpus seed");
  detail::add_scan_flags(verify, verify_flags);

  // bench
  auto* bench = app.add_subcommand("bench", "time trivial and accelerated scans");
  std::string bench_kind = "hard", bench_out;
  int bench_n = 4096, bench_trials = 3;
  std::uint64_t bench_seed = 1;
  std::vector<int> bench_workers{1};
  bool bench_skip_trivial = false;
  bench->add_option("kind", bench_kind, "hard, easy or random")->check(CLI::IsMember({"hard", "easy", "random"}));
  bench->add_option("-n", bench_n, "sequence length");
  bench->add_option("--trials", bench_trials, "instances per mode")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "first seed");
  bench->add_option("--workers", bench_workers, "worker counts to time")->delimiter(',');
  bench->add_option("--out", bench_out, "write the report as JSON");
  bench->add_flag("--skip-trivial", bench_skip_trivial, "time the accelerated scan only");

  // render
  auto* render = app.add_subcommand("render", "print the table of a sequence file");
  std::string render_in;
  bool render_colour = false;
  detail::ScanFlags render_flags;
  render->add_option("input", render_in, "sequence file")->required();
  render->add_flag("--colour,--color", render_colour, "colour zero squares when printing to a terminal");
  detail::add_scan_flags(render, render_flags);

  std::vector<std::string> args;
  for (int k = argc - 1; k > 0; --k) args.emplace_back(argv[k]);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  auto load = [&](const std::string& path) { return parse_sequence(detail::read_file(path), q); };

  try {
    if (*gen) {
      const PrimeField f(q);
      LinearInstance inst = [&] {
        if (gen_kind == "hard") return gen_hard_instance(gen_n, f, gen_seed);
        if (gen_kind == "easy") return gen_easy_instance(gen_n, f, gen_seed);
        if (!gen_generator.empty()) {
          const auto c = detail::parse_symbols(gen_generator, f);
          if (c.empty()) throw BadLength("empty generator");
          return make_planted(f, detail::parse_symbols(gen_prefix, f), Generator(c), gen_count,
                              detail::parse_symbols(gen_suffix, f), gen_seed);
        }
        return gen_planted_instance(gen_n, gen_d, gen_s, gen_t, f, gen_seed);
      }();
      const std::string text = format_sequence(inst.x);
      const nlohmann::json answer = answer_document(inst, gen_kind);
      if (gen_out.empty()) {
        out << text;
      } else {
        detail::write_file(gen_out, text);
      }
      const std::string answer_path = !gen_answer.empty() ? gen_answer
                                      : gen_out.empty()   ? std::string{}
                                                          : gen_out + ".answer.json";
      if (!answer_path.empty()) detail::write_file(answer_path, answer.dump(2) + "\n");
      return kOk;
    }

    if (*scan_cmd) {
      const Sequence x = load(scan_in);
      const ScanReport report = scan(x, scan_flags.options(x.size()));
      const nlohmann::json doc = stats_document(report);
      if (!scan_stats.empty()) detail::write_file(scan_stats, doc.dump(2) + "\n");
      if (scan_render) {
        out << render_table(report.table, {scan_colour && detail::is_tty(hooks)});
      } else {
        const auto& s = report.stats;
        out << "n=" << x.size() << " q=" << x.field().modulus() << " mode=" << mode_name(report.options.mode)
            << " elapsed_ms=" << round_ms(report.elapsed_ms) << " nsew=" << s.nsew
            << " square_fill=" << s.square_fill << " direct=" << s.direct << " grid=" << s.grid_total()
            << " cross=" << s.cross_total() << " total=" << s.total() << "\n";
      }
      if (scan_flags.early_stop) {
        const int tau = scan_flags.tau.value_or(detection_threshold(x.size()));
        const auto sq = detect_linear_run(report, tau);
        if (!sq) {
          out << "no zero run of length >= " << tau << "\n";
        } else {
          const DetectionResult r = recover_generator(report.table, x, *sq);
          out << "square a=" << sq->a << " b=" << sq->b << " j0=" << sq->j0 << " run=" << sq->run_length()
              << "\ngenerator " << detail::generator_text(r.gen);
          if (r.window) out << " window s=" << r.window->s << " t=" << r.window->t;
          out << (r.success ? " recovered" : " not recovered") << "\n";
        }
      }
      for (const auto& m : report.mismatches) {
        err << "conjecture mismatch q=" << x.field().modulus() << " i=" << m.i << " j=" << m.j << " k=" << m.k
            << " solved=" << m.solved.value << " oracle=" << m.oracle.value << " x=" << x.to_digits() << "\n";
      }
      return report.mismatches.empty() ? kOk : kMismatch;
    }

    if (*verify) {
      std::vector<std::pair<std::string, Sequence>> corpus;
      for (const auto& path : verify_in) corpus.emplace_back(path, load(path));
      if (!verify_corpus.empty()) {
        const PrimeField f(q);
        for (int k = 0; k < verify_count; ++k) {
          const std::uint64_t seed = verify_seed + static_cast<std::uint64_t>(k);
          if (verify_corpus == "hard") {
            corpus.emplace_back("hard seed " + std::to_string(seed), gen_hard_instance(verify_n, f, seed).x);
          } else if (verify_corpus == "easy") {
            corpus.emplace_back("easy seed " + std::to_string(seed), gen_easy_instance(verify_n, f, seed).x);
          } else {
            SplitMix64 rng(seed);
            std::vector<FieldElement> v(static_cast<std::size_t>(verify_n));
            for (auto& e : v) e = rng.element(f);
            corpus.emplace_back("random seed " + std::to_string(seed), Sequence(f, std::move(v)));
          }
        }
      }
      if (corpus.empty()) {
        err << "error: verify needs input files or --corpus\n";
        return kUsage;
      }
      int failed = 0;
      for (auto& [name, x] : corpus) {
        ScanOptions acc_opts = verify_flags.options(x.size());
        acc_opts.mode = ScanMode::accelerated;
        ScanReport acc = scan(x, acc_opts);
        if (hooks.tamper) hooks.tamper(acc.table);
        ScanOptions tri_opts = acc_opts;
        tri_opts.mode = ScanMode::trivial;
        const ScanReport tri = scan(x, tri_opts);
        const auto diff = compare_tables(acc.table, tri.table);
        for (const auto& m : acc.mismatches) {
          err << name << ": conjecture mismatch q=" << x.field().modulus() << " i=" << m.i << " j=" << m.j
              << " k=" << m.k << " solved=" << m.solved.value << " oracle=" << m.oracle.value << "\n";
        }
        for (std::size_t k = 0; k < std::min<std::size_t>(diff.size(), 20); ++k) {
          const auto& d = diff[k];
          err << name << ": cell (" << d.i << ", " << d.j << ") accelerated="
              << (d.a ? std::to_string(d.a->value) : "unset")
              << " trivial=" << (d.b ? std::to_string(d.b->value) : "unset") << "\n";
        }
        const bool ok = diff.empty() && acc.mismatches.empty();
        if (!ok) ++failed;
        out << name << ": " << (ok ? "ok" : "MISMATCH") << " (" << diff.size() << " cells, "
            << acc.mismatches.size() << " conjecture events)\n";
      }
      out << (corpus.size() - static_cast<std::size_t>(failed)) << "/" << corpus.size() << " sequences agree\n";
      return failed == 0 ? kOk : kMismatch;
    }

    if (*bench) {
      const PrimeField f(q);
      auto instance = [&](int k) {
        const std::uint64_t seed = bench_seed + static_cast<std::uint64_t>(k);
        if (bench_kind == "hard") return gen_hard_instance(bench_n, f, seed).x;
        if (bench_kind == "easy") return gen_easy_instance(bench_n, f, seed).x;
        SplitMix64 rng(seed);
        std::vector<FieldElement> v(static_cast<std::size_t>(bench_n));
        for (auto& e : v) e = rng.element(f);
        return Sequence(f, std::move(v));
      };
      nlohmann::json report = {{"kind", bench_kind}, {"n", bench_n}, {"q", q}, {"trials", bench_trials}};
      nlohmann::json rows = nlohmann::json::array();
      for (int w : bench_workers) {
        if (w < 1) throw Error("worker counts must be positive");
        double acc_ms = 0, tri_ms = 0;
        for (int k = 0; k < bench_trials; ++k) {
          const Sequence x = instance(k);
          ScanOptions o;
          o.workers = w;
          o.collect_branch_tags = false;
          acc_ms += scan_accelerated(x, o).elapsed_ms;
          if (!bench_skip_trivial) tri_ms += scan_trivial(x, o).elapsed_ms;
        }
        acc_ms /= bench_trials;
        tri_ms /= bench_trials;
        nlohmann::json row = {{"workers", w}, {"accelerated_ms", round_ms(acc_ms)}};
        out << "workers=" << w << " accelerated_ms=" << round_ms(acc_ms);
        if (!bench_skip_trivial) {
          row["trivial_ms"] = round_ms(tri_ms);
          row["ratio"] = acc_ms / tri_ms;
          out << " trivial_ms=" << round_ms(tri_ms) << " ratio=" << acc_ms / tri_ms;
        }
        out << "\n";
        rows.push_back(row);
      }
      report["results"] = rows;
      if (!bench_out.empty()) detail::write_file(bench_out, report.dump(2) + "\n");
      return kOk;
    }

    if (*render) {
      const Sequence x = load(render_in);
      const ScanReport report = scan(x, render_flags.options(x.size()));
      out << render_table(report.table, {render_colour && detail::is_tty(hooks)});
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: bad number: " << e.what() << "\n";
    return kUsage;
  } catch (const std::out_of_range& e) {
    err << "error: number out of range: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}

}  // namespace hankel::cli
