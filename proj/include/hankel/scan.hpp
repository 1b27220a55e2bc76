#pragma once

// Filling the whole determinant table.
//
// scan_accelerated walks rows j = 2..h. Each row has a sequential phase that
// detects new zero squares on row j-1 and fills them forward, then a sweep
// over the row's Unset cells that may run on several workers. A cell tries,
// in order: NSEW, the ball grid, the cross identity, direct elimination
// (BranchOrder::safe swaps grid and cross). The sweep reads rows < j only,
// so the table does not depend on the worker count.
//
// scan_trivial evaluates every cell by elimination and is the oracle.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "hankel/detengine.hpp"
#include "hankel/errors.hpp"
#include "hankel/identities.hpp"
#include "hankel/sequence.hpp"
#include "hankel/table.hpp"

namespace hankel {

enum class ScanMode { accelerated, trivial };
enum class ConjectureMode { on, off, verify };
enum class BranchOrder { paper, safe };

struct ScanOptions {
  ScanMode mode = ScanMode::accelerated;
  ConjectureMode conjecture = ConjectureMode::on;
  BranchOrder order = BranchOrder::paper;
  int workers = 1;
  // Stop after the row on which a zero square of at least this run length
  // is found.
  std::optional<int> early_stop_run_length;
  bool collect_branch_tags = true;
  // Defaults to default_grid_radius(field).
  std::optional<int> max_grid_radius;
};

/// A grid solution that disagreed with direct evaluation (verify mode).
struct ConjectureMismatch {
  int i = 0;
  int j = 0;
  int k = 0;
  FieldElement solved;
  FieldElement oracle;
  friend bool operator==(const ConjectureMismatch&, const ConjectureMismatch&) = default;
};

struct ScanReport {
  DetTable table;
  BranchStats stats;
  std::vector<ZeroSquare> squares;
  std::vector<ConjectureMismatch> mismatches;
  double elapsed_ms = 0;
  ScanOptions options;
  bool early_stopped = false;
  int last_row = 1;  // last fully swept row
};

/// Fixed set of workers; the calling thread acts as worker 0.
class WorkerPool {
 public:
  explicit WorkerPool(int workers) : size_(std::max(workers, 1)) {
    for (int w = 1; w < size_; ++w) threads_.emplace_back([this, w] { loop(w); });
  }
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  ~WorkerPool() {
    {
      std::lock_guard lock(mu_);
      stopping_ = true;
      ++generation_;
    }
    start_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int size() const { return size_; }

  /// Runs task(w) for every worker w and waits for all of them.
  void run(const std::function<void(int)>& task) {
    if (size_ == 1) {
      task(0);
      return;
    }
    {
      std::lock_guard lock(mu_);
      task_ = &task;
      pending_ = size_ - 1;
      error_ = nullptr;
      ++generation_;
    }
    start_.notify_all();
    std::exception_ptr local;
    try {
      task(0);
    } catch (...) {
      local = std::current_exception();
    }
    std::unique_lock lock(mu_);
    done_.wait(lock, [this] { return pending_ == 0; });
    task_ = nullptr;
    if (local) std::rethrow_exception(local);
    if (error_) std::rethrow_exception(error_);
  }

 private:
  void loop(int w) {
    std::uint64_t seen = 0;
    for (;;) {
      const std::function<void(int)>* task = nullptr;
      {
        std::unique_lock lock(mu_);
        start_.wait(lock, [&] { return generation_ != seen; });
        seen = generation_;
        if (stopping_) return;
        task = task_;
      }
      std::exception_ptr err;
      try {
        (*task)(w);
      } catch (...) {
        err = std::current_exception();
      }
      {
        std::lock_guard lock(mu_);
        if (err && !error_) error_ = err;
        if (--pending_ == 0) done_.notify_one();
      }
    }
  }

  int size_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable start_;
  std::condition_variable done_;
  const std::function<void(int)>* task_ = nullptr;
  std::uint64_t generation_ = 0;
  int pending_ = 0;
  bool stopping_ = false;
  std::exception_ptr error_;
};

namespace detail {

using Clock = std::chrono::steady_clock;

inline double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

struct WorkerState {
  BranchStats stats;
  std::vector<ConjectureMismatch> mismatches;
};

/// Visits every cell of row j in 64-cell blocks handed out dynamically.
/// Blocks never share a status word, so concurrent writes are safe.
template <class CellFn>
void sweep_row(WorkerPool& pool, const DetTable& t, int j, std::vector<WorkerState>& states,
               CellFn&& cell) {
  const ColumnRange cols = t.cols(j);
  const int blocks = (cols.size() + 63) / 64;
  std::atomic<int> next{0};
  pool.run([&](int w) {
    WorkerState& st = states[static_cast<std::size_t>(w)];
    for (int b = next.fetch_add(1); b < blocks; b = next.fetch_add(1)) {
      const int lo = cols.lo + b * 64;
      const int hi = std::min(cols.hi, lo + 63);
      for (int i = lo; i <= hi; ++i) cell(i, st);
    }
  });
}

}  // namespace detail

inline ScanReport scan_trivial(const Sequence& x, const ScanOptions& opts = {}) {
  if (opts.workers < 1) throw Error("workers must be >= 1");
  const auto t0 = detail::Clock::now();
  ScanReport report{init_table(x, opts.collect_branch_tags), {}, {}, {}, 0, opts};
  report.options.mode = ScanMode::trivial;
  DetTable& t = report.table;
  WorkerPool pool(opts.workers);
  std::vector<detail::WorkerState> states(static_cast<std::size_t>(pool.size()));

  for (int j = 2; j <= t.h(); ++j) {
    detail::sweep_row(pool, t, j, states, [&](int i, detail::WorkerState& st) {
      t.set(i, j, det_direct(x, i, j), Branch::direct);
      ++st.stats.direct;
    });
    report.last_row = j;
  }
  for (auto& st : states) report.stats += st.stats;
  report.elapsed_ms = detail::ms_since(t0);
  report.stats.timing_ms.direct_ms = report.elapsed_ms;
  return report;
}

inline ScanReport scan_accelerated(const Sequence& x, const ScanOptions& opts = {}) {
  if (opts.workers < 1) throw Error("workers must be >= 1");
  const auto t0 = detail::Clock::now();
  ScanReport report{init_table(x, opts.collect_branch_tags), {}, {}, {}, 0, opts};
  report.options.mode = ScanMode::accelerated;
  DetTable& t = report.table;
  const int radius = opts.max_grid_radius.value_or(default_grid_radius(x.field()));
  const bool use_grid = opts.conjecture != ConjectureMode::off && radius >= 2;
  const bool verify = opts.conjecture == ConjectureMode::verify;

  WorkerPool pool(opts.workers);
  std::vector<detail::WorkerState> states(static_cast<std::size_t>(pool.size()));
  std::vector<ZeroSquare> active;

  for (int j = 2; j <= t.h(); ++j) {
    // Sequential phase: squares seeded on row j-1 fill rows j..j1.
    const auto fill_t0 = detail::Clock::now();
    std::erase_if(active, [&](const ZeroSquare& s) { return s.j1() < j - 1; });
    bool stop_after_row = false;
    for (const ZeroSquare& sq : find_zero_squares(t, j, active)) {
      report.stats.square_fill += fill_zero_square(t, sq, j);
      report.squares.push_back(sq);
      active.push_back(sq);
      if (opts.early_stop_run_length && sq.run_length() >= *opts.early_stop_run_length) {
        stop_after_row = true;
      }
    }
    report.stats.timing_ms.square_fill_ms += detail::ms_since(fill_t0);

    detail::sweep_row(pool, t, j, states, [&](int i, detail::WorkerState& st) {
      if (t.known(i, j)) return;
      const auto c0 = detail::Clock::now();
      if (auto v = nsew_solve(t, i, j)) {
        t.set(i, j, *v, Branch::nsew);
        ++st.stats.nsew;
        st.stats.timing_ms.nsew_ms += detail::ms_since(c0);
        return;
      }
      auto try_grid = [&]() -> bool {
        if (!use_grid) return false;
        auto g = grid_solve(t, i, j, radius);
        if (!g) return false;
        FieldElement v = g->value;
        if (verify) {
          const FieldElement oracle = det_direct(x, i, j);
          if (oracle != v) {
            st.mismatches.push_back({i, j, g->k, v, oracle});
            v = oracle;
          }
        }
        t.set(i, j, v, Branch::grid, g->k);
        ++st.stats.grid[static_cast<std::size_t>(g->k)];
        st.stats.timing_ms.grid_ms += detail::ms_since(c0);
        return true;
      };
      auto try_cross = [&]() -> bool {
        auto c = cross_solve(t, i, j);
        if (!c) return false;
        t.set(i, j, c->value, Branch::cross);
        ++st.stats.cross[c->depth()];
        st.stats.timing_ms.cross_ms += detail::ms_since(c0);
        return true;
      };
      const bool done = opts.order == BranchOrder::paper ? (try_grid() || try_cross())
                                                         : (try_cross() || try_grid());
      if (done) return;
      t.set(i, j, det_direct(x, i, j), Branch::direct);
      ++st.stats.direct;
      st.stats.timing_ms.direct_ms += detail::ms_since(c0);
    });
    report.last_row = j;
    if (stop_after_row) {
      report.early_stopped = j < t.h();
      break;
    }
  }

  for (auto& st : states) {
    report.stats += st.stats;
    report.mismatches.insert(report.mismatches.end(), st.mismatches.begin(), st.mismatches.end());
  }
  std::sort(report.mismatches.begin(), report.mismatches.end(),
            [](const ConjectureMismatch& a, const ConjectureMismatch& b) {
              return a.j != b.j ? a.j < b.j : a.i < b.i;
            });
  report.elapsed_ms = detail::ms_since(t0);
  return report;
}

inline ScanReport scan(const Sequence& x, const ScanOptions& opts = {}) {
  return opts.mode == ScanMode::trivial ? scan_trivial(x, opts) : scan_accelerated(x, opts);
}

/// A cell where two tables disagree; nullopt marks an Unset cell.
struct CellMismatch {
  int i = 0;
  int j = 0;
  std::optional<FieldElement> a;
  std::optional<FieldElement> b;
};

inline std::vector<CellMismatch> compare_tables(const DetTable& a, const DetTable& b) {
  if (a.n() != b.n() || !(a.field() == b.field())) {
    throw ShapeMismatch("tables differ in length or field");
  }
  std::vector<CellMismatch> out;
  for (int j = 0; j <= a.h(); ++j) {
    const ColumnRange cols = a.cols(j);
    for (int i = cols.lo; i <= cols.hi; ++i) {
      const Cell ca = a.get(i, j);
      const Cell cb = b.get(i, j);
      const bool ka = ca.status == CellStatus::known;
      const bool kb = cb.status == CellStatus::known;
      if (ka != kb || (ka && ca.value != cb.value)) {
        out.push_back({i, j, ka ? std::optional(ca.value) : std::nullopt,
                       kb ? std::optional(cb.value) : std::nullopt});
      }
    }
  }
  return out;
}

}  // namespace hankel
