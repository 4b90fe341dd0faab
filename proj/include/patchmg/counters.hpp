#pragma once

#include <array>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <string>

namespace patchmg
{
  /// Phases of one patch-smoother application. The taxonomy is fixed; CSV
  /// columns and all relative metrics refer to these names.
  enum class Phase : int
  {
    fetch_setup = 0,
    gather_global,
    evaluate_operator,
    local_gather,
    pmg_solve,
    distribute_correction,
    scatter_global,
    none
  };

  constexpr int n_phases = 7;

  inline const char *phase_name(Phase p)
  {
    static const char *names[] = {"fetch_setup",
                                  "gather_global",
                                  "evaluate_operator",
                                  "local_gather",
                                  "pmg_solve",
                                  "distribute_correction",
                                  "scatter_global"};
    return names[int(p)];
  }

  struct PhaseData
  {
    double        seconds     = 0.0;
    std::uint64_t flops       = 0;
    std::uint64_t invocations = 0;
  };

  /// Global count of floating-point divisions performed through
  /// counted_div. All divisions of the solver data path go through it;
  /// none remain in the smoother application, which the acceptance suite
  /// asserts by taking deltas around sweeps.
  inline std::atomic<std::uint64_t> &division_count()
  {
    static std::atomic<std::uint64_t> count{0};
    return count;
  }

  inline double counted_div(double numerator, double denominator)
  {
    division_count().fetch_add(1, std::memory_order_relaxed);
    return numerator / denominator;
  }

  /// Software FLOP and invocation counters. One instance per worker; merged
  /// at color barriers. add/mul count 1, FMA counts 2, divisions are tracked
  /// separately so the division-free property of the solver hot path can be
  /// asserted. Counting is a runtime mode and never changes numerical
  /// results.
  struct Counters
  {
    bool          enabled   = false;
    std::uint64_t flops     = 0;
    std::uint64_t divisions = 0;

    std::array<PhaseData, n_phases> phases;
    Phase                           current = Phase::none;

    // local_vmult invocations by p-level index (0 = coarsest).
    std::array<std::uint64_t, 8> level_vmults{};

    void reset()
    {
      *this = Counters{enabled};
    }

    Counters(bool on = false)
      : enabled(on)
    {}

    void add_flops(std::uint64_t n)
    {
      if (!enabled)
        return;
      flops += n;
      if (current != Phase::none)
        phases[int(current)].flops += n;
    }

    void add_divisions(std::uint64_t n)
    {
      if (!enabled)
        return;
      divisions += n;
    }

    void count_level_vmult(int level_index)
    {
      if (enabled && level_index >= 0 && level_index < 8)
        ++level_vmults[level_index];
    }

    void merge(const Counters &other)
    {
      flops += other.flops;
      divisions += other.divisions;
      for (int i = 0; i < n_phases; ++i)
        {
          phases[i].seconds += other.phases[i].seconds;
          phases[i].flops += other.phases[i].flops;
          phases[i].invocations += other.phases[i].invocations;
        }
      for (int i = 0; i < 8; ++i)
        level_vmults[i] += other.level_vmults[i];
    }

    std::uint64_t phase_flop_total() const
    {
      std::uint64_t s = 0;
      for (const auto &p : phases)
        s += p.flops;
      return s;
    }
  };

  /// Scoped phase attribution: accumulates wall time and an invocation into
  /// one phase of the given counters. Phases in the smoother are sequential,
  /// never nested.
  class PhaseScope
  {
  public:
    PhaseScope(Counters &c, Phase p)
      : counters(c)
      , previous(c.current)
      , start(clock::now())
    {
      counters.current = p;
      ++counters.phases[int(p)].invocations;
    }

    ~PhaseScope()
    {
      const Phase p = counters.current;
      counters.phases[int(p)].seconds +=
        std::chrono::duration<double>(clock::now() - start).count();
      counters.current = previous;
    }

  private:
    using clock = std::chrono::steady_clock;
    Counters         &counters;
    Phase             previous;
    clock::time_point start;
  };
} // namespace patchmg
