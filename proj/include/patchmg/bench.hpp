#pragma once

#include <patchmg/config.hpp>

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <string>
#include <vector>

namespace patchmg
{
  /// One harness run: config echo, solver iterations (when solving),
  /// per-phase counters of the finest-level smoother, baselines, and the
  /// memory footprint. One CSV row.
  struct RunRecord
  {
    RunConfig   config;
    std::string command; // solve | bench | memory

    int  iterations = -1;
    bool converged  = false;

    // Mean per-application phase data of the finest-level smoother.
    std::array<PhaseData, n_phases> phases{};
    double                          total_flops     = 0; // per application
    double                          total_divisions = 0;

    double baseline_local_vmult_seconds = 0; // one patch-local A u
    double baseline_local_vmult_flops   = 0;
    double baseline_global_vmult_seconds = 0;

    double memory_doubles_per_dof = 0;

    std::string timestamp;
  };

  inline std::string current_timestamp()
  {
    std::time_t t = std::time(nullptr);
    char        buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
    return buf;
  }

  /// Persistent finest-level smoother storage in 8-byte units per DoF:
  /// inverse diagonals of all p-levels, 1D transfer matrices, lookup tables,
  /// the geometry caches the smoother evaluates with, and (when the
  /// configured smoother uses them) FDM data and per-patch scalings.
  inline double report_memory(const GlobalSolver &s)
  {
    const auto &state = *s.levels[s.finest()];
    const auto &data  = state.pdata;

    double doubles = 0;
    for (const auto &v : data.inv_diag)
      doubles += double(v.size());
    for (const auto &t : data.transfer)
      doubles += double(t.stored_doubles());
    for (const auto &lt : data.lookup)
      doubles += double(lt.stored_entries()) * sizeof(int) / sizeof(double);
    for (const auto &g : data.geom)
      doubles += double(g.stored_doubles());
    if (data.config.smoother != LocalSmoother::jacobi)
      for (const auto &f : data.fdm)
        doubles += double(f.stored_doubles());
    for (const auto &v : data.scale)
      doubles += double(v.size());

    return doubles / double(state.dofs.n_dofs);
  }

  /// Phase breakdown of one multiplicative smoother application on the
  /// finest level: R timed repetitions, mean per-phase wall times and
  /// counters, plus the patch-local and global vmult baselines used for the
  /// relative metrics.
  inline RunRecord run_benchmark(const RunConfig &cfg, const std::string &command = "bench")
  {
    if (cfg.dim != 2 && cfg.dim != 3)
      throw std::invalid_argument("run_benchmark: dim must be 2 or 3");
    if (cfg.repetitions < 1)
      throw std::invalid_argument("run_benchmark: need at least one repetition");

    RunRecord rec;
    rec.config    = cfg;
    rec.command   = command;
    rec.timestamp = current_timestamp();

    GlobalSolver s = make_solver(cfg);
    s.enable_counters(cfg.counters);
    auto &fine = *s.levels[s.finest()];

    rec.memory_doubles_per_dof = report_memory(s);

    // Baseline: one patch-local operator application.
    {
      auto &ws = s.workspaces[0];
      local::fetch_patch(fine.pdata, ws, 0);
      const int  top = fine.pdata.seq.top();
      const long n   = fine.pdata.interior_size(top);
      Vector     x(n, 1.0), y(n);
      ws.counters = Counters(cfg.counters);
      local::local_vmult(fine.pdata, ws, top, x.data(), y.data());
      rec.baseline_local_vmult_flops = double(ws.counters.flops);
      ws.counters                    = Counters(cfg.counters);

      const int  reps  = 200;
      const auto start = std::chrono::steady_clock::now();
      for (int i = 0; i < reps; ++i)
        local::local_vmult(fine.pdata, ws, top, x.data(), y.data());
      rec.baseline_local_vmult_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
      ws.counters = Counters(cfg.counters);
    }

    // Baseline: one global operator application.
    {
      Vector u(fine.dofs.n_dofs, 1.0), v;
      global_vmult(fine.op, u, v, s.kernel, s.counters); // warm up
      const auto start = std::chrono::steady_clock::now();
      global_vmult(fine.op, u, v, s.kernel, s.counters);
      rec.baseline_global_vmult_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      s.counters = Counters(cfg.counters);
    }

    const Vector b = make_rhs(fine.op);
    Vector       u(fine.dofs.n_dofs, 0.0);
    for (int rep = 0; rep < cfg.repetitions; ++rep)
      {
        std::fill(u.begin(), u.end(), 0.0);
        smoother_sweep(fine.pdata, u, b, fine.coloring, s.workspaces, *s.pool);
      }
    s.collect_counters();

    for (int ph = 0; ph < n_phases; ++ph)
      {
        rec.phases[ph].seconds     = s.counters.phases[ph].seconds / cfg.repetitions;
        rec.phases[ph].flops       = s.counters.phases[ph].flops / cfg.repetitions;
        rec.phases[ph].invocations = s.counters.phases[ph].invocations / cfg.repetitions;
      }
    rec.total_flops     = double(s.counters.flops) / cfg.repetitions;
    rec.total_divisions = double(s.counters.divisions) / cfg.repetitions;
    return rec;
  }

  inline std::string csv_header()
  {
    std::string h = "command,dim,degree,refinements,delta,seed,mode,smoother,local_iterations,"
                    "omega,distributor,workers,quadrature,gmres_side,iterations,converged,"
                    "memory_doubles_per_dof,baseline_local_vmult_seconds,"
                    "baseline_local_vmult_flops,baseline_global_vmult_seconds";
    for (int ph = 0; ph < n_phases; ++ph)
      {
        const std::string name = phase_name(Phase(ph));
        h += "," + name + "_seconds," + name + "_flops," + name + "_invocations";
      }
    h += ",total_flops,total_divisions,timestamp";
    return h;
  }

  inline std::string csv_row(const RunRecord &r)
  {
    char buf[64];
    auto num = [&buf](double v) {
      std::snprintf(buf, sizeof(buf), "%.17g", v);
      return std::string(buf);
    };
    const bool  c = r.config.counters;
    std::string row;
    row += r.command;
    row += "," + std::to_string(r.config.dim);
    row += "," + std::to_string(r.config.degree);
    row += "," + std::to_string(r.config.refinements);
    row += "," + num(r.config.delta);
    row += "," + std::to_string(r.config.seed);
    row += "," + to_string(r.config.local.mode);
    row += "," + to_string(r.config.local.smoother);
    row += "," + std::to_string(r.config.local.iterations);
    row += "," + num(r.config.local.omega);
    row += "," + to_string(r.config.local.distributor);
    row += "," + std::to_string(r.config.workers);
    row += "," + std::to_string(r.config.quadrature);
    row += "," + to_string(r.config.gmres_side);
    row += "," + std::to_string(r.iterations);
    row += "," + std::to_string(int(r.converged));
    row += "," + num(r.memory_doubles_per_dof);
    row += "," + num(r.baseline_local_vmult_seconds);
    row += "," + (c ? num(r.baseline_local_vmult_flops) : std::string());
    row += "," + num(r.baseline_global_vmult_seconds);
    for (int ph = 0; ph < n_phases; ++ph)
      {
        row += "," + num(r.phases[ph].seconds);
        row += "," + (c ? num(double(r.phases[ph].flops)) : std::string());
        row += "," + num(double(r.phases[ph].invocations));
      }
    row += "," + (c ? num(r.total_flops) : std::string());
    row += "," + (c ? num(r.total_divisions) : std::string());
    row += "," + r.timestamp;
    return row;
  }

  /// Append-safe CSV output: writes the header only when the file does not
  /// yet have one. I/O failures are reported with the path.
  inline void emit_csv(const std::vector<RunRecord> &records, const std::string &path)
  {
    bool need_header = true;
    {
      std::ifstream probe(path);
      std::string   first;
      if (probe && std::getline(probe, first) && !first.empty())
        need_header = false;
    }
    std::ofstream out(path, std::ios::app);
    if (!out)
      throw std::runtime_error("emit_csv: cannot open " + path);
    if (need_header)
      out << csv_header() << "\n";
    for (const auto &r : records)
      out << csv_row(r) << "\n";
    if (!out)
      throw std::runtime_error("emit_csv: write failed for " + path);
  }
} // namespace patchmg
