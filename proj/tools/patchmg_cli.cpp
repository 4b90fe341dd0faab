#include <patchmg/patchmg.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

using namespace patchmg;

namespace
{
  void add_common_options(CLI::App *cmd, RunConfig &cfg, std::string &config_file,
                          std::string &mode, std::string &smoother, std::string &distributor,
                          std::string &side)
  {
    cmd->add_option("--config", config_file, "flat key=value config file");
    cmd->add_option("--dim", cfg.dim, "spatial dimension (2 or 3)");
    cmd->add_option("--degree", cfg.degree, "polynomial degree p");
    cmd->add_option("--refinements", cfg.refinements, "global refinements from the single patch");
    cmd->add_option("--delta", cfg.delta, "mesh distortion factor in [0, 0.5)");
    cmd->add_option("--seed", cfg.seed, "distortion RNG seed");
    cmd->add_option("--mode", mode, "local cycle: full|half");
    cmd->add_option("--smoother", smoother, "local smoother: jacobi|cartesian|fdm");
    cmd->add_option("--local-iters", cfg.local.iterations, "local Richardson iterations");
    cmd->add_option("--omega", cfg.local.omega, "smoother damping");
    cmd->add_option("--distributor", distributor, "index mapping: dynamic|lookup");
    cmd->add_option("--workers", cfg.workers, "worker threads for patch sweeps");
    cmd->add_option("--csv", cfg.csv_path, "append a CSV row to this file");
    cmd->add_option("--tol", cfg.tol, "GMRES relative tolerance");
    cmd->add_option("--max-iter", cfg.max_iter, "GMRES iteration limit");
    cmd->add_option("--gmres-side", side, "preconditioning side: left|right");
    cmd->add_option("--quadrature", cfg.quadrature, "quadrature points per axis (0: p+1)");
    cmd->add_option("--repetitions", cfg.repetitions, "timed smoother repetitions");
    cmd->add_option("--pre-sweeps", cfg.mg.pre_sweeps, "pre-smoothing sweeps per level");
    cmd->add_option("--post-sweeps", cfg.mg.post_sweeps, "post-smoothing sweeps per level");
    cmd->add_flag_callback("--no-counters", [&cfg] { cfg.counters = false; },
                           "disable FLOP counters (timings remain)");
  }

  RunConfig finalize(RunConfig cfg, const std::string &config_file, const std::string &mode,
                     const std::string &smoother, const std::string &distributor,
                     const std::string &side, const CLI::App *cmd)
  {
    // Config file first, explicit flags override it.
    if (!config_file.empty())
      {
        RunConfig base;
        apply_config_file(base, config_file);
        auto keep = [&](const std::string &flag) { return cmd->count(flag) > 0; };
        if (!keep("--dim"))
          cfg.dim = base.dim;
        if (!keep("--degree"))
          cfg.degree = base.degree;
        if (!keep("--refinements"))
          cfg.refinements = base.refinements;
        if (!keep("--delta"))
          cfg.delta = base.delta;
        if (!keep("--seed"))
          cfg.seed = base.seed;
        if (!keep("--local-iters"))
          cfg.local.iterations = base.local.iterations;
        if (!keep("--omega"))
          cfg.local.omega = base.local.omega;
        if (!keep("--workers"))
          cfg.workers = base.workers;
        if (!keep("--csv"))
          cfg.csv_path = base.csv_path;
        if (!keep("--tol"))
          cfg.tol = base.tol;
        if (!keep("--max-iter"))
          cfg.max_iter = base.max_iter;
        if (!keep("--quadrature"))
          cfg.quadrature = base.quadrature;
        if (!keep("--repetitions"))
          cfg.repetitions = base.repetitions;
        if (!keep("--pre-sweeps"))
          cfg.mg.pre_sweeps = base.mg.pre_sweeps;
        if (!keep("--post-sweeps"))
          cfg.mg.post_sweeps = base.mg.post_sweeps;
        if (!keep("--no-counters"))
          cfg.counters = base.counters;
        if (!keep("--mode"))
          cfg.local.mode = base.local.mode;
        if (!keep("--smoother"))
          cfg.local.smoother = base.local.smoother;
        if (!keep("--distributor"))
          cfg.local.distributor = base.local.distributor;
        if (!keep("--gmres-side"))
          cfg.gmres_side = base.gmres_side;
      }
    if (!mode.empty())
      cfg.local.mode = parse_cycle_mode(mode);
    if (!smoother.empty())
      cfg.local.smoother = parse_smoother(smoother);
    if (!distributor.empty())
      cfg.local.distributor = parse_distributor(distributor);
    if (!side.empty())
      cfg.gmres_side = parse_side(side);
    return cfg;
  }

  void print_config(const RunConfig &cfg)
  {
    std::printf("config: d=%d p=%d refinements=%d delta=%g seed=%llu mode=%s smoother=%s "
                "iters=%d omega=%g distributor=%s workers=%d gmres=%s\n",
                cfg.dim, cfg.degree, cfg.refinements, cfg.delta,
                (unsigned long long)cfg.seed, to_string(cfg.local.mode).c_str(),
                to_string(cfg.local.smoother).c_str(), cfg.local.iterations, cfg.local.omega,
                to_string(cfg.local.distributor).c_str(), cfg.workers,
                to_string(cfg.gmres_side).c_str());
  }
} // namespace

int main(int argc, char **argv)
{
  CLI::App app{"Matrix-free vertex-patch multigrid Poisson solver and benchmark harness"};
  app.require_subcommand(1);

  RunConfig   cfg;
  std::string config_file, mode, smoother, distributor, side;

  auto *solve  = app.add_subcommand("solve", "GMRES iteration-count experiment");
  auto *bench  = app.add_subcommand("bench", "phase breakdown of one smoother application");
  auto *memory = app.add_subcommand("memory", "smoother memory footprint in doubles per DoF");
  for (auto *cmd : {solve, bench, memory})
    add_common_options(cmd, cfg, config_file, mode, smoother, distributor, side);

  CLI11_PARSE(app, argc, argv);
  CLI::App *cmd = app.get_subcommands().front();

  try
    {
      cfg = finalize(cfg, config_file, mode, smoother, distributor, side, cmd);
      print_config(cfg);
      std::vector<RunRecord> records;

      if (cmd == solve)
        {
          GlobalSolver s = make_solver(cfg);
          s.enable_counters(cfg.counters);
          const auto result = solve_poisson(s, cfg.tol, cfg.max_iter, cfg.gmres_side);
          s.collect_counters();
          if (!result.converged)
            std::printf("no convergence within %d iterations\n", cfg.max_iter);
          std::printf("dofs=%ld patches=%zu iterations=%d\n",
                      s.levels[s.finest()]->dofs.n_dofs,
                      s.levels[s.finest()]->patches.patches.size(), result.iterations);
          if (cfg.counters)
            std::printf("total flops=%llu divisions(smoother)=%llu\n",
                        (unsigned long long)s.counters.flops,
                        (unsigned long long)s.counters.divisions);

          RunRecord rec;
          rec.config     = cfg;
          rec.command    = "solve";
          rec.iterations = result.iterations;
          rec.converged  = result.converged;
          rec.timestamp  = current_timestamp();
          rec.memory_doubles_per_dof = report_memory(s);
          records.push_back(rec);
        }
      else if (cmd == bench)
        {
          const RunRecord rec = run_benchmark(cfg);
          const double    base_t = rec.baseline_local_vmult_seconds;
          const double    base_f = rec.baseline_local_vmult_flops;
          std::printf("baseline: one patch-local vmult = %.3e s", base_t);
          if (cfg.counters)
            std::printf(", %.0f flops (q=%d)", base_f,
                        cfg.quadrature > 0 ? cfg.quadrature : cfg.degree + 1);
          std::printf("\nbaseline: one global vmult = %.3e s\n", rec.baseline_global_vmult_seconds);
          std::printf("%-22s %12s %12s %14s %12s\n", "phase", "seconds", "rel.time",
                      "flops", "rel.flops");
          double sweep_seconds = 0;
          for (int ph = 0; ph < n_phases; ++ph)
            {
              const auto &p = rec.phases[ph];
              sweep_seconds += p.seconds;
              std::printf("%-22s %12.4e %12.2f", phase_name(Phase(ph)), p.seconds,
                          p.seconds / base_t);
              if (cfg.counters)
                std::printf(" %14llu %12.2f", (unsigned long long)p.flops,
                            double(p.flops) / base_f);
              std::printf("\n");
            }
          std::printf("smoother application: %.4e s = %.2f global vmults\n", sweep_seconds,
                      sweep_seconds / rec.baseline_global_vmult_seconds);
          if (cfg.counters)
            std::printf("total flops/application: %.0f, divisions: %.0f\n", rec.total_flops,
                        rec.total_divisions);
          std::printf("memory: %.3f doubles/DoF\n", rec.memory_doubles_per_dof);
          records.push_back(rec);
        }
      else
        {
          GlobalSolver s = make_solver(cfg);
          RunRecord    rec;
          rec.config  = cfg;
          rec.command = "memory";
          rec.timestamp = current_timestamp();
          rec.memory_doubles_per_dof = report_memory(s);
          std::printf("dofs=%ld memory=%.4f doubles/DoF\n", s.levels[s.finest()]->dofs.n_dofs,
                      rec.memory_doubles_per_dof);
          records.push_back(rec);
        }

      if (!cfg.csv_path.empty())
        emit_csv(records, cfg.csv_path);
    }
  catch (const std::exception &e)
    {
      std::fprintf(stderr, "error: %s\n", e.what());
      return 1;
    }
  return 0;
}
