#pragma once

#include <patchmg/gmres.hpp>

#include <fstream>
#include <map>
#include <sstream>
#include <string>

namespace patchmg
{
  /// Full run configuration for the harness; maps one-to-one onto the flat
  /// key=value config file and the CLI flags (flags override file values).
  struct RunConfig
  {
    int           dim         = 2;
    int           degree      = 3;
    int           refinements = 2;
    double        delta       = 0.0;
    std::uint64_t seed        = 1;

    LocalSolverConfig local;
    MgConfig          mg;

    double           tol        = 1e-8;
    int              max_iter   = 200;
    PreconditionSide gmres_side = PreconditionSide::left;

    int         workers     = 1;
    int         quadrature  = 0; // 0: p+1 points
    bool        counters    = true;
    int         repetitions = 20;
    std::string csv_path;
  };

  inline std::string to_string(CycleMode m)
  {
    return m == CycleMode::full ? "full" : "half";
  }
  inline std::string to_string(LocalSmoother s)
  {
    switch (s)
      {
        case LocalSmoother::jacobi:
          return "jacobi";
        case LocalSmoother::cartesian_reinforced:
          return "cartesian";
        default:
          return "fdm";
      }
  }
  inline std::string to_string(DistributorKind k)
  {
    return k == DistributorKind::dynamic_traversal ? "dynamic" : "lookup";
  }
  inline std::string to_string(PreconditionSide s)
  {
    return s == PreconditionSide::left ? "left" : "right";
  }

  inline CycleMode parse_cycle_mode(const std::string &s)
  {
    if (s == "full")
      return CycleMode::full;
    if (s == "half")
      return CycleMode::half;
    throw std::invalid_argument("unknown cycle mode: " + s);
  }
  inline LocalSmoother parse_smoother(const std::string &s)
  {
    if (s == "jacobi")
      return LocalSmoother::jacobi;
    if (s == "cartesian" || s == "cartesian_reinforced")
      return LocalSmoother::cartesian_reinforced;
    if (s == "fdm")
      return LocalSmoother::fdm;
    throw std::invalid_argument("unknown smoother: " + s);
  }
  inline DistributorKind parse_distributor(const std::string &s)
  {
    if (s == "dynamic")
      return DistributorKind::dynamic_traversal;
    if (s == "lookup")
      return DistributorKind::lookup;
    throw std::invalid_argument("unknown distributor: " + s);
  }
  inline PreconditionSide parse_side(const std::string &s)
  {
    if (s == "left")
      return PreconditionSide::left;
    if (s == "right")
      return PreconditionSide::right;
    throw std::invalid_argument("unknown gmres side: " + s);
  }

  /// Flat key=value text; '#' starts a comment, blank lines are skipped.
  inline void apply_config_file(RunConfig &cfg, const std::string &path)
  {
    std::ifstream in(path);
    if (!in)
      throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int         lineno = 0;
    while (std::getline(in, line))
      {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
          line.erase(hash);
        std::string key, value;
        const auto  eq = line.find('=');
        if (eq == std::string::npos)
          {
            std::istringstream ws(line);
            std::string        tok;
            if (!(ws >> tok))
              continue; // blank
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key=value");
          }
        auto trim = [](std::string s) {
          const auto b = s.find_first_not_of(" \t");
          const auto e = s.find_last_not_of(" \t");
          return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
        };
        key   = trim(line.substr(0, eq));
        value = trim(line.substr(eq + 1));

        if (key == "dim")
          cfg.dim = std::stoi(value);
        else if (key == "degree")
          cfg.degree = std::stoi(value);
        else if (key == "refinements")
          cfg.refinements = std::stoi(value);
        else if (key == "delta")
          cfg.delta = std::stod(value);
        else if (key == "seed")
          cfg.seed = std::stoull(value);
        else if (key == "local.mode")
          cfg.local.mode = parse_cycle_mode(value);
        else if (key == "local.smoother")
          cfg.local.smoother = parse_smoother(value);
        else if (key == "local.iterations")
          cfg.local.iterations = std::stoi(value);
        else if (key == "local.omega")
          cfg.local.omega = std::stod(value);
        else if (key == "local.distributor")
          cfg.local.distributor = parse_distributor(value);
        else if (key == "local.transfer_zero_skip")
          cfg.local.exploit_transfer_zeros = (value == "1" || value == "true");
        else if (key == "mg.pre_sweeps")
          cfg.mg.pre_sweeps = std::stoi(value);
        else if (key == "mg.post_sweeps")
          cfg.mg.post_sweeps = std::stoi(value);
        else if (key == "solver.tol")
          cfg.tol = std::stod(value);
        else if (key == "solver.max_iter")
          cfg.max_iter = std::stoi(value);
        else if (key == "solver.gmres_side")
          cfg.gmres_side = parse_side(value);
        else if (key == "workers")
          cfg.workers = std::stoi(value);
        else if (key == "quadrature")
          cfg.quadrature = std::stoi(value);
        else if (key == "counters")
          cfg.counters = (value == "1" || value == "true");
        else if (key == "bench.repetitions")
          cfg.repetitions = std::stoi(value);
        else if (key == "csv")
          cfg.csv_path = value;
        else
          throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key " + key);
      }
  }

  inline GlobalSolver make_solver(const RunConfig &cfg)
  {
    return setup_solver(cfg.dim, cfg.refinements, cfg.degree, cfg.delta, cfg.seed, cfg.local,
                        cfg.mg, cfg.workers, cfg.quadrature);
  }
} // namespace patchmg
