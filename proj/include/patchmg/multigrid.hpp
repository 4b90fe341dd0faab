#pragma once

#include <patchmg/global_operator.hpp>
#include <patchmg/h_transfer.hpp>
#include <patchmg/smoother.hpp>

#include <Eigen/SparseCholesky>

#include <memory>

namespace patchmg
{
  struct MgConfig
  {
    int pre_sweeps  = 1;
    int post_sweeps = 1;
  };

  /// Geometric multigrid solver state: per mesh level the DoF numbering,
  /// vertex patches with their coloring, the patch-solver data, and the
  /// matrix-free operator; plus h-transfers and a direct factorization on
  /// the coarsest (single-patch) level.
  struct GlobalSolver
  {
    MeshHierarchy mesh;
    int           degree = 1;

    struct LevelState
    {
      DofMap          dofs;
      PatchList       patches;
      Coloring        coloring;
      PatchSolverData pdata;
      LevelOperator   op;
    };
    std::vector<std::unique_ptr<LevelState>> levels;
    std::vector<HTransfer>                   transfers; // [l]: level l <-> l+1

    std::unique_ptr<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>> coarse_solver;

    MgConfig          mg;
    LocalSolverConfig local_config;

    std::vector<PatchWorkspace> workspaces;
    std::unique_ptr<ThreadPool> pool;
    KernelScratch               kernel;
    Counters                    counters;

    struct MgScratch
    {
      Vector u, b, r, s1, s2;
    };
    std::vector<MgScratch> scratch;

    int finest() const
    {
      return int(levels.size()) - 1;
    }

    /// Merge worker counters into the main ones (color barriers have
    /// passed); deterministic order.
    void collect_counters()
    {
      for (auto &ws : workspaces)
        {
          counters.merge(ws.counters);
          const bool on = ws.counters.enabled;
          ws.counters   = Counters(on);
        }
    }

    void enable_counters(bool on)
    {
      counters.enabled = on;
      for (auto &ws : workspaces)
        ws.counters.enabled = on;
    }
  };

  inline GlobalSolver setup_solver(int                      dim,
                                   int                      refinements,
                                   int                      degree,
                                   double                   delta,
                                   std::uint64_t            seed,
                                   const LocalSolverConfig &local_config,
                                   const MgConfig          &mg     = {},
                                   int                      workers = 1,
                                   int                      q_top   = 0)
  {
    GlobalSolver s;
    s.mesh = build_hierarchy(dim, refinements);
    if (delta > 0.0)
      distort(s.mesh, delta, seed);
    s.degree       = degree;
    s.mg           = mg;
    s.local_config = local_config;

    for (int l = 0; l <= refinements; ++l)
      {
        auto       state = std::make_unique<GlobalSolver::LevelState>();
        const auto &mesh = s.mesh.levels[l];
        state->dofs     = enumerate_dofs(mesh, degree);
        state->patches  = enumerate_patches(mesh, state->dofs);
        state->coloring = dsatur_color(state->patches);
        state->pdata =
          precompute_patch_solver_data(mesh, state->dofs, state->patches, local_config, q_top);
        state->op.mesh = &mesh;
        state->op.dofs = &state->dofs;
        state->op.geom = &state->pdata.geom.back();
        state->op.eval = &state->pdata.eval.back();
        s.levels.push_back(std::move(state));
      }

    Eigen::SparseMatrix<double> coarse = assemble_oracle(s.levels[0]->op);
    s.coarse_solver = std::make_unique<Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>>>();
    s.coarse_solver->compute(coarse);
    if (s.coarse_solver->info() != Eigen::Success)
      throw std::runtime_error("setup_solver: coarse factorization failed");

    for (int l = 0; l + 1 <= refinements; ++l)
      s.transfers.push_back(build_h_transfer(s.levels[l]->dofs, s.levels[l + 1]->dofs,
                                             s.levels[l]->pdata.eval.back().basis));

    s.pool = std::make_unique<ThreadPool>(workers);
    s.workspaces.resize(std::size_t(s.pool->size()));
    for (auto &ws : s.workspaces)
      ws.init(s.levels.back()->pdata);
    s.scratch.resize(s.levels.size());
    return s;
  }

  inline void coarse_direct_solve(GlobalSolver &s, const Vector &b, Vector &u)
  {
    Eigen::Map<const Eigen::VectorXd> bm(b.data(), long(b.size()));
    Eigen::VectorXd                   x = s.coarse_solver->solve(bm);
    u.assign(x.data(), x.data() + x.size());
  }

  /// Standard V-cycle with the multiplicative vertex-patch smoother on every
  /// level above the coarsest: pre-sweeps, restrict the residual, recurse,
  /// prolongate-and-add, post-sweeps. Zero initial guess; u is overwritten.
  inline void mg_vcycle(GlobalSolver &s, int level, const Vector &b, Vector &u)
  {
    if (level == 0)
      {
        coarse_direct_solve(s, b, u);
        return;
      }
    auto &state   = *s.levels[level];
    auto &scratch = s.scratch[level];
    auto &coarse  = s.scratch[level - 1];

    u.assign(state.dofs.n_dofs, 0.0);
    for (int sweep = 0; sweep < s.mg.pre_sweeps; ++sweep)
      smoother_sweep(state.pdata, u, b, state.coloring, s.workspaces, *s.pool);

    global_vmult(state.op, u, scratch.r, s.kernel, s.counters);
    for (long i = 0; i < state.dofs.n_dofs; ++i)
      scratch.r[i] = b[i] - scratch.r[i];

    h_restrict(s.transfers[level - 1], scratch.r, coarse.b, scratch.s1, scratch.s2, s.counters);
    const DofMap &cdofs = s.levels[level - 1]->dofs;
    for (long i = 0; i < cdofs.n_dofs; ++i)
      if (cdofs.boundary_mask[i])
        coarse.b[i] = 0.0;

    mg_vcycle(s, level - 1, coarse.b, coarse.u);

    h_prolongate(s.transfers[level - 1], coarse.u, scratch.r, scratch.s1, scratch.s2, s.counters);
    for (long i = 0; i < state.dofs.n_dofs; ++i)
      u[i] += scratch.r[i];

    for (int sweep = 0; sweep < s.mg.post_sweeps; ++sweep)
      smoother_sweep(state.pdata, u, b, state.coloring, s.workspaces, *s.pool);
  }
} // namespace patchmg
