#pragma once

#include <patchmg/coloring.hpp>
#include <patchmg/local_solver.hpp>
#include <patchmg/thread_pool.hpp>

#include <cstring>

namespace patchmg
{
  namespace local
  {
    /// Step 1+2: re-initialize the cell pipeline for this patch and fetch
    /// the data the evaluation and the local solver need: per-cell geometry
    /// and the inverse diagonals (plus scaling) of every p-level.
    inline void fetch_patch(const PatchSolverData &data, PatchWorkspace &ws, int patch_index)
    {
      const auto &patch   = data.patches->patches[patch_index];
      const int   n_cells = 1 << data.dim;

      for (int l = 0; l < data.seq.n_levels(); ++l)
        {
          auto      &b = ws.lv[l];
          const int  p = data.seq.degrees[l];
          internal::gather_patch_interior(data.inv_diag[l], data.dim, p,
                                          p * data.cells_per_axis + 1, patch.center_coord,
                                          b.inv_diag.data());
          if (!data.scale.empty() && !data.scale[l].empty())
            {
              const long is = data.interior_size(l);
              std::memcpy(b.scale.data(), data.scale[l].data() + patch_index * is,
                          is * sizeof(double));
            }

          const auto &g        = data.geom[l];
          const long  per_cell = long(b.geom.size()) / n_cells;
          for (int c = 0; c < n_cells; ++c)
            {
              const long cell = patch.cells[c];
              long       len  = 0;
              switch (g.kind[cell])
                {
                  case CellGeometry::cartesian:
                    len = g.cartesian_stride();
                    break;
                  case CellGeometry::affine:
                    len = g.affine_stride();
                    break;
                  default:
                    len = g.general_stride();
                }
              std::memcpy(b.geom.data() + c * per_cell, g.cell_data(cell), len * sizeof(double));
              b.geom_ptr[c]  = b.geom.data() + c * per_cell;
              b.geom_kind[c] = g.kind[cell];
            }
        }
    }

    /// Step 3: collect u and b for all cells of the patch.
    inline void gather_patch(const PatchSolverData &data,
                             PatchWorkspace        &ws,
                             int                    patch_index,
                             const Vector          &u,
                             const Vector          &b)
    {
      const auto &patch = data.patches->patches[patch_index];
      const int   top   = data.seq.top();
      auto       &lb    = ws.lv[top];
      const long  cs    = data.cell_size(top);

      for (int c = 0; c < (1 << data.dim); ++c)
        {
          const auto &cd = data.dofs->cell_dofs[patch.cells[c]];
          for (long i = 0; i < cs; ++i)
            {
              lb.in_cells[c * cs + i] = u[cd[i]];
              lb.b_cells[c * cs + i]  = b[cd[i]];
            }
        }
    }

    /// Step 5: assemble the interior residual r_j = Pi_j b - Pi_j A u from
    /// the cell-local operator outputs.
    inline void local_residual(const PatchSolverData &data, PatchWorkspace &ws)
    {
      const int  top = data.seq.top();
      auto      &lb  = ws.lv[top];
      const long cs  = data.cell_size(top);
      const long n   = data.interior_size(top);

      gather_from_cells(data, ws, top, lb.rhs.data());

      const double *bc  = lb.b_cells.data();
      double       *rhs = lb.rhs.data();
      auto reg  = [&](long ip, int c, long ic) { rhs[ip] = bc[c * cs + ic] - rhs[ip]; };
      auto dup  = [](long, int, long) {};
      auto skip = [](int, long) {};
      if (data.config.distributor == DistributorKind::lookup)
        traverse_lookup(data.lookup[top], reg, dup, skip);
      else
        for (int c = 0; c < (1 << data.dim); ++c)
          traverse_dynamic(data.dim, data.seq.degrees[top], c, reg, dup, skip);
      ws.counters.add_flops(n);
    }

    /// Step 7a: distribute the correction into cell buffers, masking
    /// duplicated and exterior slots so every global DoF is updated once.
    inline void distribute_correction(const PatchSolverData &data, PatchWorkspace &ws)
    {
      const int  top = data.seq.top();
      auto      &lb  = ws.lv[top];
      const long cs  = data.cell_size(top);

      const double *sol = lb.sol.data();
      double       *in  = lb.in_cells.data();
      auto reg  = [&](long ip, int c, long ic) { in[c * cs + ic] = sol[ip]; };
      auto dup  = [&](long, int c, long ic) { in[c * cs + ic] = 0.0; };
      auto skip = [&](int c, long ic) { in[c * cs + ic] = 0.0; };
      if (data.config.distributor == DistributorKind::lookup)
        traverse_lookup(data.lookup[top], reg, dup, skip);
      else
        for (int c = 0; c < (1 << data.dim); ++c)
          traverse_dynamic(data.dim, data.seq.degrees[top], c, reg, dup, skip);
    }

    /// Step 7b: add the masked cell buffers into the global solution.
    inline void scatter_patch(const PatchSolverData &data,
                              PatchWorkspace        &ws,
                              int                    patch_index,
                              Vector                &u)
    {
      const auto &patch = data.patches->patches[patch_index];
      const int   top   = data.seq.top();
      auto       &lb    = ws.lv[top];
      const long  cs    = data.cell_size(top);

      for (int c = 0; c < (1 << data.dim); ++c)
        {
          const auto &cd = data.dofs->cell_dofs[patch.cells[c]];
          for (long i = 0; i < cs; ++i)
            u[cd[i]] += lb.in_cells[c * cs + i];
        }
      ws.counters.add_flops(std::uint64_t(1 << data.dim) * cs);
    }
  } // namespace local

  /// One multiplicative update of a single patch: the seven steps of the
  /// smoother pipeline with phase attribution.
  inline void apply_patch(const PatchSolverData &data,
                          PatchWorkspace        &ws,
                          int                    patch_index,
                          Vector                &u,
                          const Vector          &b)
  {
    {
      PhaseScope scope(ws.counters, Phase::fetch_setup);
      local::fetch_patch(data, ws, patch_index);
    }
    {
      PhaseScope scope(ws.counters, Phase::gather_global);
      local::gather_patch(data, ws, patch_index, u, b);
    }
    {
      PhaseScope scope(ws.counters, Phase::evaluate_operator);
      local::apply_cells(data, ws, data.seq.top());
    }
    {
      PhaseScope scope(ws.counters, Phase::local_gather);
      local::local_residual(data, ws);
    }
    {
      PhaseScope scope(ws.counters, Phase::pmg_solve);
      local::local_solve(data, ws);
    }
    {
      PhaseScope scope(ws.counters, Phase::distribute_correction);
      local::distribute_correction(data, ws);
    }
    {
      PhaseScope scope(ws.counters, Phase::scatter_global);
      local::scatter_patch(data, ws, patch_index, u);
    }
  }

  /// One multiplicative sweep over all patches, color by color. Within a
  /// color, writes touch disjoint DoF sets and reads are never written, so
  /// parallel execution reproduces the sequential result.
  inline void smoother_sweep(const PatchSolverData       &data,
                             Vector                      &u,
                             const Vector                &b,
                             const Coloring              &coloring,
                             std::vector<PatchWorkspace> &workspaces,
                             ThreadPool                  &pool)
  {
    for (const auto &group : coloring.groups)
      pool.parallel_for(long(group.size()), [&](int w, long lo, long hi) {
        for (long i = lo; i < hi; ++i)
          apply_patch(data, workspaces[w], group[i], u, b);
      });
  }
} // namespace patchmg
