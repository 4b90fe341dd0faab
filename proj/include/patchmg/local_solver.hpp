#pragma once

#include <patchmg/p_hierarchy.hpp>

#include <cstring>
#include <vector>

namespace patchmg
{
  /// Per-worker scratch for the whole patch pipeline, preallocated once and
  /// reused across patches. Buffers exist per p-level; cell buffers hold the
  /// 2^d cells contiguously.
  struct PatchWorkspace
  {
    struct LevelBuffers
    {
      Vector in_cells;  // 2^d x (p_l+1)^d
      Vector out_cells;
      Vector b_cells; // gathered right-hand side (top level only)

      Vector r, d, res, e, rhs, sol; // patch-interior vectors
      Vector inv_diag;               // gathered inverse diagonal
      Vector scale;                  // gathered Cartesian-reinforced scaling
      Vector t1, t2, t3;             // transfer / FDM / smoother scratch

      std::vector<double>             geom; // fetched per-cell geometry
      std::array<const double *, 8>   geom_ptr{};
      std::array<CellGeometry, 8>     geom_kind{};
    };

    std::vector<LevelBuffers> lv;
    KernelScratch             kernel;
    Counters                  counters;

    void init(const PatchSolverData &data)
    {
      const int n_cells = 1 << data.dim;
      lv.resize(data.seq.n_levels());
      for (int l = 0; l < data.seq.n_levels(); ++l)
        {
          auto      &b  = lv[l];
          const long cs = data.cell_size(l);
          const long is = data.interior_size(l);
          b.in_cells.resize(n_cells * cs);
          b.out_cells.resize(n_cells * cs);
          if (l == data.seq.n_levels() - 1)
            b.b_cells.resize(n_cells * cs);
          for (Vector *v : {&b.r, &b.d, &b.res, &b.e, &b.rhs, &b.sol, &b.inv_diag, &b.scale})
            v->resize(is);
          // transfers into this level and FDM sweeps need full-size scratch
          for (Vector *v : {&b.t1, &b.t2, &b.t3})
            v->resize(is);

          const auto &g = data.geom[l];
          const long  per_cell =
            std::max<long>({g.cartesian_stride(), g.affine_stride(), g.general_stride()});
          b.geom.resize(std::size_t(n_cells) * per_cell);
        }
    }
  };

  namespace local
  {
    /// Distribute a patch-interior vector into the cell buffers: owned and
    /// duplicated slots receive the value, exterior slots zero.
    inline void distribute_to_cells(const PatchSolverData &data,
                                    PatchWorkspace        &ws,
                                    int                    l,
                                    const double          *x)
    {
      auto      &b  = ws.lv[l];
      const long cs = data.cell_size(l);
      double    *in = b.in_cells.data();

      auto reg  = [&](long ip, int c, long ic) { in[c * cs + ic] = x[ip]; };
      auto dup  = [&](long ip, int c, long ic) { in[c * cs + ic] = x[ip]; };
      auto skip = [&](int c, long ic) { in[c * cs + ic] = 0.0; };

      if (data.config.distributor == DistributorKind::lookup)
        traverse_lookup(data.lookup[l], reg, dup, skip);
      else
        for (int c = 0; c < (1 << data.dim); ++c)
          traverse_dynamic(data.dim, data.seq.degrees[l], c, reg, dup, skip);
    }

    /// Sum cell contributions back into a patch-interior vector: owners
    /// write, duplicates accumulate, exterior slots are dropped.
    inline void gather_from_cells(const PatchSolverData &data,
                                  PatchWorkspace        &ws,
                                  int                    l,
                                  double                *y)
    {
      auto         &b    = ws.lv[l];
      const long    cs   = data.cell_size(l);
      const double *out  = b.out_cells.data();
      std::uint64_t dups = 0;

      auto reg  = [&](long ip, int c, long ic) { y[ip] = out[c * cs + ic]; };
      auto dup  = [&](long ip, int c, long ic) {
        y[ip] += out[c * cs + ic];
        ++dups;
      };
      auto skip = [](int, long) {};

      if (data.config.distributor == DistributorKind::lookup)
        traverse_lookup(data.lookup[l], reg, dup, skip);
      else
        for (int c = 0; c < (1 << data.dim); ++c)
          traverse_dynamic(data.dim, data.seq.degrees[l], c, reg, dup, skip);
      ws.counters.add_flops(dups);
    }

    inline void apply_cells(const PatchSolverData &data, PatchWorkspace &ws, int l)
    {
      auto      &b  = ws.lv[l];
      const long cs = data.cell_size(l);
      for (int c = 0; c < (1 << data.dim); ++c)
        cell_apply_laplace(data.eval[l], b.geom_kind[c], b.geom_ptr[c],
                           b.in_cells.data() + c * cs, b.out_cells.data() + c * cs, ws.kernel,
                           ws.counters);
    }

    /// A_{j,p_l} x on the patch interior: distribute, batched cell apply,
    /// gather-sum. The core kernel of the local solver.
    inline void local_vmult(const PatchSolverData &data,
                            PatchWorkspace        &ws,
                            int                    l,
                            const double          *x,
                            double                *y)
    {
      ws.counters.count_level_vmult(l);
      distribute_to_cells(data, ws, l, x);
      apply_cells(data, ws, l);
      gather_from_cells(data, ws, l, y);
    }

    /// One smoothing application: out = omega P^{-1} in. Jacobi multiplies
    /// by the fetched inverse diagonal; the Cartesian-reinforced variant
    /// wraps the reference-patch FDM inverse in the symmetric scaling
    /// S = sqrt(d_ref / d_act).
    inline void smooth_apply(const PatchSolverData &data,
                             PatchWorkspace        &ws,
                             int                    l,
                             const double          *in,
                             double                *out)
    {
      auto      &b     = ws.lv[l];
      const long n     = data.interior_size(l);
      const double omega = data.config.omega;

      if (data.config.smoother == LocalSmoother::jacobi)
        {
          const double *invd = b.inv_diag.data();
          for (long i = 0; i < n; ++i)
            out[i] = omega * invd[i] * in[i];
          ws.counters.add_flops(2 * n);
          return;
        }

      const double *s = b.scale.data();
      for (long i = 0; i < n; ++i)
        b.t3[i] = s[i] * in[i];
      fdm_apply(data.fdm[l], b.t3.data(), out, b.t1, b.t2, ws.counters);
      for (long i = 0; i < n; ++i)
        out[i] *= omega * s[i];
      ws.counters.add_flops(3 * n);
    }

    /// e_fine = (x)T e_coarse between consecutive p-levels, d sweeps of the
    /// 1D transfer with recorded zeros skipped (configurable).
    inline void p_prolongate(const PatchSolverData &data,
                             PatchWorkspace        &ws,
                             int                    l_coarse,
                             const double          *in,
                             double                *out)
    {
      const PTransfer1D &t  = data.transfer[l_coarse];
      const int          d  = data.dim;
      const int          mc = 2 * t.p_coarse - 1;
      auto              &fb = ws.lv[l_coarse + 1];

      std::array<int, 3> ext{mc, mc, d == 3 ? mc : 1};
      const double      *cur = in;
      for (int k = 0; k < d; ++k)
        {
          double *dst = (k == d - 1) ? out : (k % 2 == 0 ? fb.t1.data() : fb.t2.data());
          if (data.config.exploit_transfer_zeros)
            internal::sweep_csr(t.nonzeros, d, k, ext, cur, dst, ws.counters);
          else
            sweep_dense(t.full, d, k, ext, cur, dst, false, ws.counters);
          ext[k] = 2 * t.p_fine - 1;
          cur    = dst;
        }
    }

    /// r_coarse = T^T r_fine.
    inline void p_restrict(const PatchSolverData &data,
                           PatchWorkspace        &ws,
                           int                    l_coarse,
                           const double          *in,
                           double                *out)
    {
      const PTransfer1D &t  = data.transfer[l_coarse];
      const int          d  = data.dim;
      const int          mf = 2 * t.p_fine - 1;
      auto              &fb = ws.lv[l_coarse + 1];

      std::array<int, 3> ext{mf, mf, d == 3 ? mf : 1};
      const double      *cur = in;
      for (int k = 0; k < d; ++k)
        {
          double *dst = (k == d - 1) ? out : (k % 2 == 0 ? fb.t1.data() : fb.t2.data());
          if (data.config.exploit_transfer_zeros)
            internal::sweep_csr(t.nonzeros_t, d, k, ext, cur, dst, ws.counters);
          else
            sweep_dense(t.full_t, d, k, ext, cur, dst, false, ws.counters);
          ext[k] = 2 * t.p_coarse - 1;
          cur    = dst;
        }
    }

    /// Exact coarse solve: the p=1 interior system is 1x1, a single scalar
    /// multiplication by the stored inverse.
    inline void coarse_solve(const PatchSolverData &data, PatchWorkspace &ws)
    {
      auto &b = ws.lv[0];
      b.d[0]  = b.inv_diag[0] * b.r[0];
      ws.counters.add_flops(1);
    }

    /// The p-multigrid V-cycle with zero initial guess: pre-smooth,
    /// residual, restrict, recurse, prolongate-and-add, and (full cycle
    /// only) one more residual plus post-smoothing. Reads lv[l].r, leaves
    /// the correction in lv[l].d.
    inline void p_v_cycle(const PatchSolverData &data, PatchWorkspace &ws, int l)
    {
      if (l == 0)
        {
          coarse_solve(data, ws);
          return;
        }
      auto      &b = ws.lv[l];
      const long n = data.interior_size(l);

      smooth_apply(data, ws, l, b.r.data(), b.d.data());

      local_vmult(data, ws, l, b.d.data(), b.res.data());
      for (long i = 0; i < n; ++i)
        b.res[i] = b.r[i] - b.res[i];
      ws.counters.add_flops(n);

      p_restrict(data, ws, l - 1, b.res.data(), ws.lv[l - 1].r.data());
      p_v_cycle(data, ws, l - 1);
      p_prolongate(data, ws, l - 1, ws.lv[l - 1].d.data(), b.e.data());
      for (long i = 0; i < n; ++i)
        b.d[i] += b.e[i];
      ws.counters.add_flops(n);

      const bool post = (data.config.mode == CycleMode::full) && !data.config.disable_post_smoothing;
      if (post)
        {
          local_vmult(data, ws, l, b.d.data(), b.res.data());
          for (long i = 0; i < n; ++i)
            b.res[i] = b.r[i] - b.res[i];
          smooth_apply(data, ws, l, b.res.data(), b.e.data());
          for (long i = 0; i < n; ++i)
            b.d[i] += b.e[i];
          ws.counters.add_flops(2 * n);
        }
    }

    /// Local preconditioned Richardson: the first cycle runs outside the
    /// loop (zero initial guess needs no residual vmult); remaining
    /// iterations recompute the residual, precondition with one cycle, and
    /// accumulate. Reads lv[top].rhs, leaves the correction in lv[top].sol.
    inline void local_solve(const PatchSolverData &data, PatchWorkspace &ws)
    {
      const int  top = data.seq.top();
      auto      &b   = ws.lv[top];
      const long n   = data.interior_size(top);

      const bool direct_fdm = (data.config.smoother == LocalSmoother::fdm);

      auto apply_inverse = [&]() {
        if (direct_fdm)
          fdm_apply(data.fdm[top], b.r.data(), b.d.data(), b.t1, b.t2, ws.counters);
        else
          p_v_cycle(data, ws, top);
      };

      std::copy(b.rhs.begin(), b.rhs.end(), b.r.begin());
      apply_inverse();
      std::copy(b.d.begin(), b.d.end(), b.sol.begin());

      for (int k = 2; k <= data.config.iterations; ++k)
        {
          local_vmult(data, ws, top, b.sol.data(), b.r.data());
          for (long i = 0; i < n; ++i)
            b.r[i] = b.rhs[i] - b.r[i];
          ws.counters.add_flops(n);
          apply_inverse();
          for (long i = 0; i < n; ++i)
            b.sol[i] += b.d[i];
          ws.counters.add_flops(n);
        }
    }
  } // namespace local
} // namespace patchmg
