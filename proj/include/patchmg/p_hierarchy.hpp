#pragma once

#include <patchmg/cell_kernel.hpp>
#include <patchmg/distributor.hpp>
#include <patchmg/dofs.hpp>
#include <patchmg/fdm.hpp>
#include <patchmg/geometry.hpp>

#include <cmath>
#include <vector>

namespace patchmg
{
  /// Degrees of the local p-hierarchy: ascending from 1 following
  /// p_{l+1} = 2 p_l + 1 while that stays below the target, with the last
  /// step clamped to the target. Examples: 7 -> [1,3,7], 4 -> [1,3,4].
  struct PSequence
  {
    std::vector<int> degrees;

    int n_levels() const
    {
      return int(degrees.size());
    }
    int top() const
    {
      return n_levels() - 1;
    }
  };

  inline PSequence build_psequence(int p)
  {
    if (p < 1)
      throw std::invalid_argument("build_psequence: degree must be >= 1");
    PSequence s;
    s.degrees.push_back(1);
    while (2 * s.degrees.back() + 1 < p)
      s.degrees.push_back(2 * s.degrees.back() + 1);
    if (s.degrees.back() != p)
      s.degrees.push_back(p);
    return s;
  }

  /// 1D transfer between consecutive p-levels on the two-cell patch line.
  /// Rows are fine interior nodes, columns coarse interior basis functions;
  /// entries where the coarse function's support does not reach the fine
  /// node are exact zeros and recorded as such.
  struct PTransfer1D
  {
    int p_coarse = 1;
    int p_fine   = 1;

    Table           full;   // (2 p_fine - 1) x (2 p_coarse - 1)
    Table           full_t;
    internal::Csr1D nonzeros; // same operator with zeros dropped
    internal::Csr1D nonzeros_t;
    double          zero_fraction = 0.0;

    std::size_t stored_doubles() const
    {
      return full.data.size() + full_t.data.size() + nonzeros.val.size() +
             nonzeros_t.val.size();
    }
  };

  inline PTransfer1D build_p_transfer(const Basis1D &coarse, const Basis1D &fine)
  {
    const int pc = coarse.degree, pf = fine.degree;
    const int mc = 2 * pc - 1, mf = 2 * pf - 1;

    PTransfer1D t;
    t.p_coarse = pc;
    t.p_fine   = pf;
    t.full     = Table(mf, mc);

    // Fine interior node f: local node index within its cell and side.
    auto fine_local = [&](int f) -> std::pair<int, int> {
      if (f < pf - 1)
        return {0, f + 1}; // left cell, node f+1
      if (f == pf - 1)
        return {-1, 0}; // center
      return {1, f - pf + 1}; // right cell
    };

    for (int c = 0; c < mc; ++c)
      for (int f = 0; f < mf; ++f)
        {
          const auto [side, node] = fine_local(f);
          double value            = 0.0;
          if (c < pc - 1)
            {
              // coarse function supported on the left cell only
              if (side == 0)
                value = internal::lagrange_value(coarse.nodes, c + 1, fine.nodes[node]);
            }
          else if (c == pc - 1)
            {
              // center function spans both cells
              if (side == 0)
                value = internal::lagrange_value(coarse.nodes, pc, fine.nodes[node]);
              else if (side == -1)
                value = 1.0;
              else
                value = internal::lagrange_value(coarse.nodes, 0, fine.nodes[node]);
            }
          else
            {
              // right cell only
              if (side == 1)
                value = internal::lagrange_value(coarse.nodes, c - pc + 1, fine.nodes[node]);
            }
          t.full(f, c) = value;
        }

    // Record the zero structure.
    int zeros = 0;
    t.nonzeros.n_rows = mf;
    t.nonzeros.n_cols = mc;
    t.nonzeros.row_ptr.assign(mf + 1, 0);
    for (int f = 0; f < mf; ++f)
      {
        for (int c = 0; c < mc; ++c)
          {
            if (t.full(f, c) == 0.0)
              ++zeros;
            else
              {
                t.nonzeros.col.push_back(c);
                t.nonzeros.val.push_back(t.full(f, c));
              }
          }
        t.nonzeros.row_ptr[f + 1] = int(t.nonzeros.col.size());
      }
    t.zero_fraction = double(zeros) / (double(mf) * mc);
    t.full_t        = t.full.transposed();
    t.nonzeros_t    = t.nonzeros.transposed();
    return t;
  }

  enum class CycleMode
  {
    full,
    half
  };

  enum class LocalSmoother
  {
    jacobi,
    cartesian_reinforced,
    fdm
  };

  struct LocalSolverConfig
  {
    CycleMode       mode        = CycleMode::full;
    LocalSmoother   smoother    = LocalSmoother::jacobi;
    int             iterations  = 1;
    double          omega       = 0.7;
    DistributorKind distributor = DistributorKind::dynamic_traversal;
    bool            exploit_transfer_zeros = true;
    bool            disable_post_smoothing = false; // forces full == half, for testing
  };

  /// All per-mesh-level data of the patch solver: evaluators and geometry
  /// per p-level, global inverse diagonals, 1D p-transfers, lookup tables,
  /// and the fast-diagonalization data of the level's reference Cartesian
  /// patch. Immutable after precompute; patches gather their interior views
  /// during the fetch step.
  struct PatchSolverData
  {
    int dim            = 2;
    int cells_per_axis = 0;

    const MeshLevel *mesh    = nullptr;
    const DofMap    *dofs    = nullptr; // target degree
    const PatchList *patches = nullptr;

    PSequence                  seq;
    std::vector<CellEvaluator> eval;     // per p-level
    std::vector<GeometryCache> geom;     // per p-level
    std::vector<Vector>        inv_diag; // per p-level, full DoF lattice
    std::vector<PTransfer1D>   transfer; // [l]: level l -> l+1
    std::vector<LookupTables>  lookup;   // per p-level
    std::vector<FDMData>       fdm;      // per p-level
    std::vector<Vector>        ref_diag; // per p-level, (2p_l-1)^d
    std::vector<Vector>        scale;    // per p-level, per patch: sqrt(d_ref/d_act)

    LocalSolverConfig config;

    // Set when the FDM solver runs on non-Cartesian geometry, where it is
    // only a reference-patch approximation.
    bool fdm_is_approximate = false;

    long interior_size(int level) const
    {
      return ipow(2 * seq.degrees[level] - 1, dim);
    }
    long cell_size(int level) const
    {
      return ipow(seq.degrees[level] + 1, dim);
    }
  };

  namespace internal
  {
    /// Global operator diagonal on the (p_l n + 1)^d lattice, inverted on
    /// interior entries. Every patch-interior DoF has all of its support
    /// cells inside the patch, so the local patch diagonal equals a gather
    /// of this global diagonal.
    inline Vector build_inverse_diagonal(const MeshLevel     &mesh,
                                         const CellEvaluator &ev,
                                         const GeometryCache &geom)
    {
      const int          d = mesh.dim;
      const int          p = ev.degree;
      const int          n = mesh.cells_per_axis;
      const int          m = p * n + 1;
      const LatticeIndex dgrid(d, m);
      const LatticeIndex cgrid(d, n);
      const LatticeIndex local(d, p + 1);

      Vector              diag(dgrid.size(), 0.0);
      std::vector<double> cell_diag(local.size());
      for (long cell = 0; cell < cgrid.size(); ++cell)
        {
          const auto cc = cgrid.coords(cell);
          cell_diagonal(ev, geom.kind[cell], geom.cell_data(cell), cell_diag.data());
          for (long i = 0; i < local.size(); ++i)
            {
              const auto lc = local.coords(i);
              diag[dgrid.linear({cc[0] * p + lc[0], cc[1] * p + lc[1], cc[2] * p + lc[2]})] +=
                cell_diag[i];
            }
        }

      for (long i = 0; i < dgrid.size(); ++i)
        {
          const auto c        = dgrid.coords(i);
          bool       boundary = false;
          for (int k = 0; k < d; ++k)
            boundary |= (c[k] == 0 || c[k] == m - 1);
          if (boundary)
            diag[i] = 1.0;
          else
            {
              if (diag[i] <= 0.0)
                throw std::runtime_error("singular diagonal in patch solver precompute");
              diag[i] = counted_div(1.0, diag[i]);
            }
        }
      return diag;
    }

    /// Diagonal of the separable reference-patch operator from the 1D
    /// stiffness/mass diagonals.
    inline Vector build_reference_diagonal(const FDMData &f)
    {
      const LatticeIndex igrid(f.dim, f.m);
      Vector             d(igrid.size(), 0.0);
      for (long i = 0; i < igrid.size(); ++i)
        {
          const auto c = igrid.coords(i);
          double     s = 0;
          for (int m = 0; m < f.dim; ++m)
            {
              double prod = f.stiffness_1d(c[m], c[m]);
              for (int k = 0; k < f.dim; ++k)
                if (k != m)
                  prod *= f.mass_1d(c[k], c[k]);
              s += prod;
            }
          d[i] = s;
        }
      return d;
    }

    /// Gather the interior lattice view of a per-level vector for one patch.
    inline void gather_patch_interior(const Vector             &lattice,
                                      int                       dim,
                                      int                       p_level,
                                      int                       lattice_m,
                                      const std::array<int, 3> &center,
                                      double                   *out)
    {
      const LatticeIndex igrid(dim, 2 * p_level - 1);
      const LatticeIndex dgrid(dim, lattice_m);
      for (long i = 0; i < igrid.size(); ++i)
        {
          const auto c = igrid.coords(i);
          out[i]       = lattice[dgrid.linear({(center[0] - 1) * p_level + 1 + c[0],
                                               (center[1] - 1) * p_level + 1 + c[1],
                                               dim == 3 ? (center[2] - 1) * p_level + 1 + c[2] : 0})];
        }
    }
  } // namespace internal

  /// Precompute all patch-solver data for one mesh level. Divisions and
  /// eigensolves are confined to this phase.
  inline PatchSolverData precompute_patch_solver_data(const MeshLevel         &mesh,
                                                      const DofMap            &dofs,
                                                      const PatchList         &patches,
                                                      const LocalSolverConfig &config,
                                                      int                      q_top = 0)
  {
    PatchSolverData data;
    data.dim            = mesh.dim;
    data.cells_per_axis = mesh.cells_per_axis;
    data.mesh           = &mesh;
    data.dofs           = &dofs;
    data.patches        = &patches;
    data.config         = config;
    data.seq            = build_psequence(dofs.degree);

    const int n_levels = data.seq.n_levels();
    data.eval.reserve(n_levels);
    for (int l = 0; l < n_levels; ++l)
      {
        const int p = data.seq.degrees[l];
        const int q = (l == n_levels - 1 && q_top > 0) ? q_top : 0;
        data.eval.push_back(make_cell_evaluator(mesh.dim, p, q));
        data.geom.push_back(classify_geometry(mesh, data.eval[l].basis));
        data.inv_diag.push_back(
          internal::build_inverse_diagonal(mesh, data.eval[l], data.geom[l]));
        data.lookup.push_back(build_lookup(mesh.dim, p));
        data.fdm.push_back(build_fdm(data.eval[l].basis, mesh.dim, 1.0 / mesh.cells_per_axis));
        data.ref_diag.push_back(internal::build_reference_diagonal(data.fdm[l]));
      }
    for (int l = 0; l + 1 < n_levels; ++l)
      data.transfer.push_back(build_p_transfer(data.eval[l].basis, data.eval[l + 1].basis));

    if (config.smoother == LocalSmoother::fdm)
      for (const auto k : data.geom.back().kind)
        if (k != CellGeometry::cartesian)
          {
            data.fdm_is_approximate = true;
            break;
          }

    // Per-patch symmetric scaling of the Cartesian-reinforced smoother.
    if (config.smoother == LocalSmoother::cartesian_reinforced)
      {
        data.scale.resize(n_levels);
        for (int l = 0; l < n_levels; ++l)
          {
            const int  p       = data.seq.degrees[l];
            const long in_size = data.interior_size(l);
            data.scale[l].resize(in_size * patches.patches.size());
            Vector d_act(in_size);
            for (std::size_t j = 0; j < patches.patches.size(); ++j)
              {
                internal::gather_patch_interior(data.inv_diag[l], mesh.dim, p,
                                                p * mesh.cells_per_axis + 1,
                                                patches.patches[j].center_coord, d_act.data());
                for (long i = 0; i < in_size; ++i)
                  data.scale[l][j * in_size + i] =
                    std::sqrt(data.ref_diag[l][i] * d_act[i]); // d_act holds 1/diag
              }
          }
      }
    return data;
  }
} // namespace patchmg
