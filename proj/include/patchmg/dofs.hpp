#pragma once

#include <patchmg/mesh.hpp>
#include <patchmg/types.hpp>

#include <vector>

namespace patchmg
{
  /// Continuous Q_p numbering on one structured level. Global DoFs form the
  /// lattice (p*n+1)^d, numbered lexicographically; per-cell indices are in
  /// lexicographic tensor order, so shared face/edge/vertex DoFs deduplicate
  /// by construction.
  struct DofMap
  {
    int  dim            = 2;
    int  degree         = 1;
    int  cells_per_axis = 0;
    long n_dofs         = 0;

    std::vector<std::vector<int>> cell_dofs;     // per cell, (p+1)^d entries
    std::vector<std::uint8_t>     boundary_mask; // 1 on the domain boundary

    int dofs_per_axis() const
    {
      return degree * cells_per_axis + 1;
    }
    long n_cell_dofs() const
    {
      return ipow(degree + 1, dim);
    }

    long lattice_index(const std::array<int, 3> &c) const
    {
      return LatticeIndex(dim, dofs_per_axis()).linear(c);
    }
  };

  inline DofMap enumerate_dofs(const MeshLevel &mesh, int p)
  {
    if (p < 1)
      throw std::invalid_argument("enumerate_dofs: degree must be >= 1");
    DofMap dofs;
    dofs.dim            = mesh.dim;
    dofs.degree         = p;
    dofs.cells_per_axis = mesh.cells_per_axis;

    const int          m = dofs.dofs_per_axis();
    const LatticeIndex dgrid(mesh.dim, m);
    dofs.n_dofs = dgrid.size();

    dofs.boundary_mask.assign(dofs.n_dofs, 0);
    for (long i = 0; i < dofs.n_dofs; ++i)
      {
        const auto c = dgrid.coords(i);
        for (int k = 0; k < mesh.dim; ++k)
          if (c[k] == 0 || c[k] == m - 1)
            dofs.boundary_mask[i] = 1;
      }

    const LatticeIndex cgrid(mesh.dim, mesh.cells_per_axis);
    const LatticeIndex local(mesh.dim, p + 1);
    dofs.cell_dofs.resize(cgrid.size());
    for (long cell = 0; cell < cgrid.size(); ++cell)
      {
        const auto cc = cgrid.coords(cell);
        auto      &cd = dofs.cell_dofs[cell];
        cd.resize(local.size());
        for (long l = 0; l < local.size(); ++l)
          {
            const auto lc = local.coords(l);
            cd[l]         = int(dgrid.linear(
              {cc[0] * p + lc[0], cc[1] * p + lc[1], cc[2] * p + lc[2]}));
          }
      }
    return dofs;
  }

  /// Vertex patches: one per interior vertex, holding the 2^d surrounding
  /// cells. Bit k of the patch-local cell index gives the cell's side along
  /// axis k (0 = low, 1 = high), matching the traversal convention of the
  /// patch distributors.
  struct PatchList
  {
    int dim            = 2;
    int degree         = 1;
    int cells_per_axis = 0;

    struct Patch
    {
      int                center_vertex = -1;
      std::array<int, 3> center_coord{0, 0, 0}; // vertex lattice coords
      std::array<int, 8> cells{};               // 2^dim used
    };
    std::vector<Patch> patches;

    long interior_size() const
    {
      return ipow(2 * degree - 1, dim);
    }

    /// Global DoF indices of the patch interior, lexicographic in patch
    /// coordinates. Used by oracles and the gather of inverse diagonals.
    std::vector<int> interior_dofs(const DofMap &dofs, int patch_index) const
    {
      const auto        &patch = patches[patch_index];
      const int          p     = dofs.degree;
      const LatticeIndex igrid(dim, 2 * p - 1);
      std::vector<int>   result(igrid.size());
      for (long i = 0; i < igrid.size(); ++i)
        {
          const auto c = igrid.coords(i);
          result[i]    = int(dofs.lattice_index({(patch.center_coord[0] - 1) * p + 1 + c[0],
                                                 (patch.center_coord[1] - 1) * p + 1 + c[1],
                                                 dim == 3 ? (patch.center_coord[2] - 1) * p + 1 + c[2] :
                                                            0}));
        }
      return result;
    }
  };

  inline PatchList enumerate_patches(const MeshLevel &mesh, const DofMap &dofs)
  {
    if (mesh.cells_per_axis < 2)
      throw std::invalid_argument("enumerate_patches: need at least 2 cells per axis");
    PatchList list;
    list.dim            = mesh.dim;
    list.degree         = dofs.degree;
    list.cells_per_axis = mesh.cells_per_axis;

    const int          n = mesh.cells_per_axis;
    const LatticeIndex inner(mesh.dim, n - 1);
    list.patches.resize(inner.size());
    for (long i = 0; i < inner.size(); ++i)
      {
        const auto         c = inner.coords(i);
        std::array<int, 3> vc{c[0] + 1, c[1] + 1, mesh.dim == 3 ? c[2] + 1 : 0};
        auto              &patch  = list.patches[i];
        patch.center_vertex       = int(mesh.vertex_index(vc));
        patch.center_coord        = vc;
        for (int b = 0; b < (1 << mesh.dim); ++b)
          patch.cells[b] = int(mesh.cell_index({vc[0] - 1 + (b & 1),
                                                vc[1] - 1 + ((b >> 1) & 1),
                                                mesh.dim == 3 ? vc[2] - 1 + ((b >> 2) & 1) : 0}));
      }
    return list;
  }
} // namespace patchmg
