#pragma once

#include <patchmg/cell_kernel.hpp>
#include <patchmg/dofs.hpp>
#include <patchmg/geometry.hpp>

#include <Eigen/Sparse>

#include <vector>

namespace patchmg
{
  /// Matrix-free level operator for Eq. A_l u_l = b_l with homogeneous
  /// Dirichlet rows/columns treated as identity, so the operator stays
  /// square and SPD-compatible.
  struct LevelOperator
  {
    const MeshLevel     *mesh = nullptr;
    const DofMap        *dofs = nullptr;
    const GeometryCache *geom = nullptr;
    const CellEvaluator *eval = nullptr;
    int                  batch_width = 4;
  };

  /// v = A u, looping over cell batches: gather, sum-factorized cell apply,
  /// scatter-add. Constrained DoFs pass through as identity.
  inline void global_vmult(const LevelOperator &op,
                           const Vector        &u,
                           Vector              &v,
                           KernelScratch       &scratch,
                           Counters            &counters)
  {
    const DofMap &dofs = *op.dofs;
    const long    n    = dofs.n_dofs;
    const long    nc   = dofs.n_cell_dofs();

    // Columns of constrained DoFs are eliminated by zeroing the input copy.
    static thread_local Vector masked, u_cell, v_cell;
    masked.assign(u.begin(), u.end());
    for (long i = 0; i < n; ++i)
      if (dofs.boundary_mask[i])
        masked[i] = 0.0;

    v.assign(n, 0.0);
    u_cell.resize(nc);
    v_cell.resize(nc);

    const long n_cells = op.mesh->n_cells();
    const int  B       = op.batch_width > 0 ? op.batch_width : 1;
    for (long first = 0; first < n_cells; first += B)
      {
        const long last = std::min(n_cells, first + B);
        for (long cell = first; cell < last; ++cell)
          {
            const auto &cd = dofs.cell_dofs[cell];
            for (long i = 0; i < nc; ++i)
              u_cell[i] = masked[cd[i]];
            cell_apply_laplace(*op.eval, op.geom->kind[cell], op.geom->cell_data(cell),
                               u_cell.data(), v_cell.data(), scratch, counters);
            for (long i = 0; i < nc; ++i)
              v[cd[i]] += v_cell[i];
            counters.add_flops(nc);
          }
      }

    for (long i = 0; i < n; ++i)
      if (dofs.boundary_mask[i])
        v[i] = u[i];
  }

  /// Assembled sparse matrix with the identical quadrature, as the testing
  /// oracle for the matrix-free path. Element-by-element direct assembly;
  /// refuses sizes beyond desk scale.
  inline Eigen::SparseMatrix<double> assemble_oracle(const LevelOperator &op)
  {
    const DofMap &dofs = *op.dofs;
    if (dofs.n_dofs > 50000)
      throw std::runtime_error("assemble_oracle: problem too large for the assembled path");

    std::vector<Eigen::Triplet<double>> triplets;
    const long                          nc = dofs.n_cell_dofs();
    for (long cell = 0; cell < op.mesh->n_cells(); ++cell)
      {
        const Table A  = element_stiffness_matrix(*op.eval, *op.mesh, cell);
        const auto &cd = dofs.cell_dofs[cell];
        for (long i = 0; i < nc; ++i)
          for (long j = 0; j < nc; ++j)
            if (!dofs.boundary_mask[cd[i]] && !dofs.boundary_mask[cd[j]])
              triplets.emplace_back(cd[i], cd[j], A(int(i), int(j)));
      }
    for (long i = 0; i < dofs.n_dofs; ++i)
      if (dofs.boundary_mask[i])
        triplets.emplace_back(i, i, 1.0);

    Eigen::SparseMatrix<double> A(dofs.n_dofs, dofs.n_dofs);
    A.setFromTriplets(triplets.begin(), triplets.end());
    return A;
  }

  /// Right-hand side of the manufactured problem -lap u = f with
  /// u* = prod_k sin(pi x_k), f = d pi^2 u*, integrated with the operator's
  /// quadrature. Dirichlet entries are zero.
  inline Vector make_rhs(const LevelOperator &op)
  {
    const DofMap    &dofs = *op.dofs;
    const MeshLevel &mesh = *op.mesh;
    const Basis1D   &b    = op.eval->basis;
    const int        d    = mesh.dim;
    const double     pi   = 3.14159265358979323846;

    Vector             rhs(dofs.n_dofs, 0.0);
    const LatticeIndex qgrid(d, b.n_q);
    const LatticeIndex local(d, dofs.degree + 1);
    double             J[3][3];

    for (long cell = 0; cell < mesh.n_cells(); ++cell)
      {
        const auto &cd = dofs.cell_dofs[cell];
        for (long qi = 0; qi < qgrid.size(); ++qi)
          {
            const auto            qc = qgrid.coords(qi);
            std::array<double, 3> xh{b.quad_points[qc[0]], b.quad_points[qc[1]],
                                     d == 3 ? b.quad_points[qc[2]] : 0.0};
            cell_jacobian(mesh, cell, xh, J);
            double w = determinant(d, J);
            for (int k = 0; k < d; ++k)
              w *= b.quad_weights[qc[k]];
            const auto x = cell_point(mesh, cell, xh);
            double     f = d * pi * pi;
            for (int k = 0; k < d; ++k)
              f *= std::sin(pi * x[k]);

            for (long i = 0; i < local.size(); ++i)
              {
                const auto ic  = local.coords(i);
                double     phi = 1.0;
                for (int k = 0; k < d; ++k)
                  phi *= b.shape_values(qc[k], ic[k]);
                rhs[cd[i]] += f * phi * w;
              }
          }
      }
    for (long i = 0; i < dofs.n_dofs; ++i)
      if (dofs.boundary_mask[i])
        rhs[i] = 0.0;
    return rhs;
  }

  /// Interpolant of a smooth function on the level's DoF lattice (nodal
  /// values at the mapped Gauss-Lobatto points). Only meaningful on
  /// Cartesian levels where lattice points have closed-form locations.
  template <typename F>
  Vector interpolate_on_cartesian(const DofMap &dofs, const Basis1D &basis, F &&f)
  {
    const int          d = dofs.dim;
    const int          p = dofs.degree;
    const int          n = dofs.cells_per_axis;
    const LatticeIndex dgrid(d, dofs.dofs_per_axis());
    Vector             u(dgrid.size());
    const double       h = 1.0 / n;
    for (long i = 0; i < dgrid.size(); ++i)
      {
        const auto            c = dgrid.coords(i);
        std::array<double, 3> x{0, 0, 0};
        for (int k = 0; k < d; ++k)
          {
            const int cell_k  = std::min(c[k] / p, n - 1);
            const int local_k = c[k] - cell_k * p;
            x[k]              = h * cell_k + h * basis.nodes[local_k];
          }
        u[i] = f(x);
      }
    return u;
  }
} // namespace patchmg
