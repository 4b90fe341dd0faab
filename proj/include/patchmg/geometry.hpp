#pragma once

#include <patchmg/basis.hpp>
#include <patchmg/counters.hpp>
#include <patchmg/mesh.hpp>
#include <patchmg/types.hpp>

#include <vector>

namespace patchmg
{
  enum class CellGeometry : std::uint8_t
  {
    cartesian,
    affine,
    general
  };

  /// Per-cell geometric factors for one (mesh level, quadrature) pair.
  ///
  /// cartesian: [h_0..h_{d-1}, detJ/h_0^2..detJ/h_{d-1}^2, detJ]   (2d+1)
  /// affine:    [J_inv row-major (d^2), detJ]                      (d^2+1)
  /// general:   per quadrature point [J_inv row-major, detJ*w_q]   (d^2+1)
  ///
  /// The cartesian entries beyond the d edge lengths keep the smoother hot
  /// path free of divisions; all inverses are formed here.
  struct GeometryCache
  {
    int dim = 2;
    int n_q = 0; // quadrature points per axis

    std::vector<CellGeometry> kind;
    std::vector<long>         offset; // per cell, into the matching pool
    std::vector<double>       cartesian_data;
    std::vector<double>       affine_data;
    std::vector<double>       general_data;

    long cartesian_stride() const
    {
      return 2 * dim + 1;
    }
    long affine_stride() const
    {
      return dim * dim + 1;
    }
    long general_stride() const
    {
      return ipow(n_q, dim) * (dim * dim + 1);
    }

    const double *cell_data(long cell) const
    {
      switch (kind[cell])
        {
          case CellGeometry::cartesian:
            return cartesian_data.data() + offset[cell];
          case CellGeometry::affine:
            return affine_data.data() + offset[cell];
          default:
            return general_data.data() + offset[cell];
        }
    }

    std::size_t stored_doubles() const
    {
      return cartesian_data.size() + affine_data.size() + general_data.size();
    }
  };

  namespace internal
  {
    inline void invert(int d, const double J[3][3], double Jinv[3][3], double det)
    {
      if (d == 2)
        {
          const double inv_det = counted_div(1.0, det);
          Jinv[0][0]           = J[1][1] * inv_det;
          Jinv[0][1]           = -J[0][1] * inv_det;
          Jinv[1][0]           = -J[1][0] * inv_det;
          Jinv[1][1]           = J[0][0] * inv_det;
          return;
        }
      const double inv_det = counted_div(1.0, det);
      Jinv[0][0]           = (J[1][1] * J[2][2] - J[1][2] * J[2][1]) * inv_det;
      Jinv[0][1]           = (J[0][2] * J[2][1] - J[0][1] * J[2][2]) * inv_det;
      Jinv[0][2]           = (J[0][1] * J[1][2] - J[0][2] * J[1][1]) * inv_det;
      Jinv[1][0]           = (J[1][2] * J[2][0] - J[1][0] * J[2][2]) * inv_det;
      Jinv[1][1]           = (J[0][0] * J[2][2] - J[0][2] * J[2][0]) * inv_det;
      Jinv[1][2]           = (J[0][2] * J[1][0] - J[0][0] * J[1][2]) * inv_det;
      Jinv[2][0]           = (J[1][0] * J[2][1] - J[1][1] * J[2][0]) * inv_det;
      Jinv[2][1]           = (J[0][1] * J[2][0] - J[0][0] * J[2][1]) * inv_det;
      Jinv[2][2]           = (J[0][0] * J[1][1] - J[0][1] * J[1][0]) * inv_det;
    }

    /// Exact coordinate test: all corners on an axis-aligned box grid.
    inline bool is_cartesian_cell(const MeshLevel &mesh, long cell, double h[3])
    {
      const int   d  = mesh.dim;
      const auto &v0 = mesh.vertices[mesh.cells[cell][0]];
      for (int k = 0; k < d; ++k)
        {
          const auto &vk = mesh.vertices[mesh.cells[cell][1 << k]];
          h[k]           = vk[k] - v0[k];
          if (h[k] <= 0)
            return false;
        }
      for (int b = 0; b < (1 << d); ++b)
        {
          const auto &v = mesh.vertices[mesh.cells[cell][b]];
          for (int k = 0; k < d; ++k)
            {
              const double expected = v0[k] + (((b >> k) & 1) ? h[k] : 0.0);
              if (v[k] != expected)
                return false;
            }
        }
      return true;
    }

    /// Exact parallelepiped test: corner positions are v0 plus the bit
    /// combination of the d edge vectors.
    inline bool is_affine_cell(const MeshLevel &mesh, long cell)
    {
      const int   d  = mesh.dim;
      const auto &v0 = mesh.vertices[mesh.cells[cell][0]];
      std::array<std::array<double, 3>, 3> e;
      for (int k = 0; k < d; ++k)
        {
          const auto &vk = mesh.vertices[mesh.cells[cell][1 << k]];
          for (int r = 0; r < d; ++r)
            e[k][r] = vk[r] - v0[r];
        }
      for (int b = 0; b < (1 << d); ++b)
        {
          const auto &v = mesh.vertices[mesh.cells[cell][b]];
          for (int r = 0; r < d; ++r)
            {
              double expected = v0[r];
              for (int k = 0; k < d; ++k)
                if ((b >> k) & 1)
                  expected += e[k][r];
              if (v[r] != expected)
                return false;
            }
        }
      return true;
    }
  } // namespace internal

  /// Classify every cell by exact coordinate tests and precompute the data
  /// its kernel code path needs at the given quadrature. Throws "tangled
  /// mesh" on nonpositive determinants.
  inline GeometryCache classify_geometry(const MeshLevel &mesh, const Basis1D &basis)
  {
    GeometryCache cache;
    cache.dim = mesh.dim;
    cache.n_q = basis.n_q;
    const int d = mesh.dim;
    const int q = basis.n_q;

    cache.kind.resize(mesh.n_cells());
    cache.offset.resize(mesh.n_cells());

    const LatticeIndex qgrid(d, q);
    std::vector<std::array<double, 3>> qpoints(qgrid.size());
    std::vector<double>                qweights(qgrid.size());
    for (long i = 0; i < qgrid.size(); ++i)
      {
        const auto c = qgrid.coords(i);
        qpoints[i]   = {basis.quad_points[c[0]],
                        basis.quad_points[c[1]],
                        d == 3 ? basis.quad_points[c[2]] : 0.0};
        qweights[i]  = basis.quad_weights[c[0]] * basis.quad_weights[c[1]] *
                      (d == 3 ? basis.quad_weights[c[2]] : 1.0);
      }

    double J[3][3], Jinv[3][3];
    for (long cell = 0; cell < mesh.n_cells(); ++cell)
      {
        double h[3];
        if (internal::is_cartesian_cell(mesh, cell, h))
          {
            cache.kind[cell]   = CellGeometry::cartesian;
            cache.offset[cell] = long(cache.cartesian_data.size());
            double det         = 1.0;
            for (int k = 0; k < d; ++k)
              det *= h[k];
            for (int k = 0; k < d; ++k)
              cache.cartesian_data.push_back(h[k]);
            for (int k = 0; k < d; ++k)
              cache.cartesian_data.push_back(counted_div(det, h[k] * h[k]));
            cache.cartesian_data.push_back(det);
          }
        else if (internal::is_affine_cell(mesh, cell))
          {
            cache.kind[cell]   = CellGeometry::affine;
            cache.offset[cell] = long(cache.affine_data.size());
            cell_jacobian(mesh, cell, {0.5, 0.5, 0.5}, J);
            const double det = determinant(d, J);
            if (det <= 0)
              throw std::runtime_error("tangled mesh: nonpositive Jacobian determinant");
            internal::invert(d, J, Jinv, det);
            for (int r = 0; r < d; ++r)
              for (int c = 0; c < d; ++c)
                cache.affine_data.push_back(Jinv[r][c]);
            cache.affine_data.push_back(det);
          }
        else
          {
            cache.kind[cell]   = CellGeometry::general;
            cache.offset[cell] = long(cache.general_data.size());
            for (long i = 0; i < qgrid.size(); ++i)
              {
                cell_jacobian(mesh, cell, qpoints[i], J);
                const double det = determinant(d, J);
                if (det <= 0)
                  throw std::runtime_error("tangled mesh: nonpositive Jacobian determinant");
                internal::invert(d, J, Jinv, det);
                for (int r = 0; r < d; ++r)
                  for (int c = 0; c < d; ++c)
                    cache.general_data.push_back(Jinv[r][c]);
                cache.general_data.push_back(det * qweights[i]);
              }
          }
      }
    return cache;
  }
} // namespace patchmg
