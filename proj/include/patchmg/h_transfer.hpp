#pragma once

#include <patchmg/basis.hpp>
#include <patchmg/counters.hpp>
#include <patchmg/dofs.hpp>
#include <patchmg/tensor.hpp>

#include <vector>

namespace patchmg
{

  /// Transfer between two nested levels at equal degree. Prolongation is the
  /// per-axis embedding built from the 1D two-child interpolation matrices
  /// (each fine lattice node written exactly once); restriction is the exact
  /// transpose.
  struct HTransfer
  {
    int dim    = 2;
    int degree = 1;
    int coarse_m = 0; // DoFs per axis
    int fine_m   = 0;

    internal::Csr1D prolong_1d;  // fine_m x coarse_m
    internal::Csr1D restrict_1d; // transpose

    std::size_t stored_doubles() const
    {
      return prolong_1d.val.size() + restrict_1d.val.size();
    }
  };

  inline HTransfer build_h_transfer(const DofMap &coarse, const DofMap &fine, const Basis1D &basis)
  {
    if (fine.cells_per_axis != 2 * coarse.cells_per_axis || fine.degree != coarse.degree)
      throw std::invalid_argument("build_h_transfer: levels are not nested at equal degree");

    HTransfer t;
    t.dim      = coarse.dim;
    t.degree   = coarse.degree;
    t.coarse_m = coarse.dofs_per_axis();
    t.fine_m   = fine.dofs_per_axis();

    const int p = coarse.degree;
    const int n = coarse.cells_per_axis;

    auto &P    = t.prolong_1d;
    P.n_rows   = t.fine_m;
    P.n_cols   = t.coarse_m;
    P.row_ptr.assign(t.fine_m + 1, 0);
    std::vector<std::vector<std::pair<int, double>>> rows(t.fine_m);

    std::vector<bool> written(t.fine_m, false);
    for (int cc = 0; cc < n; ++cc)
      for (int child = 0; child < 2; ++child)
        for (int a = 0; a <= p; ++a)
          {
            const int fi = (2 * cc + child) * p + a;
            if (written[fi])
              continue;
            written[fi]     = true;
            const double xh = 0.5 * (child + basis.nodes[a]);
            for (int j = 0; j <= p; ++j)
              {
                const double v = internal::lagrange_value(basis.nodes, j, xh);
                if (v != 0.0)
                  rows[fi].emplace_back(cc * p + j, v);
              }
          }

    for (int r = 0; r < t.fine_m; ++r)
      {
        P.row_ptr[r + 1] = P.row_ptr[r] + int(rows[r].size());
        for (auto &[c, v] : rows[r])
          {
            P.col.push_back(c);
            P.val.push_back(v);
          }
      }
    t.restrict_1d = P.transposed();
    return t;
  }

  namespace internal
  {
    /// Apply the same 1D operator along every axis, ping-ponging through two
    /// scratch buffers. `dst` must not alias `src`.
    inline void sweep_all_axes(const Csr1D  &m,
                               int           dim,
                               int           in_extent,
                               const double *src,
                               double       *dst,
                               Vector       &s1,
                               Vector       &s2,
                               Counters     &counters)
    {
      const long max_size = ipow(std::max(m.n_rows, m.n_cols), dim);
      s1.resize(max_size);
      s2.resize(max_size);

      std::array<int, 3> ext{in_extent, in_extent, dim == 3 ? in_extent : 1};
      const double      *in = src;
      for (int k = 0; k < dim; ++k)
        {
          double *out = (k == dim - 1) ? dst : (k % 2 == 0 ? s1.data() : s2.data());
          sweep_csr(m, dim, k, ext, in, out, counters);
          ext[k] = m.n_rows;
          in     = out;
        }
    }
  } // namespace internal

  /// u_fine = P u_coarse via d sequential 1D sweeps.
  inline void h_prolongate(const HTransfer &t,
                           const Vector    &u_coarse,
                           Vector          &u_fine,
                           Vector          &scratch1,
                           Vector          &scratch2,
                           Counters        &counters)
  {
    u_fine.resize(ipow(t.fine_m, t.dim));
    internal::sweep_all_axes(t.prolong_1d, t.dim, t.coarse_m, u_coarse.data(), u_fine.data(),
                             scratch1, scratch2, counters);
  }

  /// r_coarse = P^T r_fine.
  inline void h_restrict(const HTransfer &t,
                         const Vector    &r_fine,
                         Vector          &r_coarse,
                         Vector          &scratch1,
                         Vector          &scratch2,
                         Counters        &counters)
  {
    r_coarse.resize(ipow(t.coarse_m, t.dim));
    internal::sweep_all_axes(t.restrict_1d, t.dim, t.fine_m, r_fine.data(), r_coarse.data(),
                             scratch1, scratch2, counters);
  }
} // namespace patchmg
