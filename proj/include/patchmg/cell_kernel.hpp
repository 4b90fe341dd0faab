#pragma once

#include <patchmg/counters.hpp>
#include <patchmg/geometry.hpp>
#include <patchmg/tensor.hpp>

#include <vector>

namespace patchmg
{
  /// Everything needed to evaluate the Laplacian on cells of one degree:
  /// even-odd prepared 1D matrices, tensorized quadrature weights, and the
  /// small 1D sums used for diagonal extraction. Shared, immutable.
  struct CellEvaluator
  {
    int dim    = 2;
    int degree = 1;
    int n_q    = 2;

    Basis1D basis;

    EOMatrix values;        // q x (p+1), nodal -> quadrature values
    EOMatrix values_t;      // (p+1) x q
    EOMatrix colloc_deriv;  // q x q, differentiate in quadrature space
    EOMatrix colloc_deriv_t;

    std::vector<double> w_tensor; // q^d tensor-product weights

    // 1D moments for factorized diagonal extraction.
    std::vector<double> sum_n2; // sum_a w_a N(a,i)^2
    std::vector<double> sum_d2; // sum_a w_a D(a,i)^2
    std::vector<double> sum_nd; // sum_a w_a N(a,i) D(a,i)

    long n_cell_dofs() const
    {
      return ipow(degree + 1, dim);
    }
    long n_qpoints() const
    {
      return ipow(n_q, dim);
    }
  };

  inline CellEvaluator make_cell_evaluator(int dim, int p, int q = 0)
  {
    CellEvaluator ev;
    ev.dim    = dim;
    ev.degree = p;
    ev.basis  = make_basis(p, q);
    ev.n_q    = ev.basis.n_q;

    ev.values         = EOMatrix::create(ev.basis.shape_values, +1);
    ev.values_t       = EOMatrix::create(ev.basis.shape_values.transposed(), +1);
    ev.colloc_deriv   = EOMatrix::create(ev.basis.colloc_gradients, -1);
    ev.colloc_deriv_t = EOMatrix::create(ev.basis.colloc_gradients.transposed(), -1);

    const LatticeIndex qgrid(dim, ev.n_q);
    ev.w_tensor.resize(qgrid.size());
    for (long i = 0; i < qgrid.size(); ++i)
      {
        const auto c  = qgrid.coords(i);
        ev.w_tensor[i] = ev.basis.quad_weights[c[0]] * ev.basis.quad_weights[c[1]] *
                         (dim == 3 ? ev.basis.quad_weights[c[2]] : 1.0);
      }

    ev.sum_n2.assign(p + 1, 0.0);
    ev.sum_d2.assign(p + 1, 0.0);
    ev.sum_nd.assign(p + 1, 0.0);
    for (int i = 0; i <= p; ++i)
      for (int a = 0; a < ev.n_q; ++a)
        {
          const double w = ev.basis.quad_weights[a];
          const double n = ev.basis.shape_values(a, i);
          const double d = ev.basis.shape_gradients(a, i);
          ev.sum_n2[i] += w * n * n;
          ev.sum_d2[i] += w * d * d;
          ev.sum_nd[i] += w * n * d;
        }
    return ev;
  }

  /// Scratch for one cell evaluation; reused across cells and patches.
  struct KernelScratch
  {
    Vector a, b;          // ping-pong buffers for basis-change sweeps
    Vector grad[3];       // gradient components at quadrature points

    void resize(const CellEvaluator &ev)
    {
      const long nq = ev.n_qpoints();
      a.resize(nq);
      b.resize(nq);
      for (int k = 0; k < ev.dim; ++k)
        grad[k].resize(nq);
    }
  };

  namespace internal
  {
    /// Pointwise application of the metric to the reference gradients.
    inline void transform_gradients(const CellEvaluator &ev,
                                    CellGeometry         kind,
                                    const double        *geom,
                                    Vector (&grad)[3],
                                    Counters &counters)
    {
      const int  d  = ev.dim;
      const long nq = ev.n_qpoints();

      if (kind == CellGeometry::cartesian)
        {
          const double *factor = geom + d; // detJ / h_k^2
          for (int k = 0; k < d; ++k)
            {
              double *g = grad[k].data();
              for (long i = 0; i < nq; ++i)
                g[i] *= factor[k] * ev.w_tensor[i];
            }
          counters.add_flops(std::uint64_t(2 * d) * nq);
          return;
        }

      const bool    affine = (kind == CellGeometry::affine);
      const double *jinv   = geom;
      const double  det    = affine ? geom[d * d] : 0.0;
      for (long i = 0; i < nq; ++i)
        {
          const double *J   = affine ? jinv : geom + i * (d * d + 1);
          const double  jxw = affine ? det * ev.w_tensor[i] : J[d * d];
          double        g[3], t[3];
          for (int k = 0; k < d; ++k)
            g[k] = grad[k][i];
          // t = J^{-T} g, then g~ = jxw * J^{-1} t
          for (int r = 0; r < d; ++r)
            {
              double s = 0;
              for (int c = 0; c < d; ++c)
                s += J[c * d + r] * g[c];
              t[r] = s;
            }
          for (int r = 0; r < d; ++r)
            {
              double s = 0;
              for (int c = 0; c < d; ++c)
                s += J[r * d + c] * t[c];
              grad[r][i] = jxw * s;
            }
        }
      counters.add_flops(nq * (std::uint64_t(4 * d * d) + d + (affine ? 1 : 0)));
    }
  } // namespace internal

  /// Weak Laplacian of one cell: v_i = sum_q (J^{-T} grad phi_i) . (J^{-T}
  /// grad u) detJ w_q. Sum-factorized: d basis-change sweeps to quadrature
  /// values, d collocation-derivative sweeps, the pointwise metric, and the
  /// transposed sweeps back. O(p^{d+1}) operations.
  inline void cell_apply_laplace(const CellEvaluator &ev,
                                 CellGeometry         kind,
                                 const double        *geom,
                                 const double        *u_cell,
                                 double              *v_cell,
                                 KernelScratch       &scratch,
                                 Counters            &counters)
  {
    const int d  = ev.dim;
    const int n1 = ev.degree + 1;
    const int q  = ev.n_q;

    scratch.resize(ev);

    // Nodal coefficients -> values at quadrature points.
    {
      const double *in  = u_cell;
      double       *out = scratch.a.data();
      double       *alt = scratch.b.data();
      for (int k = 0; k < d; ++k)
        {
          std::array<int, 3> ext{};
          for (int j = 0; j < d; ++j)
            ext[j] = (j < k) ? q : n1;
          sweep_eo(ev.values, d, k, ext, in, out, false, counters);
          in = out;
          std::swap(out, alt);
        }
      // result now in the buffer `in` points to
      if (in != scratch.a.data())
        std::swap(scratch.a, scratch.b);
    }

    // Reference-space gradients in collocation space.
    const std::array<int, 3> qext{q, q, d == 3 ? q : 1};
    for (int k = 0; k < d; ++k)
      sweep_eo(ev.colloc_deriv, d, k, qext, scratch.a.data(), scratch.grad[k].data(), false,
               counters);

    internal::transform_gradients(ev, kind, geom, scratch.grad, counters);

    // Divergence: accumulate D^T sweeps, then back to nodal coefficients.
    for (int k = 0; k < d; ++k)
      sweep_eo(ev.colloc_deriv_t, d, k, qext, scratch.grad[k].data(), scratch.a.data(), k > 0,
               counters);

    {
      const double *in  = scratch.a.data();
      double       *out = scratch.b.data();
      for (int k = 0; k < d; ++k)
        {
          std::array<int, 3> ext{};
          for (int j = 0; j < d; ++j)
            ext[j] = (j < k) ? n1 : q;
          double *dst = (k == d - 1) ? v_cell : out;
          sweep_eo(ev.values_t, d, k, ext, in, dst, false, counters);
          in = dst;
          if (k < d - 1)
            out = (out == scratch.b.data()) ? scratch.a.data() : scratch.b.data();
        }
    }
  }

  /// Diagonal of the element stiffness matrix, by direct quadrature.
  /// Cartesian and affine cells use the factorized 1D moments; general cells
  /// loop over quadrature points. Same quadrature as the operator, so the
  /// result equals the assembled diagonal to round-off.
  inline void cell_diagonal(const CellEvaluator &ev,
                            CellGeometry         kind,
                            const double        *geom,
                            double              *diag)
  {
    const int          d = ev.dim;
    const LatticeIndex local(d, ev.degree + 1);

    if (kind == CellGeometry::cartesian)
      {
        const double *factor = geom + d;
        for (long i = 0; i < local.size(); ++i)
          {
            const auto c = local.coords(i);
            double     s = 0;
            for (int m = 0; m < d; ++m)
              {
                double prod = factor[m];
                for (int k = 0; k < d; ++k)
                  prod *= (k == m) ? ev.sum_d2[c[k]] : ev.sum_n2[c[k]];
                s += prod;
              }
            diag[i] = s;
          }
        return;
      }

    if (kind == CellGeometry::affine)
      {
        const double *jinv = geom;
        const double  det  = geom[d * d];
        double        G[3][3];
        for (int m = 0; m < d; ++m)
          for (int n = 0; n < d; ++n)
            {
              double s = 0;
              for (int c = 0; c < d; ++c)
                s += jinv[m * d + c] * jinv[n * d + c]; // J^{-1} J^{-T}
              G[m][n] = s * det;
            }
        for (long i = 0; i < local.size(); ++i)
          {
            const auto c = local.coords(i);
            double     s = 0;
            for (int m = 0; m < d; ++m)
              for (int n = 0; n < d; ++n)
                {
                  double prod = G[m][n];
                  for (int k = 0; k < d; ++k)
                    {
                      if (k == m && k == n)
                        prod *= ev.sum_d2[c[k]];
                      else if (k == m || k == n)
                        prod *= ev.sum_nd[c[k]];
                      else
                        prod *= ev.sum_n2[c[k]];
                    }
                  s += prod;
                }
            diag[i] = s;
          }
        return;
      }

    const LatticeIndex qgrid(d, ev.n_q);
    for (long i = 0; i < local.size(); ++i)
      {
        const auto ic = local.coords(i);
        double     s  = 0;
        for (long qi = 0; qi < qgrid.size(); ++qi)
          {
            const auto    qc  = qgrid.coords(qi);
            const double *J   = geom + qi * (d * d + 1);
            const double  jxw = J[d * d];
            double        dphi[3];
            for (int m = 0; m < d; ++m)
              {
                double v = 1.0;
                for (int k = 0; k < d; ++k)
                  v *= (k == m) ? ev.basis.shape_gradients(qc[k], ic[k]) :
                                  ev.basis.shape_values(qc[k], ic[k]);
                dphi[m] = v;
              }
            for (int r = 0; r < d; ++r)
              {
                double g = 0;
                for (int c = 0; c < d; ++c)
                  g += J[c * d + r] * dphi[c];
                s += g * g * jxw;
              }
          }
        diag[i] = s;
      }
  }

  /// Full element stiffness matrix by straightforward quadrature loops.
  /// This is the assembled-path oracle: it recomputes Jacobians from the
  /// mesh and never touches the sum-factorized kernels.
  inline Table element_stiffness_matrix(const CellEvaluator &ev,
                                        const MeshLevel     &mesh,
                                        long                 cell)
  {
    const int          d = ev.dim;
    const LatticeIndex local(d, ev.degree + 1);
    const LatticeIndex qgrid(d, ev.n_q);
    const long         n = local.size();

    Table  A{int(n), int(n)};
    double J[3][3], Jinv[3][3];
    std::vector<double> grads(std::size_t(n) * d);

    for (long qi = 0; qi < qgrid.size(); ++qi)
      {
        const auto            qc = qgrid.coords(qi);
        std::array<double, 3> xh{ev.basis.quad_points[qc[0]],
                                 ev.basis.quad_points[qc[1]],
                                 d == 3 ? ev.basis.quad_points[qc[2]] : 0.0};
        cell_jacobian(mesh, cell, xh, J);
        const double det = determinant(d, J);
        if (det <= 0)
          throw std::runtime_error("tangled mesh: nonpositive Jacobian determinant");
        internal::invert(d, J, Jinv, det);
        double w = det;
        for (int k = 0; k < d; ++k)
          w *= ev.basis.quad_weights[qc[k]];

        for (long i = 0; i < n; ++i)
          {
            const auto ic = local.coords(i);
            double     dphi[3];
            for (int m = 0; m < d; ++m)
              {
                double v = 1.0;
                for (int k = 0; k < d; ++k)
                  v *= (k == m) ? ev.basis.shape_gradients(qc[k], ic[k]) :
                                  ev.basis.shape_values(qc[k], ic[k]);
                dphi[m] = v;
              }
            for (int r = 0; r < d; ++r)
              {
                double g = 0;
                for (int c = 0; c < d; ++c)
                  g += Jinv[c][r] * dphi[c];
                grads[i * d + r] = g;
              }
          }
        for (long i = 0; i < n; ++i)
          for (long j = 0; j < n; ++j)
            {
              double s = 0;
              for (int r = 0; r < d; ++r)
                s += grads[i * d + r] * grads[j * d + r];
              A(int(i), int(j)) += w * s;
            }
      }
    return A;
  }
} // namespace patchmg
