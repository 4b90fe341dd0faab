#pragma once

#include <patchmg/counters.hpp>
#include <patchmg/quadrature.hpp>
#include <patchmg/types.hpp>

#include <stdexcept>
#include <vector>

namespace patchmg
{
  /// 1D factors of the tensor-product element: Gauss-Lobatto-Lagrange nodal
  /// basis of degree p on [0,1] tabulated at a Gauss quadrature rule.
  struct Basis1D
  {
    int degree = 0; // p
    int n_q    = 0; // quadrature points per axis

    std::vector<double> nodes;        // p+1 support points
    std::vector<double> quad_points;  // q points
    std::vector<double> quad_weights; // q weights

    Table shape_values;    // (q) x (p+1), N[a][i] = phi_i(x_a)
    Table shape_gradients; // (q) x (p+1), D[a][i] = phi_i'(x_a)
    Table colloc_gradients; // (q) x (q): derivative matrix of the Lagrange
                            // basis on the quadrature points themselves
  };

  namespace internal
  {
    /// Value of the Lagrange polynomial for node i of `nodes` at x.
    inline double lagrange_value(const std::vector<double> &nodes, int i, double x)
    {
      double v = 1.0;
      for (std::size_t j = 0; j < nodes.size(); ++j)
        if (int(j) != i)
          v *= (x - nodes[j]) / (nodes[i] - nodes[j]);
      return v;
    }

    /// Derivative of the same polynomial, in a form without divisions by
    /// (x - x_j) so evaluation points may coincide with nodes.
    inline double lagrange_gradient(const std::vector<double> &nodes, int i, double x)
    {
      const int n = int(nodes.size());
      double    d = 0.0;
      for (int k = 0; k < n; ++k)
        {
          if (k == i)
            continue;
          double term = 1.0 / (nodes[i] - nodes[k]);
          for (int j = 0; j < n; ++j)
            if (j != i && j != k)
              term *= (x - nodes[j]) / (nodes[i] - nodes[j]);
          d += term;
        }
      return d;
    }

    /// Differentiation matrix of the Lagrange basis on `pts` evaluated at
    /// `pts`, via barycentric weights.
    inline Table differentiation_matrix(const std::vector<double> &pts)
    {
      const int           n = int(pts.size());
      std::vector<double> w(n, 1.0);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          if (j != i)
            w[i] /= (pts[i] - pts[j]);
      Table d(n, n);
      for (int a = 0; a < n; ++a)
        {
          double diag = 0.0;
          for (int b = 0; b < n; ++b)
            if (b != a)
              {
                d(a, b) = (w[b] / w[a]) / (pts[a] - pts[b]);
                diag -= d(a, b);
              }
          d(a, a) = diag;
        }
      return d;
    }

    /// Enforce the mirror symmetry M[r][c] = sign * M[R-1-r][C-1-c] exactly.
    /// The tables have it analytically (nodes and points are symmetric sets)
    /// but Newton iterations leave last-ulp asymmetries.
    inline void symmetrize(Table &m, int sign)
    {
      for (int r = 0; r < m.n_rows; ++r)
        for (int c = 0; c < m.n_cols; ++c)
          {
            const int rr = m.n_rows - 1 - r;
            const int cc = m.n_cols - 1 - c;
            if (r < rr || (r == rr && c < cc))
              {
                const double v = 0.5 * (m(r, c) + sign * m(rr, cc));
                m(r, c)        = v;
                m(rr, cc)      = sign * v;
              }
            else if (r == rr && c == cc && sign == -1)
              m(r, c) = 0.0;
          }
    }
  } // namespace internal

  /// Nodal basis of degree p with a q-point Gauss rule (q = p+1 by default).
  inline Basis1D make_basis(int p, int q = 0)
  {
    if (p < 1)
      throw std::invalid_argument("make_basis: degree must be >= 1");
    if (q == 0)
      q = p + 1;
    if (q < p + 1)
      throw std::invalid_argument("make_basis: need q >= p+1");

    Basis1D b;
    b.degree = p;
    b.n_q    = q;
    b.nodes  = gauss_lobatto_nodes(p + 1);
    gauss_rule(q, b.quad_points, b.quad_weights);

    b.shape_values    = Table(q, p + 1);
    b.shape_gradients = Table(q, p + 1);
    for (int a = 0; a < q; ++a)
      for (int i = 0; i <= p; ++i)
        {
          b.shape_values(a, i)    = internal::lagrange_value(b.nodes, i, b.quad_points[a]);
          b.shape_gradients(a, i) = internal::lagrange_gradient(b.nodes, i, b.quad_points[a]);
        }
    b.colloc_gradients = internal::differentiation_matrix(b.quad_points);

    internal::symmetrize(b.shape_values, +1);
    internal::symmetrize(b.shape_gradients, -1);
    internal::symmetrize(b.colloc_gradients, -1);
    return b;
  }
} // namespace patchmg
