#pragma once

#include <patchmg/basis.hpp>
#include <patchmg/counters.hpp>
#include <patchmg/tensor.hpp>

#include <Eigen/Dense>

#include <vector>

namespace patchmg
{
  /// Fast-diagonalization data for the reference Cartesian patch of one
  /// p-level: 1D interior stiffness/mass on the two-cell patch line and the
  /// generalized eigenpairs K v = lambda M v with M-orthonormal vectors.
  /// The separable patch operator sum_m K (x) M (x) ... is diagonalized by
  /// the tensor basis, so the inverse is two sets of d dense sweeps around a
  /// diagonal scaling.
  struct FDMData
  {
    int    dim    = 2;
    int    degree = 1;
    double h      = 1.0; // edge length of the (isotropic) reference cells
    int    m      = 1;   // 2p-1 interior nodes per axis

    Table               stiffness_1d; // m x m
    Table               mass_1d;      // m x m
    Table               eigvecs;      // columns are eigenvectors
    Table               eigvecs_t;
    std::vector<double> eigenvalues;    // ascending, > 0
    std::vector<double> inv_eigen_sum;  // m^d, 1 / sum_k lambda_{i_k}

    std::size_t stored_doubles() const
    {
      return stiffness_1d.data.size() + mass_1d.data.size() + eigvecs.data.size() +
             eigvecs_t.data.size() + eigenvalues.size() + inv_eigen_sum.size();
    }
  };

  /// Assemble the 1D two-cell interior matrices with the basis quadrature
  /// and solve the generalized eigenproblem. Divisions happen here only.
  inline FDMData build_fdm(const Basis1D &basis, int dim, double h)
  {
    const int p = basis.degree;
    const int m = 2 * p - 1;

    FDMData f;
    f.dim    = dim;
    f.degree = p;
    f.h      = h;
    f.m      = m;

    // 1D reference cell matrices by quadrature (exact for these degrees).
    Table khat(p + 1, p + 1), mhat(p + 1, p + 1);
    for (int i = 0; i <= p; ++i)
      for (int j = 0; j <= p; ++j)
        for (int a = 0; a < basis.n_q; ++a)
          {
            const double w = basis.quad_weights[a];
            khat(i, j) += w * basis.shape_gradients(a, i) * basis.shape_gradients(a, j);
            mhat(i, j) += w * basis.shape_values(a, i) * basis.shape_values(a, j);
          }

    // Two cells of width h on the patch line, interior nodes only.
    Table K{m, m}, M{m, m};
    for (int cell = 0; cell < 2; ++cell)
      for (int i = 0; i <= p; ++i)
        for (int j = 0; j <= p; ++j)
          {
            const int gi = cell * p + i - 1; // interior numbering drops node 0
            const int gj = cell * p + j - 1;
            if (gi < 0 || gi >= m || gj < 0 || gj >= m)
              continue;
            K(gi, gj) += counted_div(khat(i, j), h);
            M(gi, gj) += mhat(i, j) * h;
          }
    f.stiffness_1d = K;
    f.mass_1d      = M;

    Eigen::MatrixXd Ke(m, m), Me(m, m);
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        {
          Ke(i, j) = K(i, j);
          Me(i, j) = M(i, j);
        }
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Ke, Me);
    if (ges.info() != Eigen::Success)
      throw std::runtime_error("build_fdm: generalized eigensolve failed");

    f.eigvecs   = Table(m, m);
    f.eigvecs_t = Table(m, m);
    f.eigenvalues.resize(m);
    for (int j = 0; j < m; ++j)
      {
        f.eigenvalues[j] = ges.eigenvalues()(j);
        for (int i = 0; i < m; ++i)
          {
            f.eigvecs(i, j)   = ges.eigenvectors()(i, j);
            f.eigvecs_t(j, i) = ges.eigenvectors()(i, j);
          }
      }

    const LatticeIndex igrid(dim, m);
    f.inv_eigen_sum.resize(igrid.size());
    for (long i = 0; i < igrid.size(); ++i)
      {
        const auto c = igrid.coords(i);
        double     s = 0;
        for (int k = 0; k < dim; ++k)
          s += f.eigenvalues[c[k]];
        if (s <= 0)
          throw std::runtime_error("build_fdm: nonpositive eigenvalue sum");
        f.inv_eigen_sum[i] = counted_div(1.0, s);
      }
    return f;
  }

  /// d = (x)V diag(1/lambda_sum) (x)V^T r, via dense tensor sweeps.
  inline void fdm_apply(const FDMData &f,
                        const double  *r,
                        double        *d,
                        Vector        &t1,
                        Vector        &t2,
                        Counters      &counters)
  {
    const int          dim = f.dim;
    const LatticeIndex igrid(dim, f.m);
    const long         n = igrid.size();
    t1.resize(n);
    t2.resize(n);

    const std::array<int, 3> ext{f.m, f.m, dim == 3 ? f.m : 1};
    const double            *in = r;
    double                  *buffers[2] = {t1.data(), t2.data()};
    int                      which      = 0;
    for (int k = 0; k < dim; ++k)
      {
        double *out = buffers[which];
        sweep_dense(f.eigvecs_t, dim, k, ext, in, out, false, counters);
        in    = out;
        which = 1 - which;
      }
    double *mid = buffers[1 - which];
    for (long i = 0; i < n; ++i)
      mid[i] *= f.inv_eigen_sum[i];
    counters.add_flops(n);
    for (int k = 0; k < dim; ++k)
      {
        double *out = (k == dim - 1) ? d : buffers[which];
        sweep_dense(f.eigvecs, dim, k, ext, in, out, false, counters);
        in    = out;
        which = 1 - which;
      }
  }
} // namespace patchmg
