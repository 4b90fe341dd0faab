#pragma once

#include <patchmg/multigrid.hpp>

#include <functional>

namespace patchmg
{
  /// Where the multigrid preconditioner enters the Krylov iteration. With
  /// right preconditioning the Arnoldi residual is the true residual and the
  /// stopping test uses the relative unpreconditioned residual; with left
  /// preconditioning (the default of the established matrix-free multigrid
  /// codes, and the convention behind the reported iteration counts) the
  /// test uses the relative preconditioned residual.
  enum class PreconditionSide
  {
    left,
    right
  };

  struct GmresResult
  {
    Vector solution;
    int    iterations = 0;
    bool   converged  = false;
    Vector residual_history; // Arnoldi residual after each iteration
  };

  /// GMRES without restart, zero initial guess, relative tolerance `tol`.
  inline GmresResult gmres_solve(const std::function<void(const Vector &, Vector &)> &vmult,
                                 const std::function<void(const Vector &, Vector &)> &precondition,
                                 const Vector    &b,
                                 double           tol,
                                 int              max_iter = 200,
                                 PreconditionSide side     = PreconditionSide::right)
  {
    GmresResult result;
    const long  n = long(b.size());
    result.solution.assign(n, 0.0);

    const bool right = (side == PreconditionSide::right);

    Vector r0 = b;
    if (!right)
      precondition(b, r0);
    const double beta = norm2(r0);
    if (beta == 0.0)
      {
        result.converged = true;
        return result;
      }

    std::vector<Vector> v; // Krylov basis
    std::vector<Vector> z; // right preconditioning keeps M v_j, x = Z y
    v.push_back(r0);
    for (long i = 0; i < n; ++i)
      v[0][i] /= beta;

    std::vector<std::vector<double>> h; // h[j] has j+2 entries
    std::vector<double>              cs, sn, g;
    g.push_back(beta);

    Vector w(n), t(n);
    int    j = 0;
    for (; j < max_iter; ++j)
      {
        if (right)
          {
            precondition(v[j], t);
            z.push_back(t);
            vmult(t, w);
          }
        else
          {
            vmult(v[j], t);
            precondition(t, w);
          }

        h.emplace_back(j + 2, 0.0);
        for (int i = 0; i <= j; ++i)
          {
            h[j][i] = dot(w, v[i]);
            axpy(-h[j][i], v[i], w);
          }
        h[j][j + 1] = norm2(w);

        if (h[j][j + 1] > 0)
          {
            v.emplace_back(w);
            for (long i = 0; i < n; ++i)
              v[j + 1][i] /= h[j][j + 1];
          }

        for (int i = 0; i < j; ++i)
          {
            const double tmp = cs[i] * h[j][i] + sn[i] * h[j][i + 1];
            h[j][i + 1]      = -sn[i] * h[j][i] + cs[i] * h[j][i + 1];
            h[j][i]          = tmp;
          }
        const double denom = std::hypot(h[j][j], h[j][j + 1]);
        cs.push_back(denom == 0 ? 1.0 : h[j][j] / denom);
        sn.push_back(denom == 0 ? 0.0 : h[j][j + 1] / denom);
        h[j][j] = denom;
        g.push_back(-sn[j] * g[j]);
        g[j] *= cs[j];
        result.residual_history.push_back(std::abs(g[j + 1]));

        if (std::abs(g[j + 1]) <= tol * beta || h[j][j + 1] == 0.0)
          {
            ++j;
            result.converged = true;
            break;
          }
      }

    const int           m = result.converged ? j : max_iter;
    std::vector<double> y(m, 0.0);
    for (int i = m - 1; i >= 0; --i)
      {
        double s = g[i];
        for (int k = i + 1; k < m; ++k)
          s -= h[k][i] * y[k];
        y[i] = s / h[i][i];
      }
    if (right)
      for (int i = 0; i < m; ++i)
        axpy(y[i], z[i], result.solution);
    else
      {
        for (int i = 0; i < m; ++i)
          axpy(y[i], v[i], result.solution);
      }

    result.iterations = m;
    return result;
  }

  /// Iteration-count experiment: solve the manufactured problem on the
  /// finest level with the geometric multigrid preconditioner.
  inline GmresResult solve_poisson(GlobalSolver    &s,
                                   double           tol      = 1e-8,
                                   int              max_iter = 200,
                                   PreconditionSide side     = PreconditionSide::left)
  {
    auto        &fine = *s.levels[s.finest()];
    const Vector b    = make_rhs(fine.op);

    auto vmult = [&](const Vector &x, Vector &y) {
      global_vmult(fine.op, x, y, s.kernel, s.counters);
    };
    auto precondition = [&](const Vector &r, Vector &zv) {
      mg_vcycle(s, s.finest(), r, zv);
    };
    return gmres_solve(vmult, precondition, b, tol, max_iter, side);
  }
} // namespace patchmg
