#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace patchmg
{
  namespace internal
  {
    // Legendre polynomial P_n and derivative at x (on [-1,1]).
    inline void legendre(int n, double x, double &p, double &dp)
    {
      double p0 = 1.0, p1 = x;
      if (n == 0)
        {
          p  = 1.0;
          dp = 0.0;
          return;
        }
      for (int k = 2; k <= n; ++k)
        {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0              = p1;
          p1              = p2;
        }
      p  = p1;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
    }
  } // namespace internal

  /// Gauss-Legendre rule with q points, mapped to [0,1]. Points are stored
  /// ascending and exactly symmetric about 1/2 (the lower half is computed
  /// by Newton iteration, the upper half mirrored).
  inline void gauss_rule(int q, std::vector<double> &points, std::vector<double> &weights)
  {
    if (q < 1)
      throw std::invalid_argument("gauss_rule: q must be >= 1");
    points.assign(q, 0.0);
    weights.assign(q, 0.0);
    const double pi = 3.14159265358979323846;
    for (int i = 0; i < (q + 1) / 2; ++i)
      {
        double x = -std::cos(pi * (i + 0.75) / (q + 0.5));
        for (int it = 0; it < 100; ++it)
          {
            double p, dp;
            internal::legendre(q, x, p, dp);
            const double dx = -p / dp;
            x += dx;
            if (std::abs(dx) < 1e-15)
              break;
          }
        double p, dp;
        internal::legendre(q, x, p, dp);
        const double w   = 2.0 / ((1.0 - x * x) * dp * dp);
        points[i]        = 0.5 * (1.0 + x);
        weights[i]       = 0.5 * w;
        points[q - 1 - i]  = 1.0 - points[i];
        weights[q - 1 - i] = weights[i];
      }
    if (q % 2 == 1)
      points[q / 2] = 0.5;
  }

  /// Gauss-Lobatto nodes (n points including both endpoints) on [0,1],
  /// ascending, exactly symmetric about 1/2. These are the support points of
  /// the nodal basis; no weights are needed.
  inline std::vector<double> gauss_lobatto_nodes(int n)
  {
    if (n < 2)
      throw std::invalid_argument("gauss_lobatto_nodes: need n >= 2");
    std::vector<double> x(n);
    x.front() = 0.0;
    x.back()  = 1.0;
    const double pi = 3.14159265358979323846;
    const int    m  = n - 1; // interior nodes are roots of P'_m
    for (int i = 1; i < (n + 1) / 2; ++i)
      {
        // Chebyshev-Gauss-Lobatto initial guess, then Newton on P'_m.
        double t = -std::cos(pi * i / m);
        for (int it = 0; it < 100; ++it)
          {
            double pm, dpm, pm1, dpm1;
            internal::legendre(m, t, pm, dpm);
            internal::legendre(m - 1, t, pm1, dpm1);
            // d/dx P'_m from the Legendre ODE: (1-x^2) P''_m = 2x P'_m - m(m+1) P_m
            const double d2pm = (2.0 * t * dpm - m * (m + 1) * pm) / (1.0 - t * t);
            const double dt   = -dpm / d2pm;
            t += dt;
            if (std::abs(dt) < 1e-15)
              break;
          }
        x[i]         = 0.5 * (1.0 + t);
        x[n - 1 - i] = 1.0 - x[i];
      }
    if (n % 2 == 1)
      x[n / 2] = 0.5;
    return x;
  }
} // namespace patchmg
