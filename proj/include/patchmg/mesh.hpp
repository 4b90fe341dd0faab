#pragma once

#include <patchmg/quadrature.hpp>
#include <patchmg/types.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>
#include <vector>

namespace patchmg
{
  /// One structured quad/hex mesh level on the unit square/cube. Cells are
  /// multilinear images of the reference cell; vertex and cell numbering is
  /// lexicographic with axis 0 fastest. Corner order within a cell follows
  /// the bit convention: bit k of the corner index selects low/high along
  /// axis k.
  struct MeshLevel
  {
    int dim            = 2;
    int cells_per_axis = 0; // n; cell count n^d, vertex count (n+1)^d

    std::vector<std::array<double, 3>> vertices;
    std::vector<std::array<int, 8>>    cells;     // 2^dim corners used
    std::vector<int>                   parent_of; // coarser-level cell, -1 on level 0

    long n_cells() const
    {
      return ipow(cells_per_axis, dim);
    }
    long n_vertices() const
    {
      return ipow(cells_per_axis + 1, dim);
    }

    long vertex_index(const std::array<int, 3> &c) const
    {
      return LatticeIndex(dim, cells_per_axis + 1).linear(c);
    }
    long cell_index(const std::array<int, 3> &c) const
    {
      return LatticeIndex(dim, cells_per_axis).linear(c);
    }
  };

  struct MeshHierarchy
  {
    int           dim         = 2;
    int           refinements = 0;
    double        delta       = 0.0;
    std::uint64_t seed        = 0;

    std::vector<MeshLevel> levels; // levels[r] has 2^(r+1) cells per axis

    const MeshLevel &finest() const
    {
      return levels.back();
    }
  };

  namespace internal
  {
    inline MeshLevel make_cartesian_level(int dim, int n)
    {
      MeshLevel m;
      m.dim            = dim;
      m.cells_per_axis = n;
      const double h   = 1.0 / n;

      const LatticeIndex vgrid(dim, n + 1);
      m.vertices.resize(vgrid.size());
      for (long v = 0; v < vgrid.size(); ++v)
        {
          const auto c  = vgrid.coords(v);
          m.vertices[v] = {c[0] * h, c[1] * h, c[2] * h};
        }

      const LatticeIndex cgrid(dim, n);
      m.cells.resize(cgrid.size());
      m.parent_of.assign(cgrid.size(), -1);
      for (long cell = 0; cell < cgrid.size(); ++cell)
        {
          const auto c = cgrid.coords(cell);
          for (int b = 0; b < (1 << dim); ++b)
            {
              std::array<int, 3> vc{c[0] + (b & 1), c[1] + ((b >> 1) & 1), c[2] + ((b >> 2) & 1)};
              m.cells[cell][b] = int(m.vertex_index(vc));
            }
        }
      return m;
    }

    /// Multilinear shape function of corner b and its reference gradient.
    inline double corner_shape(int dim, int b, const std::array<double, 3> &xh)
    {
      double v = 1.0;
      for (int k = 0; k < dim; ++k)
        v *= ((b >> k) & 1) ? xh[k] : (1.0 - xh[k]);
      return v;
    }

    inline std::array<double, 3> corner_shape_grad(int dim, int b, const std::array<double, 3> &xh)
    {
      std::array<double, 3> g{0, 0, 0};
      for (int c = 0; c < dim; ++c)
        {
          double v = 1.0;
          for (int k = 0; k < dim; ++k)
            {
              if (k == c)
                v *= ((b >> k) & 1) ? 1.0 : -1.0;
              else
                v *= ((b >> k) & 1) ? xh[k] : (1.0 - xh[k]);
            }
          g[c] = v;
        }
      return g;
    }
  } // namespace internal

  /// Jacobian of the multilinear cell map at reference point xh (row r =
  /// physical axis, column c = reference axis).
  inline void cell_jacobian(const MeshLevel             &mesh,
                            long                         cell,
                            const std::array<double, 3> &xh,
                            double                       J[3][3])
  {
    const int d = mesh.dim;
    for (int r = 0; r < d; ++r)
      for (int c = 0; c < d; ++c)
        J[r][c] = 0.0;
    for (int b = 0; b < (1 << d); ++b)
      {
        const auto &v = mesh.vertices[mesh.cells[cell][b]];
        const auto  g = internal::corner_shape_grad(d, b, xh);
        for (int r = 0; r < d; ++r)
          for (int c = 0; c < d; ++c)
            J[r][c] += v[r] * g[c];
      }
  }

  inline double determinant(int dim, const double J[3][3])
  {
    if (dim == 2)
      return J[0][0] * J[1][1] - J[0][1] * J[1][0];
    return J[0][0] * (J[1][1] * J[2][2] - J[1][2] * J[2][1]) -
           J[0][1] * (J[1][0] * J[2][2] - J[1][2] * J[2][0]) +
           J[0][2] * (J[1][0] * J[2][1] - J[1][1] * J[2][0]);
  }

  /// Physical location of a reference point within a cell.
  inline std::array<double, 3> cell_point(const MeshLevel             &mesh,
                                          long                         cell,
                                          const std::array<double, 3> &xh)
  {
    std::array<double, 3> x{0, 0, 0};
    for (int b = 0; b < (1 << mesh.dim); ++b)
      {
        const double s = internal::corner_shape(mesh.dim, b, xh);
        const auto  &v = mesh.vertices[mesh.cells[cell][b]];
        for (int r = 0; r < mesh.dim; ++r)
          x[r] += s * v[r];
      }
    return x;
  }

  /// Throws "tangled mesh" if any cell of the level has det J <= 0 at the
  /// corners or at a 4^d Gauss sample.
  inline void check_untangled(const MeshLevel &mesh)
  {
    std::vector<double> gp, gw;
    gauss_rule(4, gp, gw);
    std::vector<std::array<double, 3>> sample;
    const LatticeIndex                 qgrid(mesh.dim, 4);
    for (long q = 0; q < qgrid.size(); ++q)
      {
        const auto c = qgrid.coords(q);
        sample.push_back({gp[c[0]], gp[c[1]], gp[c[2]]});
      }
    for (int b = 0; b < (1 << mesh.dim); ++b)
      sample.push_back({double(b & 1), double((b >> 1) & 1), double((b >> 2) & 1)});

    double J[3][3];
    for (long cell = 0; cell < mesh.n_cells(); ++cell)
      for (const auto &xh : sample)
        {
          cell_jacobian(mesh, cell, xh, J);
          if (determinant(mesh.dim, J) <= 0.0)
            throw std::runtime_error("tangled mesh: nonpositive Jacobian determinant");
        }
  }

  /// Nested hierarchy grown from a single vertex patch: level r has 2^(r+1)
  /// cells per axis; geometry is Cartesian until distorted.
  inline MeshHierarchy build_hierarchy(int dim, int refinements)
  {
    if (dim != 2 && dim != 3)
      throw std::invalid_argument("build_hierarchy: dim must be 2 or 3");
    if (refinements < 0)
      throw std::invalid_argument("build_hierarchy: refinements must be >= 0");

    MeshHierarchy h;
    h.dim         = dim;
    h.refinements = refinements;
    for (int r = 0; r <= refinements; ++r)
      {
        MeshLevel level = internal::make_cartesian_level(dim, 2 << r);
        if (r > 0)
          {
            const LatticeIndex cgrid(dim, level.cells_per_axis);
            const LatticeIndex pgrid(dim, level.cells_per_axis / 2);
            for (long cell = 0; cell < cgrid.size(); ++cell)
              {
                auto c = cgrid.coords(cell);
                level.parent_of[cell] = int(pgrid.linear({c[0] / 2, c[1] / 2, c[2] / 2}));
              }
          }
        h.levels.push_back(std::move(level));
      }
    return h;
  }

  namespace internal
  {
    /// Canonical uniform in [0,1) from the full 64-bit state, so results do
    /// not depend on the standard library's distribution implementations.
    inline double canonical(std::mt19937_64 &gen)
    {
      return double(gen() >> 11) * 0x1.0p-53;
    }

    inline std::array<double, 3> random_direction(int dim, std::mt19937_64 &gen)
    {
      if (dim == 2)
        {
          const double a = 2.0 * 3.14159265358979323846 * canonical(gen);
          return {std::cos(a), std::sin(a), 0.0};
        }
      // Normalized Gaussian triple via Box-Muller.
      while (true)
        {
          const double u1 = 1.0 - canonical(gen);
          const double u2 = canonical(gen);
          const double u3 = 1.0 - canonical(gen);
          const double u4 = canonical(gen);
          const double r1 = std::sqrt(-2.0 * std::log(u1));
          const double r2 = std::sqrt(-2.0 * std::log(u3));
          const double  c = 2.0 * 3.14159265358979323846;
          std::array<double, 3> g{r1 * std::cos(c * u2), r1 * std::sin(c * u2), r2 * std::cos(c * u4)};
          const double n = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
          if (n > 1e-12)
            return {g[0] / n, g[1] / n, g[2] / n};
        }
    }

    /// Minimum length over the (up to 2d) axis edges incident to a vertex.
    inline double min_incident_edge(const MeshLevel &mesh, const std::array<int, 3> &vc)
    {
      const int    n = mesh.cells_per_axis;
      const long   v = mesh.vertex_index(vc);
      const auto  &x = mesh.vertices[v];
      double       h = std::numeric_limits<double>::max();
      for (int k = 0; k < mesh.dim; ++k)
        for (int s : {-1, +1})
          {
            auto nc = vc;
            nc[k] += s;
            if (nc[k] < 0 || nc[k] > n)
              continue;
            const auto &y  = mesh.vertices[mesh.vertex_index(nc)];
            double      d2 = 0;
            for (int r = 0; r < mesh.dim; ++r)
              d2 += (x[r] - y[r]) * (x[r] - y[r]);
            h = std::min(h, std::sqrt(d2));
          }
      return h;
    }
  } // namespace internal

  /// Shift every interior vertex of the finest level by exactly delta * h_v
  /// in a random direction (h_v = minimum incident edge length before
  /// distortion), then re-derive the coarser levels so that vertices shared
  /// with a coarser level receive the same displacement. Deterministic for a
  /// fixed seed (mt19937_64, interior vertices visited in lexicographic
  /// order). Throws "tangled mesh" if any cell inverts.
  inline void distort(MeshHierarchy &hierarchy, double delta, std::uint64_t seed)
  {
    if (delta < 0.0 || delta >= 0.5)
      throw std::invalid_argument("distort: need 0 <= delta < 0.5");
    hierarchy.delta = delta;
    hierarchy.seed  = seed;

    MeshLevel &fine = hierarchy.levels.back();
    const int  n    = fine.cells_per_axis;

    std::mt19937_64    gen(seed);
    const LatticeIndex vgrid(fine.dim, n + 1);
    std::vector<std::array<double, 3>> displaced = fine.vertices;
    for (long v = 0; v < vgrid.size(); ++v)
      {
        const auto c        = vgrid.coords(v);
        bool       interior = true;
        for (int k = 0; k < fine.dim; ++k)
          interior &= (c[k] > 0 && c[k] < n);
        if (!interior)
          continue;
        const double h   = internal::min_incident_edge(fine, c);
        const auto   dir = internal::random_direction(fine.dim, gen);
        for (int r = 0; r < fine.dim; ++r)
          displaced[v][r] += delta * h * dir[r];
      }
    fine.vertices = displaced;

    // Coarser vertices coincide with fine lattice points; copy positions.
    for (int r = 0; r < hierarchy.refinements; ++r)
      {
        MeshLevel         &coarse = hierarchy.levels[r];
        const int          step   = 1 << (hierarchy.refinements - r);
        const LatticeIndex cg(coarse.dim, coarse.cells_per_axis + 1);
        for (long v = 0; v < cg.size(); ++v)
          {
            const auto c = cg.coords(v);
            coarse.vertices[v] =
              fine.vertices[fine.vertex_index({c[0] * step, c[1] * step, c[2] * step})];
          }
      }

    for (const auto &level : hierarchy.levels)
      check_untangled(level);
  }

  /// Debugging text format: header with dim, n, delta, seed, then one vertex
  /// per line. Not a compatibility surface.
  inline void write_mesh_text(const MeshHierarchy &h, std::ostream &out)
  {
    const MeshLevel &m = h.finest();
    out << "dim " << h.dim << " n " << m.cells_per_axis << " delta " << h.delta << " seed "
        << h.seed << "\n";
    out.precision(17);
    for (const auto &v : m.vertices)
      {
        out << v[0];
        for (int k = 1; k < h.dim; ++k)
          out << " " << v[k];
        out << "\n";
      }
  }
} // namespace patchmg
