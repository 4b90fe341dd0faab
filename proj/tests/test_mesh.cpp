#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <sstream>

using namespace patchmg;
using namespace testing_support;

TEST_CASE("hierarchy sizes: published problem sizes")
{
  // 3D, three refinements: 3,375 patches and 117,649 Q3 DoFs
  {
    auto h       = build_hierarchy(3, 3);
    auto dofs    = enumerate_dofs(h.finest(), 3);
    auto patches = enumerate_patches(h.finest(), dofs);
    REQUIRE(patches.patches.size() == 3375);
    REQUIRE(dofs.n_dofs == 117649);
  }
  // single-patch base case
  {
    auto h = build_hierarchy(3, 0);
    REQUIRE(h.finest().n_cells() == 8);
    auto dofs    = enumerate_dofs(h.finest(), 1);
    auto patches = enumerate_patches(h.finest(), dofs);
    REQUIRE(patches.patches.size() == 1);
  }
  // 2D, two refinements, Q2
  {
    auto h       = build_hierarchy(2, 2);
    auto dofs    = enumerate_dofs(h.finest(), 2);
    auto patches = enumerate_patches(h.finest(), dofs);
    REQUIRE(h.finest().n_cells() == 64);
    REQUIRE(patches.patches.size() == 49);
    REQUIRE(dofs.n_dofs == 289);
  }
}

TEST_CASE("DoF counts match the structured closed forms")
{
  {
    auto h    = build_hierarchy(3, 2); // n = 8
    auto dofs = enumerate_dofs(h.finest(), 2);
    REQUIRE(dofs.n_dofs == 4913);
  }
  {
    auto h    = build_hierarchy(2, 0); // n = 2
    auto dofs = enumerate_dofs(h.finest(), 1);
    REQUIRE(dofs.n_dofs == 9);
    long interior = 0;
    for (long i = 0; i < dofs.n_dofs; ++i)
      interior += !dofs.boundary_mask[i];
    REQUIRE(interior == 1);
  }
  {
    auto h    = build_hierarchy(3, 3); // n = 16
    auto dofs = enumerate_dofs(h.finest(), 7);
    REQUIRE(dofs.n_dofs == 1442897);
  }
}

TEST_CASE("patch enumeration: counts, interior sizes, cell order convention")
{
  {
    auto h       = build_hierarchy(3, 2);
    auto dofs    = enumerate_dofs(h.finest(), 2);
    auto patches = enumerate_patches(h.finest(), dofs);
    REQUIRE(patches.patches.size() == 343); // (8-1)^3; tables print 342, text 343
  }
  {
    auto h       = build_hierarchy(2, 0);
    auto dofs    = enumerate_dofs(h.finest(), 3);
    auto patches = enumerate_patches(h.finest(), dofs);
    REQUIRE(patches.patches.size() == 1);
    REQUIRE(patches.interior_size() == 25);
  }
  {
    auto h       = build_hierarchy(3, 1);
    auto dofs    = enumerate_dofs(h.finest(), 1);
    auto patches = enumerate_patches(h.finest(), dofs);
    REQUIRE(patches.interior_size() == 1);
  }
  // bit convention: cell with bit k set lies on the high side of axis k
  {
    auto        h       = build_hierarchy(2, 1);
    auto        dofs    = enumerate_dofs(h.finest(), 1);
    auto        patches = enumerate_patches(h.finest(), dofs);
    const auto &mesh    = h.finest();
    for (const auto &patch : patches.patches)
      for (int c = 0; c < 4; ++c)
        {
          const auto cc = LatticeIndex(2, mesh.cells_per_axis).coords(patch.cells[c]);
          REQUIRE(cc[0] == patch.center_coord[0] - 1 + (c & 1));
          REQUIRE(cc[1] == patch.center_coord[1] - 1 + ((c >> 1) & 1));
        }
  }
}

TEST_CASE("patch cover: interior cells belong to exactly 2^d patches")
{
  for (int dim : {2, 3})
    {
      auto h       = build_hierarchy(dim, 2); // n = 8
      auto dofs    = enumerate_dofs(h.finest(), 1);
      auto patches = enumerate_patches(h.finest(), dofs);

      std::vector<int> membership(h.finest().n_cells(), 0);
      for (const auto &patch : patches.patches)
        for (int c = 0; c < (1 << dim); ++c)
          ++membership[patch.cells[c]];

      const LatticeIndex cgrid(dim, 8);
      for (long cell = 0; cell < cgrid.size(); ++cell)
        {
          const auto cc       = cgrid.coords(cell);
          bool       interior = true;
          for (int k = 0; k < dim; ++k)
            interior &= (cc[k] > 0 && cc[k] < 7);
          REQUIRE(membership[cell] <= (1 << dim));
          if (interior)
            REQUIRE(membership[cell] == (1 << dim));
        }
    }
}

TEST_CASE("distortion displaces by exactly delta * h_v and fixes the boundary")
{
  for (int dim : {2, 3})
    {
      auto       reference = build_hierarchy(dim, 2);
      auto       h         = build_hierarchy(dim, 2);
      const auto before    = h.finest().vertices;
      distort(h, 0.10, 42);

      const int          n = h.finest().cells_per_axis;
      const LatticeIndex vgrid(dim, n + 1);
      const double       hv = 1.0 / n; // uniform Cartesian edge length
      for (long v = 0; v < vgrid.size(); ++v)
        {
          const auto c        = vgrid.coords(v);
          bool       interior = true;
          for (int k = 0; k < dim; ++k)
            interior &= (c[k] > 0 && c[k] < n);
          double d2 = 0;
          for (int k = 0; k < dim; ++k)
            d2 += std::pow(h.finest().vertices[v][k] - before[v][k], 2);
          if (interior)
            REQUIRE(std::sqrt(d2) == Catch::Approx(0.10 * hv).margin(1e-15));
          else
            REQUIRE(d2 == 0.0);
        }
    }
}

TEST_CASE("distortion with delta 0 is the identity")
{
  auto h  = build_hierarchy(2, 2);
  auto h0 = build_hierarchy(2, 2);
  distort(h, 0.0, 7);
  for (std::size_t l = 0; l < h.levels.size(); ++l)
    REQUIRE(h.levels[l].vertices == h0.levels[l].vertices);
}

TEST_CASE("distorted meshes keep positive Jacobians")
{
  auto h = build_hierarchy(3, 2);
  REQUIRE_NOTHROW(distort(h, 0.10, 3));
  for (const auto &level : h.levels)
    REQUIRE_NOTHROW(check_untangled(level));
}

TEST_CASE("tangled meshes are rejected")
{
  auto h = build_hierarchy(2, 1);
  // manually collapse a vertex across its cell
  h.levels.back().vertices[h.levels.back().vertex_index({1, 1, 0})] = {0.9, 0.9, 0.0};
  REQUIRE_THROWS_WITH(check_untangled(h.levels.back()),
                      Catch::Matchers::ContainsSubstring("tangled mesh"));
  REQUIRE_THROWS(distort(h, 0.5, 1));
  REQUIRE_THROWS(build_hierarchy(4, 1));
  REQUIRE_THROWS(build_hierarchy(2, -1));
}

TEST_CASE("distortion is deterministic in the seed")
{
  auto a = build_hierarchy(3, 1);
  auto b = build_hierarchy(3, 1);
  auto c = build_hierarchy(3, 1);
  distort(a, 0.1, 12345);
  distort(b, 0.1, 12345);
  distort(c, 0.1, 54321);
  REQUIRE(a.finest().vertices == b.finest().vertices);
  REQUIRE(a.finest().vertices != c.finest().vertices);
}

TEST_CASE("nestedness: fine cells map into their parents")
{
  auto h = build_hierarchy(2, 3);
  distort(h, 0.25, 9);
  for (std::size_t l = 1; l < h.levels.size(); ++l)
    {
      const auto        &fine   = h.levels[l];
      const auto        &coarse = h.levels[l - 1];
      const LatticeIndex fgrid(fine.dim, fine.cells_per_axis);
      const LatticeIndex cgrid(coarse.dim, coarse.cells_per_axis);
      for (long cell = 0; cell < fgrid.size(); ++cell)
        {
          const auto fc = fgrid.coords(cell);
          const auto pc = cgrid.coords(fine.parent_of[cell]);
          for (int k = 0; k < fine.dim; ++k)
            {
              REQUIRE(fc[k] / 2 == pc[k]);
              // vertex lattice containment: fine corners lie within the
              // parent cell's corner range on the shared lattice
              REQUIRE(fc[k] >= 2 * pc[k]);
              REQUIRE(fc[k] + 1 <= 2 * (pc[k] + 1));
            }
        }
      // shared lattice points coincide geometrically
      const int step = 2;
      const LatticeIndex cv(coarse.dim, coarse.cells_per_axis + 1);
      for (long v = 0; v < cv.size(); ++v)
        {
          const auto c = cv.coords(v);
          const auto fv =
            fine.vertices[fine.vertex_index({c[0] * step, c[1] * step, c[2] * step})];
          REQUIRE(coarse.vertices[v] == fv);
        }
    }
}

TEST_CASE("mesh text serialization")
{
  auto h = build_hierarchy(2, 1);
  distort(h, 0.1, 2);
  std::ostringstream out;
  write_mesh_text(h, out);
  std::istringstream in(out.str());
  std::string        token;
  in >> token;
  REQUIRE(token == "dim");
  int dim, n;
  in >> dim >> token >> n;
  REQUIRE(dim == 2);
  REQUIRE(n == 4);
  std::string rest;
  std::getline(in, rest);
  long lines = 0;
  while (std::getline(in, rest))
    if (!rest.empty())
      ++lines;
  REQUIRE(lines == h.finest().n_vertices());
}
