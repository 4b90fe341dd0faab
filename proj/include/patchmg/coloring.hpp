#pragma once

#include <patchmg/dofs.hpp>

#include <vector>

namespace patchmg
{
  /// Patch groups for parallel sweeps. Two patches conflict when the
  /// interior DoFs of one intersect the closure DoFs of the other (the
  /// smoother writes interiors and reads closures); on the structured level
  /// this is a center-vertex Chebyshev distance of at most one. Within one
  /// color all writes are disjoint from all reads, so patches of a color may
  /// run concurrently and the result does not depend on their order.
  struct Coloring
  {
    int                           n_colors = 0;
    std::vector<int>              color_of;
    std::vector<std::vector<int>> groups; // ascending patch index per color
  };

  inline bool patches_conflict(const PatchList &patches, int i, int j)
  {
    if (i == j)
      return false;
    const auto &a = patches.patches[i].center_coord;
    const auto &b = patches.patches[j].center_coord;
    for (int k = 0; k < patches.dim; ++k)
      if (std::abs(a[k] - b[k]) > 1)
        return false;
    return true;
  }

  /// DSATUR greedy coloring: repeatedly color the vertex with the highest
  /// saturation degree, ties broken by higher degree, then lower index.
  inline Coloring dsatur_color(const PatchList &patches)
  {
    const int n = int(patches.patches.size());
    const int d = patches.dim;
    const int inner = patches.cells_per_axis - 1;
    const LatticeIndex grid(d, inner);

    // Lattice neighbors within Chebyshev distance 1.
    auto neighbors_of = [&](int i, auto &&fn) {
      const auto c = grid.coords(i);
      std::array<int, 3> o{0, 0, 0};
      const int zlo = d == 3 ? -1 : 0, zhi = d == 3 ? 1 : 0;
      for (o[2] = zlo; o[2] <= zhi; ++o[2])
        for (o[1] = -1; o[1] <= 1; ++o[1])
          for (o[0] = -1; o[0] <= 1; ++o[0])
            {
              if (o[0] == 0 && o[1] == 0 && o[2] == 0)
                continue;
              std::array<int, 3> nc{c[0] + o[0], c[1] + o[1], c[2] + o[2]};
              bool               ok = true;
              for (int k = 0; k < d; ++k)
                ok &= (nc[k] >= 0 && nc[k] < inner);
              if (ok)
                fn(int(grid.linear(nc)));
            }
    };

    Coloring col;
    col.color_of.assign(n, -1);

    std::vector<int> degree(n, 0);
    for (int i = 0; i < n; ++i)
      neighbors_of(i, [&](int) { ++degree[i]; });

    std::vector<std::vector<bool>> sat_colors(n); // colors seen among neighbors
    std::vector<int>               saturation(n, 0);

    for (int step = 0; step < n; ++step)
      {
        int best = -1;
        for (int i = 0; i < n; ++i)
          {
            if (col.color_of[i] >= 0)
              continue;
            if (best < 0 || saturation[i] > saturation[best] ||
                (saturation[i] == saturation[best] && degree[i] > degree[best]))
              best = i;
          }

        int c = 0;
        while (c < int(sat_colors[best].size()) && sat_colors[best][c])
          ++c;
        col.color_of[best] = c;
        col.n_colors       = std::max(col.n_colors, c + 1);

        neighbors_of(best, [&](int nb) {
          if (int(sat_colors[nb].size()) <= c)
            sat_colors[nb].resize(c + 1, false);
          if (!sat_colors[nb][c])
            {
              sat_colors[nb][c] = true;
              ++saturation[nb];
            }
        });
      }

    col.groups.resize(col.n_colors);
    for (int i = 0; i < n; ++i)
      col.groups[col.color_of[i]].push_back(i);
    return col;
  }
} // namespace patchmg
