#pragma once

#include <patchmg/types.hpp>

#include <utility>
#include <vector>

namespace patchmg
{
  /// Distributor strategy for moving DoF values between cell-local buffers
  /// and the flattened patch-interior vector.
  enum class DistributorKind
  {
    dynamic_traversal,
    lookup
  };

  /// Stride between consecutive (d-1)-dimensional slices of the flattened
  /// patch vector when recursing over dimension `recursion_dim` (1-based):
  /// 1, 2p-1, (2p-1)^2.
  inline long patch_stride(int recursion_dim, int p)
  {
    return ipow(2 * p - 1, recursion_dim - 1);
  }

  /// First patch-interior index touched by patch-local cell c: cells on the
  /// high side of axis k start p-1 slices in.
  inline long patch_base_offset(int dim, int p, int c)
  {
    long base = 0;
    for (int k = 0; k < dim; ++k)
      if ((c >> k) & 1)
        base += long(p - 1) * ipow(2 * p - 1, k);
    return base;
  }

  namespace internal
  {
    // 1D base case: a line of p+1 cell-local DoFs. Node 0 of the left cell
    // and node p of the right cell are the patch's outer boundary; the
    // shared interface node is owned by the left cell and duplicated on the
    // right. The flag S routes the whole line to the skip functor and
    // suppresses patch-index advancement.
    template <typename Reg, typename Dup, typename Skip>
    void traverse_1d(int p, int c, Reg &reg, Dup &dup, Skip &skip, bool S, long &i_cell,
                     long i_patch)
    {
      constexpr long K = 1;
      if ((c & 1) == 0)
        {
          skip(c, i_cell); // node 0: outer boundary
          ++i_cell;
          for (int k = 1; k <= p - 1; ++k)
            {
              if (S)
                skip(c, i_cell);
              else
                {
                  reg(i_patch, c, i_cell);
                  i_patch += K;
                }
              ++i_cell;
            }
          if (S) // node p: shared interface (owner)
            skip(c, i_cell);
          else
            {
              reg(i_patch, c, i_cell);
              i_patch += K;
            }
          ++i_cell;
        }
      else
        {
          if (S) // node 0: shared interface (overlap)
            skip(c, i_cell);
          else
            {
              dup(i_patch, c, i_cell);
              i_patch += K;
            }
          ++i_cell;
          for (int k = 1; k <= p - 1; ++k)
            {
              if (S)
                skip(c, i_cell);
              else
                {
                  reg(i_patch, c, i_cell);
                  i_patch += K;
                }
              ++i_cell;
            }
          skip(c, i_cell); // node p: outer boundary
          ++i_cell;
        }
    }

    // Recursive decomposition into (d-1)-dimensional slices. Faces that
    // overlap an already-visited neighbor substitute the duplicate functor
    // for the regular one; outer-boundary faces recurse with S = true.
    template <typename Reg, typename Dup, typename Skip>
    void traverse_rec(int dd, int p, int c, Reg &reg, Dup &dup, Skip &skip, bool S,
                      long &i_cell, long i_patch)
    {
      if (dd == 1)
        {
          traverse_1d(p, c, reg, dup, skip, S, i_cell, i_patch);
          return;
        }
      const long K = patch_stride(dd, p);
      if (((c >> (dd - 1)) & 1) == 0)
        {
          traverse_rec(dd - 1, p, c, reg, dup, skip, true, i_cell, i_patch);
          for (int k = 1; k <= p - 1; ++k)
            {
              traverse_rec(dd - 1, p, c, reg, dup, skip, S, i_cell, i_patch);
              if (!S)
                i_patch += K;
            }
          traverse_rec(dd - 1, p, c, reg, dup, skip, S, i_cell, i_patch); // top: owner
        }
      else
        {
          // bottom face: shared interface (overlap) -- pass dup as the
          // regular operator
          traverse_rec(dd - 1, p, c, dup, dup, skip, S, i_cell, i_patch);
          if (!S)
            i_patch += K;
          for (int k = 1; k <= p - 1; ++k)
            {
              traverse_rec(dd - 1, p, c, reg, dup, skip, S, i_cell, i_patch);
              if (!S)
                i_patch += K;
            }
          traverse_rec(dd - 1, p, c, reg, dup, skip, true, i_cell, i_patch); // top: boundary
        }
    }
  } // namespace internal

  /// Dynamic distributor: visit all (p+1)^d local DoFs of patch-local cell c
  /// in lexicographic order, invoking exactly one functor per DoF:
  ///   reg(i_patch, c, i_cell)  -- DoF owned by this cell
  ///   dup(i_patch, c, i_cell)  -- DoF shared with an earlier cell
  ///   skip(c, i_cell)          -- DoF outside the patch interior
  /// Patch indices are produced by stride arithmetic alone.
  template <typename Reg, typename Dup, typename Skip>
  void traverse_dynamic(int dim, int p, int c, Reg &&reg, Dup &&dup, Skip &&skip)
  {
    long i_cell = 0;
    internal::traverse_rec(dim, p, c, reg, dup, skip, false, i_cell,
                           patch_base_offset(dim, p, c));
  }

  /// Precomputed tables for the lookup distributor: per cell, the (i_cell,
  /// i_patch) pairs partitioned into first-visit and overlap entries, plus
  /// the skipped local indices.
  struct LookupTables
  {
    int dim    = 0;
    int degree = 0;

    struct CellTable
    {
      std::vector<std::pair<int, int>> pairs; // (i_cell, i_patch)
      int                              n_unique = 0;
      int                              n_total  = 0;
      std::vector<int>                 skipped;
    };
    std::vector<CellTable> cells;

    std::size_t stored_entries() const
    {
      std::size_t s = 0;
      for (const auto &c : cells)
        s += 2 * c.pairs.size() + c.skipped.size();
      return s;
    }
  };

  /// Generate the tables by running the dynamic traversal once with
  /// recording functors; the two strategies cannot drift apart.
  inline LookupTables build_lookup(int dim, int p)
  {
    LookupTables t;
    t.dim    = dim;
    t.degree = p;
    t.cells.resize(std::size_t(1) << dim);
    for (int c = 0; c < (1 << dim); ++c)
      {
        auto &ct = t.cells[c];
        std::vector<std::pair<int, int>> dups;
        traverse_dynamic(
          dim, p, c,
          [&](long ip, int, long ic) { ct.pairs.emplace_back(int(ic), int(ip)); },
          [&](long ip, int, long ic) { dups.emplace_back(int(ic), int(ip)); },
          [&](int, long ic) { ct.skipped.push_back(int(ic)); });
        ct.n_unique = int(ct.pairs.size());
        ct.pairs.insert(ct.pairs.end(), dups.begin(), dups.end());
        ct.n_total = int(ct.pairs.size());
      }
    return t;
  }

  /// Table-driven traversal: phase 1 applies reg over the unique entries of
  /// every cell, phase 2 applies dup over the shared entries, phase 3
  /// applies skip over the skipped lists.
  template <typename Reg, typename Dup, typename Skip>
  void traverse_lookup(const LookupTables &t, Reg &&reg, Dup &&dup, Skip &&skip)
  {
    const int n_cells = int(t.cells.size());
    for (int c = 0; c < n_cells; ++c)
      {
        const auto &ct = t.cells[c];
        for (int k = 0; k < ct.n_unique; ++k)
          reg(long(ct.pairs[k].second), c, long(ct.pairs[k].first));
        for (int k = ct.n_unique; k < ct.n_total; ++k)
          dup(long(ct.pairs[k].second), c, long(ct.pairs[k].first));
      }
    for (int c = 0; c < n_cells; ++c)
      for (int u : t.cells[c].skipped)
        skip(c, long(u));
  }
} // namespace patchmg
