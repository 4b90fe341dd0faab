#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <map>
#include <set>
#include <tuple>

using namespace patchmg;
using namespace testing_support;

namespace
{
  enum class Kind
  {
    reg,
    dup,
    skip
  };

  // Independent reference built from the geometric identity of local DoFs:
  // bit k of the cell index gives its side along axis k, local node p on the
  // low cell and node 0 on the high cell meet at the shared interface owned
  // by the low cell; everything hitting the patch hull is skipped.
  struct Expected
  {
    Kind kind;
    long patch_index; // -1 for skip
  };

  Expected expected_action(int dim, int p, int c, long i_cell)
  {
    const LatticeIndex local(dim, p + 1);
    const auto         a = local.coords(i_cell);
    bool               boundary = false, duplicate = false;
    long               patch = 0;
    for (int k = 0; k < dim; ++k)
      {
        const int bit = (c >> k) & 1;
        if ((bit == 0 && a[k] == 0) || (bit == 1 && a[k] == p))
          boundary = true;
        if (bit == 1 && a[k] == 0)
          duplicate = true;
        patch += (long(bit) * p + a[k] - 1) * ipow(2 * p - 1, k);
      }
    if (boundary)
      return {Kind::skip, -1};
    return {duplicate ? Kind::dup : Kind::reg, patch};
  }

  using CallLog = std::vector<std::tuple<Kind, int, long, long>>; // kind, c, i_cell, i_patch

  CallLog record_dynamic(int dim, int p)
  {
    CallLog log;
    for (int c = 0; c < (1 << dim); ++c)
      traverse_dynamic(
        dim, p, c, [&](long ip, int cc, long ic) { log.emplace_back(Kind::reg, cc, ic, ip); },
        [&](long ip, int cc, long ic) { log.emplace_back(Kind::dup, cc, ic, ip); },
        [&](int cc, long ic) { log.emplace_back(Kind::skip, cc, ic, -1); });
    return log;
  }

  CallLog record_lookup(const LookupTables &t)
  {
    CallLog log;
    traverse_lookup(
      t, [&](long ip, int cc, long ic) { log.emplace_back(Kind::reg, cc, ic, ip); },
      [&](long ip, int cc, long ic) { log.emplace_back(Kind::dup, cc, ic, ip); },
      [&](int cc, long ic) { log.emplace_back(Kind::skip, cc, ic, -1); });
    return log;
  }
} // namespace

TEST_CASE("1D traversal call sequences (hand trace)")
{
  const int p = 3;
  {
    CallLog log;
    traverse_dynamic(
      1, p, 0, [&](long ip, int c, long ic) { log.emplace_back(Kind::reg, c, ic, ip); },
      [&](long ip, int c, long ic) { log.emplace_back(Kind::dup, c, ic, ip); },
      [&](int c, long ic) { log.emplace_back(Kind::skip, c, ic, -1); });
    const CallLog expected{{Kind::skip, 0, 0, -1},
                           {Kind::reg, 0, 1, 0},
                           {Kind::reg, 0, 2, 1},
                           {Kind::reg, 0, 3, 2}};
    REQUIRE(log == expected);
  }
  {
    CallLog log;
    traverse_dynamic(
      1, p, 1, [&](long ip, int c, long ic) { log.emplace_back(Kind::reg, c, ic, ip); },
      [&](long ip, int c, long ic) { log.emplace_back(Kind::dup, c, ic, ip); },
      [&](int c, long ic) { log.emplace_back(Kind::skip, c, ic, -1); });
    const CallLog expected{{Kind::dup, 1, 0, 2},
                           {Kind::reg, 1, 1, 3},
                           {Kind::reg, 1, 2, 4},
                           {Kind::skip, 1, 3, -1}};
    REQUIRE(log == expected);
  }
}

TEST_CASE("dynamic traversal matches the brute-force reference for all d, p")
{
  for (int dim : {1, 2, 3})
    for (int p = 1; p <= 8; ++p)
      {
        const auto log = record_dynamic(dim, p);
        // one call per (cell, local DoF), i_cell strictly increasing per cell
        REQUIRE(long(log.size()) == (1L << dim) * ipow(p + 1, dim));
        std::map<int, long> last_cell_index;
        for (const auto &[kind, c, ic, ip] : log)
          {
            const auto expected = expected_action(dim, p, c, ic);
            REQUIRE(kind == expected.kind);
            if (kind != Kind::skip)
              REQUIRE(ip == expected.patch_index);
            if (last_cell_index.count(c))
              REQUIRE(ic == last_cell_index[c] + 1);
            else
              REQUIRE(ic == 0);
            last_cell_index[c] = ic;
          }
      }
}

TEST_CASE("ownership bijection and duplicate coverage (d=2, p=2)")
{
  const int  dim = 2, p = 2;
  const auto log = record_dynamic(dim, p);

  std::set<long>      reg_targets;
  std::map<long, int> dup_count;
  int                 n_reg = 0;
  for (const auto &[kind, c, ic, ip] : log)
    {
      if (kind == Kind::reg)
        {
          ++n_reg;
          REQUIRE(!reg_targets.count(ip)); // single owner
          reg_targets.insert(ip);
        }
      else if (kind == Kind::dup)
        ++dup_count[ip];
    }
  REQUIRE(n_reg == 9); // (2p-1)^2 distinct patch indices receive reg
  for (long ip = 0; ip < 9; ++ip)
    REQUIRE(reg_targets.count(ip));
  // each interface DoF is duplicated once per additional incident cell;
  // the center belongs to all four cells
  REQUIRE(dup_count[4] == 3);
}

TEST_CASE("d=3, p=1: a single regular call in the whole patch")
{
  const auto log   = record_dynamic(3, 1);
  int        n_reg = 0;
  for (const auto &[kind, c, ic, ip] : log)
    if (kind == Kind::reg)
      {
        ++n_reg;
        REQUIRE(c == 0);
        REQUIRE(ip == 0);
      }
  REQUIRE(n_reg == 1);
}

TEST_CASE("patch strides")
{
  REQUIRE(patch_stride(1, 5) == 1);
  REQUIRE(patch_stride(2, 5) == 9);
  REQUIRE(patch_stride(3, 5) == 81);
}

TEST_CASE("lookup tables: partition counts and invariants")
{
  SECTION("d=2, p=3: left/bottom cell")
  {
    // The left/bottom cell skips its entire bottom face and the left node of
    // every active line: 7 of 16 local DoFs; it owns the rest, nothing is
    // duplicated.
    const auto t = build_lookup(2, 3);
    REQUIRE(t.cells[0].n_unique == 9);
    REQUIRE(t.cells[0].n_total == 9);
    REQUIRE(t.cells[0].skipped.size() == 7);
  }

  for (int dim : {2, 3})
    for (int p = 1; p <= 8; ++p)
      {
        const auto t        = build_lookup(dim, p);
        long       unique   = 0;
        const long interior = ipow(2 * p - 1, dim);
        for (const auto &cell : t.cells)
          {
            unique += cell.n_unique;
            REQUIRE(cell.n_total + long(cell.skipped.size()) == ipow(p + 1, dim));
            REQUIRE(cell.n_unique <= cell.n_total);
          }
        REQUIRE(unique == interior);
      }
}

TEST_CASE("lookup and dynamic traversals produce identical call multisets")
{
  for (int dim : {2, 3})
    for (int p = 1; p <= 8; ++p)
      {
        auto dynamic = record_dynamic(dim, p);
        auto lookup  = record_lookup(build_lookup(dim, p));
        std::sort(dynamic.begin(), dynamic.end());
        std::sort(lookup.begin(), lookup.end());
        REQUIRE(dynamic == lookup);
      }
}

TEST_CASE("duplicate call count matches the overlap arithmetic")
{
  for (int dim : {2, 3})
    for (int p : {1, 2, 3, 5})
      {
        const auto t = build_lookup(dim, p);
        long       total = 0;
        for (const auto &cell : t.cells)
          total += cell.n_total;
        long dups = 0;
        for (const auto &[kind, c, ic, ip] : record_dynamic(dim, p))
          dups += (kind == Kind::dup);
        REQUIRE(dups == total - ipow(2 * p - 1, dim));
      }
}
