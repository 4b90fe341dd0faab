#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <Eigen/SparseCholesky>

#include <map>
#include <set>

using namespace patchmg;
using namespace testing_support;

TEST_CASE("patch gather: ramp data and duplicated interfaces")
{
  PatchFixture f(2, 1, 2);
  Vector       u(f.dofs.n_dofs), b(f.dofs.n_dofs, 0.0);
  for (long i = 0; i < f.dofs.n_dofs; ++i)
    u[i] = double(i);

  local::fetch_patch(f.data, f.workspace, 0);
  local::gather_patch(f.data, f.workspace, 0, u, b);

  const int  top = f.top();
  const long cs  = f.data.cell_size(top);
  const auto &patch = f.patches.patches[0];
  for (int c = 0; c < 4; ++c)
    {
      const auto &cd = f.dofs.cell_dofs[patch.cells[c]];
      for (long i = 0; i < cs; ++i)
        REQUIRE(f.workspace.lv[top].in_cells[c * cs + i] == double(cd[i]));
    }
  // interface DoFs carry the same value in every incident cell buffer
  std::map<int, double> seen;
  for (int c = 0; c < 4; ++c)
    {
      const auto &cd = f.dofs.cell_dofs[patch.cells[c]];
      for (long i = 0; i < cs; ++i)
        {
          if (seen.count(cd[i]))
            REQUIRE(seen[cd[i]] == f.workspace.lv[top].in_cells[c * cs + i]);
          seen[cd[i]] = f.workspace.lv[top].in_cells[c * cs + i];
        }
    }
}

TEST_CASE("patch scatter-add: masked single update per DoF")
{
  for (int dim : {2, 3})
    {
      PatchFixture f(dim, 1, 2);
      const int    top = f.top();
      const long   n   = f.interior();

      for (int patch_index : {0, int(f.patches.patches.size()) - 1})
        {
          local::fetch_patch(f.data, f.workspace, patch_index);

          SECTION("ones increment interior DoFs exactly once (d=" + std::to_string(dim) +
                  ", patch " + std::to_string(patch_index) + ")")
          {
            Vector u(f.dofs.n_dofs, 0.0);
            std::fill(f.workspace.lv[top].sol.begin(), f.workspace.lv[top].sol.end(), 1.0);
            local::distribute_correction(f.data, f.workspace);
            local::scatter_patch(f.data, f.workspace, patch_index, u);

            const auto     interior = f.patches.interior_dofs(f.dofs, patch_index);
            std::set<int>  interior_set(interior.begin(), interior.end());
            for (long i = 0; i < f.dofs.n_dofs; ++i)
              REQUIRE(u[i] == (interior_set.count(int(i)) ? 1.0 : 0.0));
          }

          SECTION("random corrections land exactly (d=" + std::to_string(dim) + ", patch " +
                  std::to_string(patch_index) + ")")
          {
            const Vector d = random_vector(n, 77 + patch_index);
            Vector       u = random_vector(f.dofs.n_dofs, 3);
            const Vector before = u;
            std::copy(d.begin(), d.end(), f.workspace.lv[top].sol.begin());
            local::distribute_correction(f.data, f.workspace);
            local::scatter_patch(f.data, f.workspace, patch_index, u);

            const auto interior = f.patches.interior_dofs(f.dofs, patch_index);
            for (long i = 0; i < n; ++i)
              REQUIRE(u[interior[i]] - before[interior[i]] ==
                      Catch::Approx(d[i]).margin(1e-15));
            std::set<int> interior_set(interior.begin(), interior.end());
            for (long i = 0; i < f.dofs.n_dofs; ++i)
              if (!interior_set.count(int(i)))
                REQUIRE(u[i] == before[i]);
          }
        }
    }
}

TEST_CASE("local vmult equals the dense interior patch operator")
{
  for (int dim : {2, 3})
    for (int p : {1, 2, 3})
      for (double delta : {0.0, 0.10})
        for (auto kind : {DistributorKind::dynamic_traversal, DistributorKind::lookup})
          {
            LocalSolverConfig cfg;
            cfg.distributor = kind;
            PatchFixture f(dim, 1, p, delta, 13, cfg);
            const int    top = f.top();
            const long   n   = f.interior();

            for (std::size_t j = 0; j < f.patches.patches.size(); j += 3)
              {
                const auto oracle = make_patch_oracle(f.hierarchy.finest(), f.dofs, f.patches,
                                                      f.data.eval[top], int(j));
                local::fetch_patch(f.data, f.workspace, int(j));
                const Vector x = random_vector(n, 7 * j + p);
                Vector       y(n);
                local::local_vmult(f.data, f.workspace, top, x.data(), y.data());

                Eigen::Map<const Eigen::VectorXd> xm(x.data(), n);
                Eigen::VectorXd                   ref = oracle.interior_matrix * xm;
                Vector                            refv(ref.data(), ref.data() + n);
                REQUIRE(rel_max_diff(y, refv) < 1e-12);
              }
          }
}

TEST_CASE("local vmult is symmetric")
{
  PatchFixture f(3, 1, 2, 0.1, 19);
  const int    top = f.top();
  const long   n   = f.interior();
  local::fetch_patch(f.data, f.workspace, 4);
  const Vector x = random_vector(n, 1), y = random_vector(n, 2);
  Vector       ax(n), ay(n);
  local::local_vmult(f.data, f.workspace, top, x.data(), ax.data());
  local::local_vmult(f.data, f.workspace, top, y.data(), ay.data());
  REQUIRE(dot(y, ax) == Catch::Approx(dot(x, ay)).epsilon(1e-12));
}

TEST_CASE("local residual")
{
  SECTION("zero state gives the restricted right-hand side")
  {
    PatchFixture f(2, 1, 3);
    auto         ev = f.data.eval[f.top()];
    LevelOperator op{&f.hierarchy.finest(), &f.dofs, &f.data.geom[f.top()], &ev};
    const Vector  b = make_rhs(op);
    const Vector  u(f.dofs.n_dofs, 0.0);

    local::fetch_patch(f.data, f.workspace, 0);
    local::gather_patch(f.data, f.workspace, 0, u, b);
    {
      PhaseScope scope(f.workspace.counters, Phase::evaluate_operator);
      local::apply_cells(f.data, f.workspace, f.top());
    }
    local::local_residual(f.data, f.workspace);

    const auto interior = f.patches.interior_dofs(f.dofs, 0);
    for (long i = 0; i < f.interior(); ++i)
      REQUIRE(f.workspace.lv[f.top()].rhs[i] == Catch::Approx(b[interior[i]]).margin(1e-15));
  }

  SECTION("the exact solution yields zero residual")
  {
    PatchFixture f(2, 1, 2);
    auto          ev = f.data.eval[f.top()];
    LevelOperator op{&f.hierarchy.finest(), &f.dofs, &f.data.geom[f.top()], &ev};
    const Vector  b = make_rhs(op);
    const auto    A = assemble_oracle(op);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    Eigen::Map<const Eigen::VectorXd>                  bm(b.data(), long(b.size()));
    Eigen::VectorXd                                    x = solver.solve(bm);
    const Vector u(x.data(), x.data() + x.size());

    double bscale = 0;
    for (double v : b)
      bscale = std::max(bscale, std::abs(v));
    for (std::size_t j = 0; j < f.patches.patches.size(); ++j)
      {
        local::fetch_patch(f.data, f.workspace, int(j));
        local::gather_patch(f.data, f.workspace, int(j), u, b);
        local::apply_cells(f.data, f.workspace, f.top());
        local::local_residual(f.data, f.workspace);
        for (long i = 0; i < f.interior(); ++i)
          REQUIRE(std::abs(f.workspace.lv[f.top()].rhs[i]) < 1e-12 * bscale);
      }
  }

  SECTION("single patch: residual matches the oracle restriction")
  {
    PatchFixture f(3, 0, 2, 0.1, 29);
    auto          ev = f.data.eval[f.top()];
    LevelOperator op{&f.hierarchy.finest(), &f.dofs, &f.data.geom[f.top()], &ev};
    const Vector  b = make_rhs(op);
    const auto    A = assemble_oracle(op);

    // the solver keeps homogeneous boundary values; build a state like that
    Vector u = random_vector(f.dofs.n_dofs, 55);
    for (long i = 0; i < f.dofs.n_dofs; ++i)
      if (f.dofs.boundary_mask[i])
        u[i] = 0.0;

    Eigen::Map<const Eigen::VectorXd> um(u.data(), long(u.size()));
    Eigen::VectorXd                   au = A * um;

    local::fetch_patch(f.data, f.workspace, 0);
    local::gather_patch(f.data, f.workspace, 0, u, b);
    local::apply_cells(f.data, f.workspace, f.top());
    local::local_residual(f.data, f.workspace);

    const auto interior = f.patches.interior_dofs(f.dofs, 0);
    for (long i = 0; i < f.interior(); ++i)
      REQUIRE(f.workspace.lv[f.top()].rhs[i] ==
              Catch::Approx(b[interior[i]] - au(interior[i])).margin(1e-10));
  }
}

TEST_CASE("gather-scatter round trip preserves interior values")
{
  PatchFixture f(2, 1, 3);
  const int    top = f.top();
  local::fetch_patch(f.data, f.workspace, 3);

  const Vector d = random_vector(f.interior(), 21);
  Vector       u(f.dofs.n_dofs, 0.0), b(f.dofs.n_dofs, 0.0);
  std::copy(d.begin(), d.end(), f.workspace.lv[top].sol.begin());
  local::distribute_correction(f.data, f.workspace);
  local::scatter_patch(f.data, f.workspace, 3, u);

  // gather back through the cell buffers and extract the interior
  local::gather_patch(f.data, f.workspace, 3, u, b);
  Vector       out(f.interior());
  const long   cs = f.data.cell_size(top);
  const double *in = f.workspace.lv[top].in_cells.data();
  traverse_lookup(
    f.data.lookup[top], [&](long ip, int c, long ic) { out[ip] = in[c * cs + ic]; },
    [](long, int, long) {}, [](int, long) {});
  REQUIRE(rel_max_diff(out, d) < 1e-15);
}

TEST_CASE("distributor choice changes nothing but the call order")
{
  PatchFixture fd(3, 1, 3, 0.1, 7, LocalSolverConfig{});
  LocalSolverConfig lu;
  lu.distributor = DistributorKind::lookup;
  PatchFixture fl(3, 1, 3, 0.1, 7, lu);

  const int    top = fd.top();
  const Vector x   = random_vector(fd.interior(), 31);
  Vector       yd(fd.interior()), yl(fd.interior());

  local::fetch_patch(fd.data, fd.workspace, 2);
  local::local_vmult(fd.data, fd.workspace, top, x.data(), yd.data());
  local::fetch_patch(fl.data, fl.workspace, 2);
  local::local_vmult(fl.data, fl.workspace, top, x.data(), yl.data());
  REQUIRE(rel_max_diff(yd, yl) < 1e-14);
}

TEST_CASE("local vmult FLOP count at p=7, d=3 is near the published value")
{
  PatchFixture f(3, 0, 7);
  const int    top = f.top();
  f.workspace.counters.enabled = true;
  local::fetch_patch(f.data, f.workspace, 0);
  Vector x(f.interior(), 1.0), y(f.interior());
  f.workspace.counters.flops = 0;
  local::local_vmult(f.data, f.workspace, top, x.data(), y.data());
  const double flops = double(f.workspace.counters.flops);
  REQUIRE(flops > 491530.0 * 0.85);
  REQUIRE(flops < 491530.0 * 1.15);
}
