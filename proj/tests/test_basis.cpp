#include "test_support.hpp"

#include <catch2/catch_amalgamated.hpp>

using namespace patchmg;
using namespace testing_support;

TEST_CASE("Gauss rule integrates polynomials of degree 2q-1 exactly")
{
  for (int q = 1; q <= 10; ++q)
    {
      std::vector<double> x, w;
      gauss_rule(q, x, w);
      for (int k = 0; k <= 2 * q - 1; ++k)
        {
          double s = 0;
          for (int a = 0; a < q; ++a)
            s += w[a] * std::pow(x[a], k);
          REQUIRE(s == Catch::Approx(1.0 / (k + 1)).epsilon(1e-13));
        }
      // exact symmetry by construction (mirrored half stored as 1 - x)
      for (int a = 0; a < q / 2; ++a)
        {
          REQUIRE(x[q - 1 - a] == 1.0 - x[a]);
          REQUIRE(w[a] == w[q - 1 - a]);
        }
    }
}

TEST_CASE("Gauss-Lobatto nodes include endpoints and are symmetric")
{
  for (int n = 2; n <= 9; ++n)
    {
      const auto x = gauss_lobatto_nodes(n);
      REQUIRE(x.front() == 0.0);
      REQUIRE(x.back() == 1.0);
      for (int i = 0; i < n / 2; ++i)
        REQUIRE(x[n - 1 - i] == 1.0 - x[i]);
      for (int i = 0; i + 1 < n; ++i)
        REQUIRE(x[i] < x[i + 1]);
    }
  // p=2 has the midpoint
  REQUIRE(gauss_lobatto_nodes(3)[1] == 0.5);
}

TEST_CASE("p=1 basis is the linear hat pair")
{
  const auto b = make_basis(1);
  REQUIRE(b.nodes == std::vector<double>{0.0, 1.0});
  for (int a = 0; a < b.n_q; ++a)
    {
      REQUIRE(b.shape_values(a, 0) == Catch::Approx(1.0 - b.quad_points[a]).margin(1e-15));
      REQUIRE(b.shape_values(a, 0) + b.shape_values(a, 1) == Catch::Approx(1.0).margin(1e-15));
    }
}

TEST_CASE("partition of unity and derivative row sums")
{
  for (int p : {2, 3, 5, 7})
    {
      const auto b = make_basis(p);
      for (int a = 0; a < b.n_q; ++a)
        {
          double sv = 0, sg = 0;
          for (int i = 0; i <= p; ++i)
            {
              sv += b.shape_values(a, i);
              sg += b.shape_gradients(a, i);
            }
          REQUIRE(sv == Catch::Approx(1.0).margin(1e-14));
          REQUIRE(sg == Catch::Approx(0.0).margin(1e-12));
        }
    }
}

TEST_CASE("Lagrange property at the nodes")
{
  const auto b = make_basis(4);
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j)
      REQUIRE(internal::lagrange_value(b.nodes, i, b.nodes[j]) ==
              Catch::Approx(i == j ? 1.0 : 0.0).margin(1e-13));
}

TEST_CASE("p=7 quadrature stiffness matches a high-order quadrature oracle")
{
  // The integrand phi_i' phi_j' has degree 2p-2, within reach of the default
  // rule; the oracle integrates with a much finer rule.
  const int  p  = 7;
  const auto b  = make_basis(p);
  const auto bo = make_basis(p, 2 * p + 4);
  for (int i = 0; i <= p; ++i)
    for (int j = 0; j <= p; ++j)
      {
        double s = 0, so = 0;
        for (int a = 0; a < b.n_q; ++a)
          s += b.quad_weights[a] * b.shape_gradients(a, i) * b.shape_gradients(a, j);
        for (int a = 0; a < bo.n_q; ++a)
          so += bo.quad_weights[a] * bo.shape_gradients(a, i) * bo.shape_gradients(a, j);
        REQUIRE(s == Catch::Approx(so).margin(1e-11 * std::abs(so) + 1e-12));
      }
}

TEST_CASE("collocation derivative differentiates exactly at q = p+1")
{
  const int  p = 5;
  const auto b = make_basis(p);
  // values of x^k at quadrature points, derivative via the collocation matrix
  for (int k = 0; k <= p; ++k)
    for (int a = 0; a < b.n_q; ++a)
      {
        double d = 0;
        for (int c = 0; c < b.n_q; ++c)
          d += b.colloc_gradients(a, c) * std::pow(b.quad_points[c], k);
        const double exact = k == 0 ? 0.0 : k * std::pow(b.quad_points[a], k - 1);
        REQUIRE(d == Catch::Approx(exact).margin(1e-11));
      }
}

TEST_CASE("make_basis rejects invalid arguments")
{
  REQUIRE_THROWS(make_basis(0));
  REQUIRE_THROWS(make_basis(3, 3));
}

TEST_CASE("even-odd sweeps equal dense sweeps")
{
  std::mt19937_64 gen(99);
  auto            rnd = [&] { return double(gen() >> 11) * 0x1.0p-53 - 0.5; };

  for (int dim : {2, 3})
    for (int sign : {+1, -1})
      for (auto [r, c] : {std::pair{4, 4}, {8, 8}, {5, 3}, {8, 6}, {7, 7}})
        {
          Table m{r, c};
          for (int i = 0; i < r; ++i)
            for (int j = 0; j < c; ++j)
              {
                if (i > (r - 1) / 2 || (2 * i == r - 1 && 2 * j > c - 1))
                  continue;
                const double v = rnd();
                m(i, j)        = v;
                m(r - 1 - i, c - 1 - j) = sign * v;
              }
          if (r % 2 == 1 && c % 2 == 1 && sign == -1)
            m(r / 2, c / 2) = 0.0;

          const auto eo = EOMatrix::create(m, sign);

          std::array<int, 3> ext{c, c, dim == 3 ? c : 1};
          long               n_in = 1, n_out = 1;
          for (int k = 0; k < dim; ++k)
            {
              n_in *= ext[k];
              n_out *= (k == 1) ? r : ext[k];
            }
          const Vector in = random_vector(n_in, 7 * r + c + sign + dim);
          Vector       out_eo(n_out, 0.3), out_dense(n_out, 0.3);

          Counters cnt;
          for (bool acc : {false, true})
            {
              sweep_eo(eo, dim, 1, ext, in.data(), out_eo.data(), acc, cnt);
              sweep_dense(m, dim, 1, ext, in.data(), out_dense.data(), acc, cnt);
              for (long i = 0; i < n_out; ++i)
                REQUIRE(out_eo[i] == Catch::Approx(out_dense[i]).margin(1e-13));
            }
        }
}

TEST_CASE("even-odd sweep counts fewer operations than dense")
{
  const auto b  = make_basis(7);
  const auto eo = EOMatrix::create(b.shape_values, +1);
  REQUIRE(eo.flops_per_line(false) < std::uint64_t(2) * eo.n_rows * eo.n_cols);
}
