#pragma once

#include <array>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace patchmg
{
  using Vector = std::vector<double>;

  /// Integer power, used for lattice sizes like (p*n+1)^d.
  inline long ipow(long base, int exp)
  {
    long r = 1;
    for (int i = 0; i < exp; ++i)
      r *= base;
    return r;
  }

  /// Lexicographic multi-index over a d-dimensional box, axis 0 fastest.
  struct LatticeIndex
  {
    int                dim;
    std::array<int, 3> extent; // entries beyond dim are 1

    LatticeIndex(int d, int n_per_axis)
      : dim(d)
      , extent{1, 1, 1}
    {
      for (int k = 0; k < d; ++k)
        extent[k] = n_per_axis;
    }

    LatticeIndex(int d, const std::array<int, 3> &n)
      : dim(d)
      , extent(n)
    {
      for (int k = d; k < 3; ++k)
        extent[k] = 1;
    }

    long size() const
    {
      return long(extent[0]) * extent[1] * extent[2];
    }

    long linear(const std::array<int, 3> &c) const
    {
      return c[0] + long(extent[0]) * (c[1] + long(extent[1]) * c[2]);
    }

    std::array<int, 3> coords(long idx) const
    {
      std::array<int, 3> c{0, 0, 0};
      c[0] = int(idx % extent[0]);
      idx /= extent[0];
      c[1] = int(idx % extent[1]);
      c[2] = int(idx / extent[1]);
      return c;
    }
  };

  /// Small dense row-major matrix for basis tables and transfer operators.
  struct Table
  {
    int                 n_rows = 0;
    int                 n_cols = 0;
    std::vector<double> data;

    Table() = default;
    Table(int r, int c)
      : n_rows(r)
      , n_cols(c)
      , data(std::size_t(r) * c, 0.0)
    {}

    double &operator()(int r, int c)
    {
      return data[std::size_t(r) * n_cols + c];
    }
    double operator()(int r, int c) const
    {
      return data[std::size_t(r) * n_cols + c];
    }

    Table transposed() const
    {
      Table t(n_cols, n_rows);
      for (int r = 0; r < n_rows; ++r)
        for (int c = 0; c < n_cols; ++c)
          t(c, r) = (*this)(r, c);
      return t;
    }
  };

  inline void axpy(double a, const Vector &x, Vector &y)
  {
    assert(x.size() == y.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      y[i] += a * x[i];
  }

  inline double dot(const Vector &x, const Vector &y)
  {
    assert(x.size() == y.size());
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
      s += x[i] * y[i];
    return s;
  }

  inline double norm2(const Vector &x)
  {
    double s = 0;
    for (double v : x)
      s += v * v;
    return std::sqrt(s);
  }
} // namespace patchmg
