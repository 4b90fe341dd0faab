#pragma once

#include <patchmg/basis.hpp>
#include <patchmg/counters.hpp>
#include <patchmg/types.hpp>

#include <array>

namespace patchmg
{
  /// A 1D matrix prepared for even-odd application. The basis tables obey
  /// the mirror symmetry M[r][c] = sign * M[R-1-r][C-1-c] (values: +1,
  /// derivatives: -1), which halves the multiplication count of a 1D
  /// contraction: the even/odd parts of the input couple only to the
  /// corresponding parts of the output.
  struct EOMatrix
  {
    int   n_rows = 0;
    int   n_cols = 0;
    int   sign   = +1;
    Table full;

    // Reduced matrices, me x ne and me x no with me=(R+1)/2, ne=(C+1)/2,
    // no=C/2. Rows beyond mo=R/2 of `odd` are identically zero for sign=+1
    // (and of `even` for sign=-1) but kept for a uniform kernel.
    Table even;
    Table odd;

    static EOMatrix create(const Table &m, int sign)
    {
      EOMatrix eo;
      eo.n_rows = m.n_rows;
      eo.n_cols = m.n_cols;
      eo.sign   = sign;
      eo.full   = m;
      const int me = (m.n_rows + 1) / 2;
      const int ne = (m.n_cols + 1) / 2;
      const int no = m.n_cols / 2;
      eo.even      = Table(me, ne);
      eo.odd       = Table(me, no);
      for (int a = 0; a < me; ++a)
        {
          for (int i = 0; i < no; ++i)
            {
              eo.even(a, i) = 0.5 * (m(a, i) + m(a, m.n_cols - 1 - i));
              eo.odd(a, i)  = 0.5 * (m(a, i) - m(a, m.n_cols - 1 - i));
            }
          if (m.n_cols % 2 == 1)
            eo.even(a, ne - 1) = m(a, no);
        }
      return eo;
    }

    /// FLOPs of one line application (used by the software counters).
    std::uint64_t flops_per_line(bool accumulate) const
    {
      const int me = (n_rows + 1) / 2, mo = n_rows / 2;
      const int ne = (n_cols + 1) / 2, no = n_cols / 2;
      return std::uint64_t(2 * no)                // fold input
             + std::uint64_t(2 * me) * (ne + no)  // two half products
             + std::uint64_t(accumulate ? 2 : 1) * (me + mo); // combine
    }
  };

  namespace internal
  {
    /// One even-odd line: y[0..R) (+)= M * u[0..C), both strided.
    template <bool accumulate>
    inline void eo_line(const EOMatrix &m,
                        const double   *u,
                        long            u_stride,
                        double         *y,
                        long            y_stride)
    {
      const int C = m.n_cols, R = m.n_rows;
      const int ne = (C + 1) / 2, no = C / 2;
      const int me = (R + 1) / 2, mo = R / 2;

      double e[16], o[16], ye[16], yo[16];
      for (int i = 0; i < no; ++i)
        {
          const double a = u[i * u_stride];
          const double b = u[(C - 1 - i) * u_stride];
          e[i]           = a + b;
          o[i]           = a - b;
        }
      if (C % 2 == 1)
        e[ne - 1] = u[no * u_stride];

      for (int a = 0; a < me; ++a)
        {
          double se = 0.0, so = 0.0;
          const double *re = &m.even.data[std::size_t(a) * ne];
          const double *ro = &m.odd.data[std::size_t(a) * no];
          for (int i = 0; i < ne; ++i)
            se += re[i] * e[i];
          for (int i = 0; i < no; ++i)
            so += ro[i] * o[i];
          ye[a] = se;
          yo[a] = so;
        }

      const double s = m.sign;
      for (int a = 0; a < mo; ++a)
        {
          const double top = ye[a] + yo[a];
          const double bot = s * (ye[a] - yo[a]);
          if constexpr (accumulate)
            {
              y[a * y_stride] += top;
              y[(R - 1 - a) * y_stride] += bot;
            }
          else
            {
              y[a * y_stride]           = top;
              y[(R - 1 - a) * y_stride] = bot;
            }
        }
      if (R % 2 == 1)
        {
          const double mid = ye[me - 1] + yo[me - 1];
          if constexpr (accumulate)
            y[mo * y_stride] += mid;
          else
            y[mo * y_stride] = mid;
        }
    }

    /// Plain dense line as reference path.
    template <bool accumulate>
    inline void dense_line(const Table &m,
                           const double *u,
                           long          u_stride,
                           double       *y,
                           long          y_stride)
    {
      for (int a = 0; a < m.n_rows; ++a)
        {
          double s = 0.0;
          for (int c = 0; c < m.n_cols; ++c)
            s += m(a, c) * u[c * u_stride];
          if constexpr (accumulate)
            y[a * y_stride] += s;
          else
            y[a * y_stride] = s;
        }
    }
  } // namespace internal

  /// Contract `m` along `axis` of a d-dimensional tensor with per-axis input
  /// extents `in_ext` (axis extent must equal m.n_cols; the output extent
  /// along `axis` becomes m.n_rows). Lexicographic storage, axis 0 fastest.
  inline void sweep_eo(const EOMatrix          &m,
                       int                       dim,
                       int                       axis,
                       const std::array<int, 3> &in_ext,
                       const double             *in,
                       double                   *out,
                       bool                      accumulate,
                       Counters                 &counters)
  {
    long stride = 1;
    for (int k = 0; k < axis; ++k)
      stride *= in_ext[k];
    long n_hi = 1;
    for (int k = axis + 1; k < dim; ++k)
      n_hi *= in_ext[k];

    const long in_block  = stride * m.n_cols;
    const long out_block = stride * m.n_rows;
    for (long hi = 0; hi < n_hi; ++hi)
      for (long lo = 0; lo < stride; ++lo)
        {
          const double *u = in + hi * in_block + lo;
          double       *y = out + hi * out_block + lo;
          if (accumulate)
            internal::eo_line<true>(m, u, stride, y, stride);
          else
            internal::eo_line<false>(m, u, stride, y, stride);
        }
    counters.add_flops(std::uint64_t(n_hi * stride) * m.flops_per_line(accumulate));
  }

  namespace internal
  {
    /// Sparse 1D operator in CSR form, for transfer matrices whose recorded
    /// zeros are worth skipping.
    struct Csr1D
    {
      int                 n_rows = 0;
      int                 n_cols = 0;
      std::vector<int>    row_ptr;
      std::vector<int>    col;
      std::vector<double> val;

      Csr1D transposed() const
      {
        Csr1D t;
        t.n_rows = n_cols;
        t.n_cols = n_rows;
        t.row_ptr.assign(n_cols + 1, 0);
        for (int c : col)
          ++t.row_ptr[c + 1];
        for (int r = 0; r < n_cols; ++r)
          t.row_ptr[r + 1] += t.row_ptr[r];
        t.col.resize(col.size());
        t.val.resize(val.size());
        std::vector<int> fill(t.row_ptr.begin(), t.row_ptr.end() - 1);
        for (int r = 0; r < n_rows; ++r)
          for (int k = row_ptr[r]; k < row_ptr[r + 1]; ++k)
            {
              const int pos = fill[col[k]]++;
              t.col[pos]    = r;
              t.val[pos]    = val[k];
            }
        return t;
      }
    };

    inline void sweep_csr(const Csr1D              &m,
                          int                       dim,
                          int                       axis,
                          const std::array<int, 3> &in_ext,
                          const double             *in,
                          double                   *out,
                          Counters                 &counters)
    {
      long stride = 1;
      for (int k = 0; k < axis; ++k)
        stride *= in_ext[k];
      long n_hi = 1;
      for (int k = axis + 1; k < dim; ++k)
        n_hi *= in_ext[k];

      const long in_block  = stride * m.n_cols;
      const long out_block = stride * m.n_rows;
      for (long hi = 0; hi < n_hi; ++hi)
        for (long lo = 0; lo < stride; ++lo)
          {
            const double *u = in + hi * in_block + lo;
            double       *y = out + hi * out_block + lo;
            for (int r = 0; r < m.n_rows; ++r)
              {
                double s = 0;
                for (int k = m.row_ptr[r]; k < m.row_ptr[r + 1]; ++k)
                  s += m.val[k] * u[long(m.col[k]) * stride];
                y[long(r) * stride] = s;
              }
          }
      counters.add_flops(std::uint64_t(n_hi * stride) * 2 * m.val.size());
    }
  } // namespace internal

  /// Dense variant of sweep_eo for matrices without usable symmetry.
  inline void sweep_dense(const Table              &m,
                          int                       dim,
                          int                       axis,
                          const std::array<int, 3> &in_ext,
                          const double             *in,
                          double                   *out,
                          bool                      accumulate,
                          Counters                 &counters)
  {
    long stride = 1;
    for (int k = 0; k < axis; ++k)
      stride *= in_ext[k];
    long n_hi = 1;
    for (int k = axis + 1; k < dim; ++k)
      n_hi *= in_ext[k];

    const long in_block  = stride * m.n_cols;
    const long out_block = stride * m.n_rows;
    for (long hi = 0; hi < n_hi; ++hi)
      for (long lo = 0; lo < stride; ++lo)
        {
          const double *u = in + hi * in_block + lo;
          double       *y = out + hi * out_block + lo;
          if (accumulate)
            internal::dense_line<true>(m, u, stride, y, stride);
          else
            internal::dense_line<false>(m, u, stride, y, stride);
        }
    const std::uint64_t per_line = std::uint64_t(2) * m.n_rows * m.n_cols + (accumulate ? m.n_rows : 0);
    counters.add_flops(std::uint64_t(n_hi * stride) * per_line);
  }
} // namespace patchmg
