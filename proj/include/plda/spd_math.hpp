// plda/spd_math.hpp

// Copyright 2026  The plda2cov Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "plda/errors.hpp"

namespace plda {

/// Dense symmetric matrix of 64-bit floats, row-major.  Storage is kept
/// bitwise symmetric: every constructor and mutator writes both triangles
/// from the same value, so (i,j) == (j,i) exactly at all times.
class SymMatrix {
 public:
  SymMatrix() = default;

  /// dim x dim zero matrix.
  explicit SymMatrix(int dim) : dim_(dim), data_(check_dim(dim) * dim, 0.0) {}

  /// From a full row-major d*d array.  The input must be symmetric within
  /// an absolute tolerance of 1e-12 per entry; storage is the exact
  /// average of the two triangles.
  SymMatrix(int dim, std::span<const double> entries)
      : dim_(dim), data_(check_dim(dim) * dim) {
    if (entries.size() != static_cast<std::size_t>(dim) * dim)
      throw DimensionMismatch("SymMatrix: expected " + std::to_string(dim) +
                              "x" + std::to_string(dim) + " entries, got " +
                              std::to_string(entries.size()));
    for (int r = 0; r < dim; ++r) {
      for (int c = r; c < dim; ++c) {
        double lo = entries[static_cast<std::size_t>(r) * dim + c];
        double hi = entries[static_cast<std::size_t>(c) * dim + r];
        if (std::abs(lo - hi) > 1e-12)
          throw InvalidArgument("SymMatrix: entries (" + std::to_string(r) +
                                "," + std::to_string(c) +
                                ") differ across the diagonal by " +
                                std::to_string(std::abs(lo - hi)));
        set_pair(r, c, 0.5 * (lo + hi));
      }
    }
  }

  static SymMatrix identity(int dim) {
    SymMatrix m(dim);
    for (int i = 0; i < dim; ++i) m.set_pair(i, i, 1.0);
    return m;
  }

  static SymMatrix diagonal(std::span<const double> diag) {
    SymMatrix m(static_cast<int>(diag.size()));
    for (int i = 0; i < m.dim_; ++i) m.set_pair(i, i, diag[i]);
    return m;
  }

  int dim() const { return dim_; }

  double operator()(int r, int c) const {
    return data_[static_cast<std::size_t>(r) * dim_ + c];
  }

  /// Sets (r,c) and (c,r) to the same value.
  void set(int r, int c, double v) { set_pair(r, c, v); }

  /// this += alpha * other.
  void add_scaled(const SymMatrix &other, double alpha) {
    require_same_dim(other.dim_);
    for (std::size_t i = 0; i < data_.size(); ++i)
      data_[i] += alpha * other.data_[i];
  }

  /// this += alpha * v v^T.  Symmetric by construction: the upper triangle
  /// is computed once and mirrored.
  void add_outer(std::span<const double> v, double alpha) {
    require_same_dim(static_cast<int>(v.size()));
    for (int r = 0; r < dim_; ++r)
      for (int c = r; c < dim_; ++c)
        set_pair(r, c, (*this)(r, c) + alpha * v[r] * v[c]);
  }

  /// this += eps * I.
  void add_diag(double eps) {
    for (int i = 0; i < dim_; ++i) set_pair(i, i, (*this)(i, i) + eps);
  }

  void scale(double alpha) {
    for (double &x : data_) x *= alpha;
  }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : data_) m = std::max(m, std::abs(x));
    return m;
  }

  /// Frobenius norm.
  double norm() const {
    double s = 0.0;
    for (double x : data_) s += x * x;
    return std::sqrt(s);
  }

  bool is_zero() const {
    for (double x : data_)
      if (x != 0.0) return false;
    return true;
  }

  std::span<const double> data() const { return data_; }

 private:
  static int check_dim(int dim) {
    if (dim < 1)
      throw InvalidArgument("SymMatrix: dim must be >= 1, got " +
                            std::to_string(dim));
    return dim;
  }

  void require_same_dim(int other) const {
    if (other != dim_)
      throw DimensionMismatch("SymMatrix: dim " + std::to_string(dim_) +
                              " vs " + std::to_string(other));
  }

  void set_pair(int r, int c, double v) {
    data_[static_cast<std::size_t>(r) * dim_ + c] = v;
    data_[static_cast<std::size_t>(c) * dim_ + r] = v;
  }

  int dim_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular Cholesky factor L with A = L L^T.
class CholeskyFactor {
 public:
  CholeskyFactor(int dim, std::vector<double> lower)
      : dim_(dim), l_(std::move(lower)) {}

  int dim() const { return dim_; }

  double lower(int r, int c) const {
    return c <= r ? l_[static_cast<std::size_t>(r) * dim_ + c] : 0.0;
  }

  /// log det A = 2 sum_i log L_ii.
  double log_det() const {
    double s = 0.0;
    for (int i = 0; i < dim_; ++i)
      s += std::log(l_[static_cast<std::size_t>(i) * dim_ + i]);
    return 2.0 * s;
  }

  double min_pivot() const {
    double m = l_[0];
    for (int i = 1; i < dim_; ++i)
      m = std::min(m, l_[static_cast<std::size_t>(i) * dim_ + i]);
    return m;
  }

  double max_pivot() const {
    double m = l_[0];
    for (int i = 1; i < dim_; ++i)
      m = std::max(m, l_[static_cast<std::size_t>(i) * dim_ + i]);
    return m;
  }

  /// Solves L y = b (forward substitution).
  std::vector<double> solve_lower(std::span<const double> b) const {
    require_len(b.size());
    std::vector<double> y(dim_);
    for (int r = 0; r < dim_; ++r) {
      double s = b[r];
      const double *row = &l_[static_cast<std::size_t>(r) * dim_];
      for (int c = 0; c < r; ++c) s -= row[c] * y[c];
      y[r] = s / row[r];
    }
    return y;
  }

  /// Solves A x = b via the two triangular solves.
  std::vector<double> solve(std::span<const double> b) const {
    std::vector<double> y = solve_lower(b);
    for (int r = dim_ - 1; r >= 0; --r) {
      double s = y[r];
      for (int c = r + 1; c < dim_; ++c)
        s -= l_[static_cast<std::size_t>(c) * dim_ + r] * y[c];
      y[r] = s / l_[static_cast<std::size_t>(r) * dim_ + r];
    }
    return y;
  }

  /// b^T A^{-1} b, evaluated as || L^{-1} b ||^2.
  double quad_form_inv(std::span<const double> b) const {
    std::vector<double> y = solve_lower(b);
    double s = 0.0;
    for (double v : y) s += v * v;
    return s;
  }

  /// L x, used to color standard-normal draws.
  std::vector<double> lower_times(std::span<const double> x) const {
    require_len(x.size());
    std::vector<double> y(dim_);
    for (int r = 0; r < dim_; ++r) {
      double s = 0.0;
      const double *row = &l_[static_cast<std::size_t>(r) * dim_];
      for (int c = 0; c <= r; ++c) s += row[c] * x[c];
      y[r] = s;
    }
    return y;
  }

  /// A^{-1}, column by column, re-symmetrized.
  SymMatrix inverse() const {
    std::vector<double> raw(static_cast<std::size_t>(dim_) * dim_);
    std::vector<double> e(dim_, 0.0);
    for (int c = 0; c < dim_; ++c) {
      e[c] = 1.0;
      std::vector<double> col = solve(e);
      e[c] = 0.0;
      for (int r = 0; r < dim_; ++r)
        raw[static_cast<std::size_t>(r) * dim_ + c] = col[r];
    }
    return symmetrize(dim_, raw);
  }

  /// (a + a^T) / 2, exactly symmetric in storage.
  static SymMatrix symmetrize(int dim, std::span<const double> raw);

 private:
  void require_len(std::size_t n) const {
    if (n != static_cast<std::size_t>(dim_))
      throw DimensionMismatch("CholeskyFactor: vector length " +
                              std::to_string(n) + " vs dim " +
                              std::to_string(dim_));
  }

  int dim_;
  std::vector<double> l_;
};

/// Cholesky factorization of an SPD matrix.  Throws NotPositiveDefinite on
/// a pivot <= 0; the caller decides whether to jitter or abort.
inline CholeskyFactor cholesky(const SymMatrix &a) {
  const int d = a.dim();
  std::vector<double> l(static_cast<std::size_t>(d) * d, 0.0);
  for (int r = 0; r < d; ++r) {
    for (int c = 0; c <= r; ++c) {
      double s = a(r, c);
      for (int k = 0; k < c; ++k)
        s -= l[static_cast<std::size_t>(r) * d + k] *
             l[static_cast<std::size_t>(c) * d + k];
      if (c == r) {
        if (!(s > 0.0))
          throw NotPositiveDefinite("cholesky: pivot " + std::to_string(s) +
                                    " at row " + std::to_string(r));
        l[static_cast<std::size_t>(r) * d + c] = std::sqrt(s);
      } else {
        l[static_cast<std::size_t>(r) * d + c] =
            s / l[static_cast<std::size_t>(c) * d + c];
      }
    }
  }
  return CholeskyFactor(d, std::move(l));
}

/// (a + a^T) / 2 from a full row-major array; exactly symmetric in storage.
inline SymMatrix symmetrize(int dim, std::span<const double> raw) {
  if (raw.size() != static_cast<std::size_t>(dim) * dim)
    throw DimensionMismatch("symmetrize: expected " + std::to_string(dim) +
                            "x" + std::to_string(dim) + " entries, got " +
                            std::to_string(raw.size()));
  SymMatrix m(dim);
  for (int r = 0; r < dim; ++r)
    for (int c = r; c < dim; ++c)
      m.set(r, c, 0.5 * (raw[static_cast<std::size_t>(r) * dim + c] +
                         raw[static_cast<std::size_t>(c) * dim + r]));
  return m;
}

inline SymMatrix CholeskyFactor::symmetrize(int dim,
                                            std::span<const double> raw) {
  return plda::symmetrize(dim, raw);
}

/// Inverse of an SPD matrix via Cholesky; the result is re-symmetrized.
inline SymMatrix inverse_spd(const SymMatrix &a) {
  return cholesky(a).inverse();
}

/// log det of an SPD matrix via Cholesky.
inline double logdet_spd(const SymMatrix &a) { return cholesky(a).log_det(); }

// Small dense-vector helpers used throughout the library.

inline void require_same_size(std::span<const double> a,
                              std::span<const double> b,
                              const char *where) {
  if (a.size() != b.size())
    throw DimensionMismatch(std::string(where) + ": vector lengths " +
                            std::to_string(a.size()) + " vs " +
                            std::to_string(b.size()));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  require_same_size(a, b, "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline std::vector<double> subtract(std::span<const double> a,
                                    std::span<const double> b) {
  require_same_size(a, b, "subtract");
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
  return r;
}

inline std::vector<double> add(std::span<const double> a,
                               std::span<const double> b) {
  require_same_size(a, b, "add");
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
  return r;
}

inline std::vector<double> scaled(std::span<const double> a, double alpha) {
  std::vector<double> r(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = alpha * a[i];
  return r;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

/// y = A x for a symmetric matrix.
inline std::vector<double> matvec(const SymMatrix &a,
                                  std::span<const double> x) {
  if (static_cast<int>(x.size()) != a.dim())
    throw DimensionMismatch("matvec: vector length " +
                            std::to_string(x.size()) + " vs dim " +
                            std::to_string(a.dim()));
  std::vector<double> y(a.dim(), 0.0);
  for (int r = 0; r < a.dim(); ++r) {
    double s = 0.0;
    for (int c = 0; c < a.dim(); ++c) s += a(r, c) * x[c];
    y[r] = s;
  }
  return y;
}

}  // namespace plda
