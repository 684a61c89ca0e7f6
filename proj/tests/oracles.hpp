// Test-only reference implementations. Deliberately naive: dense SVD based
// pseudoinverses, explicit Gram-Schmidt rescans, textbook Schur updates.
#pragma once

#include <cmath>
#include <functional>
#include <random>

#include <Eigen/Dense>

#include "randskel/types.hpp"

namespace oracle {

using randskel::Index;
using randskel::IndexList;
using randskel::Matrix;
using randskel::Vector;

inline Matrix gaussian(Index m, Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> d(0.0, 1.0);
  Matrix a(m, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < m; ++i) a(i, j) = d(rng);
  return a;
}

inline Matrix orthonormal(Index m, Index k, std::uint64_t seed) {
  Eigen::HouseholderQR<Matrix> qr(gaussian(m, k, seed));
  return qr.householderQ() * Matrix::Identity(m, k);
}

inline Matrix low_rank(Index m, Index n, Index k, std::uint64_t seed) {
  return gaussian(m, k, seed) * gaussian(k, n, seed + 7777);
}

/// U diag(sigma) V^T with Haar-like U, V.
inline Matrix with_spectrum(Index m, Index n, const Vector& sigma, std::uint64_t seed) {
  const Index p = sigma.size();
  return orthonormal(m, p, seed) * sigma.asDiagonal() * orthonormal(n, p, seed + 1).transpose();
}

inline Matrix pinv(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector s = svd.singularValues();
  const double tol = 1e-13 * (s.size() ? s(0) : 0.0) * static_cast<double>(std::max(a.rows(), a.cols()));
  Vector inv = s;
  for (Index i = 0; i < s.size(); ++i) inv(i) = s(i) > tol ? 1.0 / s(i) : 0.0;
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

inline Vector singular_values(const Matrix& a) { return Eigen::JacobiSVD<Matrix>(a).singularValues(); }

inline double spectral(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  return singular_values(a)(0);
}

inline double tail(const Vector& s, Index k, bool frobenius) {
  if (!frobenius) return k < s.size() ? s(k) : 0.0;
  return k < s.size() ? s.tail(s.size() - k).norm() : 0.0;
}

/// C C^+ A and friends, all through the SVD pseudoinverse.
inline Matrix column_id(const Matrix& a, const IndexList& js) {
  Matrix c(a.rows(), static_cast<Index>(js.size()));
  for (std::size_t j = 0; j < js.size(); ++j) c.col(static_cast<Index>(j)) = a.col(js[j]);
  return c * pinv(c) * a;
}

inline Matrix row_id(const Matrix& a, const IndexList& is) {
  Matrix r(static_cast<Index>(is.size()), a.cols());
  for (std::size_t i = 0; i < is.size(); ++i) r.row(static_cast<Index>(i)) = a.row(is[i]);
  return a * pinv(r) * r;
}

inline Matrix cur(const Matrix& a, const IndexList& is, const IndexList& js) {
  Matrix c(a.rows(), static_cast<Index>(js.size()));
  for (std::size_t j = 0; j < js.size(); ++j) c.col(static_cast<Index>(j)) = a.col(js[j]);
  Matrix r(static_cast<Index>(is.size()), a.cols());
  for (std::size_t i = 0; i < is.size(); ++i) r.row(static_cast<Index>(i)) = a.row(is[i]);
  return c * (pinv(c) * a * pinv(r)) * r;
}

inline Matrix rangefinder_residual(const Matrix& a, const Matrix& x) { return a - a * pinv(x) * x; }

struct Pivoted {
  IndexList pivots;
  Matrix L;  // l×l lower (LU) or Q (QR)
  Matrix R;  // l×n in pivot order
};

/// Column-wise LUPP by explicit Schur complements on a dense copy; ties go
/// to the smallest original column index.
inline Pivoted schur_lupp(const Matrix& x) {
  const Index l = x.rows(), n = x.cols();
  Matrix w = x;
  IndexList perm(static_cast<std::size_t>(n));
  for (Index j = 0; j < n; ++j) perm[static_cast<std::size_t>(j)] = j;
  Matrix L = Matrix::Zero(l, l);
  for (Index t = 0; t < l; ++t) {
    Index p = t;
    for (Index j = t + 1; j < n; ++j) {
      const double a = std::abs(w(t, j)), b = std::abs(w(t, p));
      if (a > b || (a == b && perm[static_cast<std::size_t>(j)] < perm[static_cast<std::size_t>(p)])) p = j;
    }
    w.col(t).swap(w.col(p));
    std::swap(perm[static_cast<std::size_t>(t)], perm[static_cast<std::size_t>(p)]);
    const double piv = w(t, t);
    // Column t of the Schur complement becomes column t of L; row t of R is w(t,:)/piv.
    L.block(t, t, l - t, 1) = w.block(t, t, l - t, 1);
    Matrix rrow = w.block(t, t, 1, n - t) / piv;
    w.block(t, t, l - t, n - t) -= w.block(t, t, l - t, 1) * rrow;
    w.block(t, t, 1, n - t) = rrow;
  }
  Pivoted out;
  out.pivots.assign(perm.begin(), perm.begin() + l);
  out.L = L;
  out.R = w.topRows(l).triangularView<Eigen::Upper>();
  for (Index t = 0; t < l; ++t) out.R.block(t, l, 1, n - l) = w.block(t, l, 1, n - l);
  return out;
}

/// CPQR pivot sequence by orthogonalizing every remaining column against
/// the chosen ones (two Gram-Schmidt sweeps) and rescanning norms.
inline IndexList gram_schmidt_cpqr(const Matrix& x, Index steps) {
  const Index n = x.cols();
  std::vector<char> used(static_cast<std::size_t>(n), 0);
  Matrix q(x.rows(), 0);
  IndexList piv;
  for (Index t = 0; t < steps; ++t) {
    Index best = -1;
    double best_norm = -1.0;
    Vector best_v;
    for (Index j = 0; j < n; ++j) {
      if (used[static_cast<std::size_t>(j)]) continue;
      Vector v = x.col(j);
      for (int sweep = 0; sweep < 2; ++sweep) v -= q * (q.transpose() * v);
      const double nv = v.norm();
      if (nv > best_norm) {
        best_norm = nv;
        best = j;
        best_v = v;
      }
    }
    piv.push_back(best);
    used[static_cast<std::size_t>(best)] = 1;
    q.conservativeResize(Eigen::NoChange, q.cols() + 1);
    q.col(q.cols() - 1) = best_v / best_norm;
  }
  return piv;
}

/// Exhaustive best pair of columns for the column ID in Frobenius norm.
inline IndexList best_column_subset(const Matrix& a, Index k) {
  const Index n = a.cols();
  IndexList best, cur(static_cast<std::size_t>(k));
  double best_err = INFINITY;
  std::function<void(Index, Index)> rec = [&](Index start, Index depth) {
    if (depth == k) {
      const double e = (a - column_id(a, cur)).norm();
      if (e < best_err) {
        best_err = e;
        best = cur;
      }
      return;
    }
    for (Index j = start; j < n; ++j) {
      cur[static_cast<std::size_t>(depth)] = j;
      rec(j + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best;
}

} // namespace oracle
