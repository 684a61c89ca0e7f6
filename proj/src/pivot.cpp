#include "randskel/pivot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "randskel/errors.hpp"

namespace randskel {
namespace {

// In-place LU with row partial pivoting of a tall w (n×l, n >= l) on the
// columns [k0, k1). Row swaps are applied across the full width of w so the
// trailing block stays consistent; perm tracks the row order.
void lu_panel(Matrix& w, IndexList& perm, Index k0, Index k1, double tol, bool pivoting,
              const std::string& stage) {
  const Index n = w.rows();
  for (Index t = k0; t < k1; ++t) {
    Index p = t;
    if (pivoting) {
      double best = std::abs(w(t, t));
      for (Index i = t + 1; i < n; ++i) {
        const double v = std::abs(w(i, t));
        if (v > best || (v == best && perm[static_cast<std::size_t>(i)] < perm[static_cast<std::size_t>(p)])) {
          best = v;
          p = i;
        }
      }
    }
    if (!(std::abs(w(p, t)) > tol))
      throw RankDeficiencyError(stage, t + 1, "no pivot above the rank threshold; reduce the rank");
    if (p != t) {
      w.row(t).swap(w.row(p));
      std::swap(perm[static_cast<std::size_t>(t)], perm[static_cast<std::size_t>(p)]);
    }
    const double pivot = w(t, t);
    w.col(t).tail(n - t - 1) /= pivot;
    const Index width = k1 - t - 1;
    if (width > 0)
      w.block(t + 1, t + 1, n - t - 1, width).noalias() -=
          w.col(t).tail(n - t - 1) * w.row(t).segment(t + 1, width);
  }
}

// Factors w (n×l) as w(perm, :) = L U with L n×l unit lower trapezoidal and
// U l×l upper triangular, both stored in w.
IndexList lu_rows(Matrix& w, const LuppOptions& options, double tol, const std::string& stage) {
  const Index n = w.rows();
  const Index l = w.cols();
  IndexList perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  const Index nb = (options.panel_width <= 0 || options.panel_width >= l) ? l : options.panel_width;
  for (Index k0 = 0; k0 < l; k0 += nb) {
    const Index k1 = std::min(l, k0 + nb);
    lu_panel(w, perm, k0, k1, tol, options.pivoting, stage);
    const Index rest = l - k1;
    if (rest == 0)
      break;
    const Index b = k1 - k0;
    // U12 = L11^{-1} A12, then A22 -= L21 U12.
    auto u12 = w.block(k0, k1, b, rest);
    w.block(k0, k0, b, b).triangularView<Eigen::UnitLower>().solveInPlace(u12);
    w.block(k1, k1, n - k1, rest).noalias() -= w.block(k1, k0, n - k1, b) * w.block(k0, k1, b, rest);
  }
  return perm;
}

PivotFactorization lupp_tall(Matrix w, const LuppOptions& options, const std::string& stage) {
  const Index n = w.rows();
  const Index l = w.cols();
  if (l < 1 || l > n)
    throw DimensionError(stage + ": need 1 <= l <= n, got l=" + std::to_string(l) +
                         ", n=" + std::to_string(n));
  const double scale = w.cwiseAbs().maxCoeff();
  const double tol = 1e-14 * scale;
  IndexList perm = lu_rows(w, options, tol, stage);

  PivotFactorization pf;
  pf.kind = PivotKind::lupp;
  pf.perm = std::move(perm);
  pf.pivots.assign(pf.perm.begin(), pf.perm.begin() + l);
  pf.F = Matrix(w.topRows(l).triangularView<Eigen::Upper>()).transpose();
  Matrix lower = w.topRows(l).triangularView<Eigen::UnitLower>();
  pf.R1 = lower.transpose();
  pf.R2 = w.bottomRows(n - l).transpose();
  return pf;
}

} // namespace

std::string to_string(PivotKind kind) { return kind == PivotKind::lupp ? "lupp" : "cpqr"; }

PivotKind parse_pivot_kind(const std::string& text) {
  if (text == "lupp")
    return PivotKind::lupp;
  if (text == "cpqr")
    return PivotKind::cpqr;
  throw ParameterError("unknown pivot kind '" + text + "'");
}

Matrix PivotFactorization::reconstruct() const {
  Matrix r(R1.rows(), R1.cols() + R2.cols());
  r << R1, R2;
  return F * r;
}

PivotFactorization lupp_columns(const Matrix& x, const LuppOptions& options) {
  return lupp_tall(x.transpose(), options, "column LUPP");
}

PivotFactorization lupp_rows(const Matrix& c, const LuppOptions& options) {
  return lupp_tall(c, options, "row LUPP");
}

PivotFactorization cpqr_columns(const Matrix& x, bool pivoting) {
  const Index l = x.rows();
  const Index n = x.cols();
  if (l < 1 || l > n)
    throw DimensionError("CPQR: need 1 <= l <= n, got l=" + std::to_string(l) + ", n=" + std::to_string(n));

  Matrix w = x;
  IndexList perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), Index{0});
  Vector norm_current(n), norm_reference(n);
  for (Index j = 0; j < n; ++j)
    norm_current(j) = norm_reference(j) = w.col(j).norm();
  const double tol = 1e-14 * x.norm();
  const double recompute_tol = std::sqrt(std::numeric_limits<double>::epsilon());

  Matrix q = Matrix::Identity(l, l);
  for (Index t = 0; t < l; ++t) {
    Index p = t;
    if (pivoting) {
      for (Index j = t + 1; j < n; ++j)
        if (norm_current(j) > norm_current(p) ||
            (norm_current(j) == norm_current(p) && perm[static_cast<std::size_t>(j)] < perm[static_cast<std::size_t>(p)]))
          p = j;
    }
    if (!(norm_current(p) > tol))
      throw RankDeficiencyError("CPQR", t + 1, "remaining column norms are below the rank threshold");
    if (p != t) {
      w.col(t).swap(w.col(p));
      std::swap(perm[static_cast<std::size_t>(t)], perm[static_cast<std::size_t>(p)]);
      std::swap(norm_current(t), norm_current(p));
      std::swap(norm_reference(t), norm_reference(p));
    }

    // Householder reflector H = I - beta v v^T mapping w(t:l, t) to alpha e_1.
    const Index len = l - t;
    auto col = w.col(t).segment(t, len);
    const double xnorm = col.norm();
    if (len > 1 && xnorm > 0.0) {
      const double alpha = col(0) > 0.0 ? -xnorm : xnorm;
      Vector v = col;
      v(0) -= alpha;
      const double vnorm2 = v.squaredNorm();
      const double beta = 2.0 / vnorm2;
      if (t + 1 < n) {
        auto trailing = w.block(t, t + 1, len, n - t - 1);
        Eigen::RowVectorXd vt = v.transpose() * trailing;
        trailing.noalias() -= (beta * v) * vt;
      }
      Vector qv = q.rightCols(len) * v;
      q.rightCols(len).noalias() -= (beta * qv) * v.transpose();
      col.setZero();
      col(0) = alpha;
    }

    // Norm downdating with recomputation when cancellation becomes severe.
    for (Index j = t + 1; j < n; ++j) {
      if (norm_current(j) == 0.0)
        continue;
      double ratio = std::abs(w(t, j)) / norm_current(j);
      double temp = std::max(0.0, 1.0 - ratio * ratio);
      const double rel = norm_current(j) / norm_reference(j);
      if (temp * rel * rel <= recompute_tol) {
        norm_current(j) = t + 1 < l ? w.col(j).segment(t + 1, l - t - 1).norm() : 0.0;
        norm_reference(j) = norm_current(j);
      } else {
        norm_current(j) *= std::sqrt(temp);
      }
    }
  }

  PivotFactorization pf;
  pf.kind = PivotKind::cpqr;
  pf.perm = std::move(perm);
  pf.pivots.assign(pf.perm.begin(), pf.perm.begin() + l);
  pf.F = std::move(q);
  pf.R1 = w.leftCols(l).triangularView<Eigen::Upper>();
  pf.R2 = w.rightCols(n - l);
  return pf;
}

PivotFactorization cpqr_rows(const Matrix& c) { return cpqr_columns(c.transpose()); }

PivotFactorization pivot_columns(const Matrix& x, PivotKind kind) {
  return kind == PivotKind::lupp ? lupp_columns(x) : cpqr_columns(x);
}

PivotFactorization pivot_rows(const Matrix& c, PivotKind kind) {
  return kind == PivotKind::lupp ? lupp_rows(c) : cpqr_rows(c);
}

double growth_certificate(const PivotFactorization& pf) {
  if (pf.R2.cols() == 0)
    return 0.0;
  const Index l = pf.R1.rows();
  for (Index i = 0; i < l; ++i)
    if (pf.R1(i, i) == 0.0 || !std::isfinite(pf.R1(i, i)))
      throw SingularMatrixError("growth certificate: R1 is singular at diagonal " + std::to_string(i + 1));
  Matrix g = pf.R1.triangularView<Eigen::Upper>().solve(pf.R2);
  return g.cwiseAbs().maxCoeff();
}

Matrix kahan_witness(Index l, Index n) {
  if (l < 1 || n < l)
    throw ParameterError("kahan_witness needs 1 <= l <= n");
  Matrix x = Matrix::Ones(l, n);
  for (Index i = 0; i < l; ++i)
    for (Index j = 0; j < l; ++j)
      x(i, j) = j < i ? 0.0 : (j == i ? 1.0 : -1.0);
  return x;
}

} // namespace randskel
