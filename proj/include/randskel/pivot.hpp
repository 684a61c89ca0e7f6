#pragma once

#include <string>

#include "randskel/types.hpp"

namespace randskel {

enum class PivotKind { lupp, cpqr };

std::string to_string(PivotKind kind);
PivotKind parse_pivot_kind(const std::string& text);

/// Column-pivoted factorization of an l×n matrix X:
///
///     X(:, perm) = F * [R1 R2]
///
/// LUPP: F is lower triangular, R1 unit upper triangular, |R(i,j)| <= 1.
/// CPQR: F is orthogonal, R1 upper triangular with nonincreasing |diag|.
/// `pivots` are the first l entries of `perm`.
struct PivotFactorization {
  PivotKind kind = PivotKind::lupp;
  IndexList pivots;
  IndexList perm;
  Matrix F;
  Matrix R1;
  Matrix R2;

  Index rank() const noexcept { return static_cast<Index>(pivots.size()); }
  /// F * [R1 R2], i.e. X with its columns permuted.
  Matrix reconstruct() const;
};

struct LuppOptions {
  Index panel_width = 64;  ///< 0 or >= l selects the unblocked kernel
  bool pivoting = true;    ///< false factors the columns in their given order
};

/// Column-wise LU with partial pivoting: step t picks the largest entry of
/// row t of the Schur complement (smallest index on ties). Equivalent to
/// row-partial-pivoted LU of X^T. Throws RankDeficiencyError when the
/// scanned row is all below 1e-14 * max|X|.
PivotFactorization lupp_columns(const Matrix& x, const LuppOptions& options = {});

/// Row-wise LUPP of an m×l matrix C: selects l rows. Returned as the
/// column factorization of C^T, so `pivots` index rows of C.
PivotFactorization lupp_rows(const Matrix& c, const LuppOptions& options = {});

/// Householder QR with column pivoting on downdated column norms.
/// Throws RankDeficiencyError when every remaining column norm falls below
/// 1e-14 * ||X||_F.
PivotFactorization cpqr_columns(const Matrix& x, bool pivoting = true);

/// Row selection through CPQR of C^T.
PivotFactorization cpqr_rows(const Matrix& c);

PivotFactorization pivot_columns(const Matrix& x, PivotKind kind);
PivotFactorization pivot_rows(const Matrix& c, PivotKind kind);

/// max_ij |(R1^{-1} R2)_ij| by triangular solves; 0 when R2 is empty.
double growth_certificate(const PivotFactorization& pf);

/// l×n matrix [R1 R2] with R1 unit upper triangular, -1 above the diagonal,
/// and R2 all ones: LUPP keeps its natural order and the growth factor
/// reaches 2^(l-1).
Matrix kahan_witness(Index l, Index n);

} // namespace randskel
