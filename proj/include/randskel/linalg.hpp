#pragma once

#include <functional>
#include <cstdint>
#include <span>
#include <string_view>

#include "randskel/types.hpp"

namespace randskel {

/// Orthonormal basis of range(M) via unpivoted Householder QR, signs fixed
/// so the triangular factor has a nonnegative diagonal. Throws
/// RankDeficiencyError when |R(i,i)| <= rank_tol * max|R(j,j)|.
Matrix ortho(const Matrix& M, double rank_tol = 1e-14);

/// Thin QR with the same sign convention; `q` is d×l, `r` is l×l.
struct ThinQR {
  Matrix q;
  Matrix r;
};
ThinQR thin_qr(const Matrix& M, std::string_view stage, double rank_tol = 1e-14);

Matrix gather_columns(const Matrix& M, std::span<const Index> cols);
Matrix gather_rows(const Matrix& M, std::span<const Index> rows);

/// Singular values of a dense matrix, nonincreasing.
Vector singular_values(const Matrix& M);

double spectral_norm(const Matrix& M);

struct NormEstimate {
  double value;
  int iterations;
  bool converged;
};

/// Power iteration on M^T M given y = M x and x = M^T y; stops when two
/// consecutive estimates agree to `rel_tol`.
NormEstimate spectral_norm_estimate(Index rows, Index cols,
                                    const std::function<Vector(const Vector&)>& apply,
                                    const std::function<Vector(const Vector&)>& apply_transpose,
                                    double rel_tol, int max_iterations, std::uint64_t seed = 0);

/// sqrt(sum_{i>=k} sigma_i^2) for Frobenius, sigma_k (0-based) for spectral;
/// zero when k is past the end.
double tail_norm(const Vector& sigma, Index k, Norm norm);

bool all_finite(const Matrix& M);

} // namespace randskel
