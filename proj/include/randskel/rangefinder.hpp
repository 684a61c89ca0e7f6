#pragma once

#include <cstdint>
#include <string>

#include "randskel/embed.hpp"
#include "randskel/matsource.hpp"

namespace randskel {

enum class RowSpaceProvenance { sketch, plain_power, orthogonalized_power, rsvd };

std::string to_string(RowSpaceProvenance p);

/// l×n matrix whose row space approximates the leading right singular
/// subspace of A.
struct RowSpaceApproximator {
  Matrix X;
  RowSpaceProvenance provenance = RowSpaceProvenance::sketch;
  int power_iterations = 0;
  std::uint64_t seed = 0;
};

/// Estimates of the leading singular triplets: A X^+ X = U diag(sigma) V^T.
struct SpectralData {
  Matrix U;      ///< m×l, orthonormal columns
  Vector sigma;  ///< nonincreasing
  Matrix V;      ///< n×l, orthonormal columns
};

/// Throws RankDeficiencyError unless sigma_min(X) > rel_tol * sigma_max(X).
void require_full_row_rank(const Matrix& x, const std::string& stage, double rel_tol = 1e-12);

/// X = Gamma A with spec.m == rows(A).
RowSpaceApproximator row_sketch_rangefinder(const MatrixSource& a, const EmbeddingSpec& spec);

/// X = Omega (A^T A)^q with spec.m == cols(A), evaluated as alternating
/// products; 2q applications of A in total. Only non-finite output is
/// rejected: the recurrence squares the condition number each round, so
/// trailing directions may be lost without any error.
RowSpaceApproximator plain_power_iteration(const MatrixSource& a, const EmbeddingSpec& spec, int q);

/// Y = A Omega^T; Y <- ortho(A ortho(A^T Y)) for the remaining q-1 rounds;
/// X = ortho(Y)^T A. Also 2q applications.
RowSpaceApproximator orthogonalized_power_iteration(const MatrixSource& a, const EmbeddingSpec& spec,
                                                    int q);

/// SVD of A Q_X where Q_X spans the rows of X; V = Q_X V~.
SpectralData randomized_svd(const MatrixSource& a, const RowSpaceApproximator& x);
SpectralData randomized_svd(const MatrixSource& a, const EmbeddingSpec& spec);

/// score(j) = ||V(j, 0:k)||^2; the scores sum to k.
Vector leverage_scores(const SpectralData& sd, Index k);
/// Same from the left factor: one score per row of A.
Vector row_leverage_scores(const SpectralData& sd, Index k);

/// ||A - A X^+ X|| for dense A (explicit projection onto the row space of X).
double rangefinder_error(const Matrix& a, const Matrix& x, Norm norm = Norm::frobenius);

} // namespace randskel
