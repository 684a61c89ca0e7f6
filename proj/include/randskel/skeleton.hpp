#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "randskel/embed.hpp"
#include "randskel/matsource.hpp"
#include "randskel/pivot.hpp"
#include "randskel/rangefinder.hpp"

namespace randskel {

/// Embedding choice without dimensions; the selectors fill in l and the
/// ambient dimension of whichever side they sketch.
struct SketchOptions {
  EmbeddingKind kind = EmbeddingKind::gaussian;
  std::uint64_t seed = 0;
  Index zeta = 0;
};

EmbeddingSpec make_embedding(const SketchOptions& options, Index l, Index ambient);

/// A posteriori factor bounding ||A - C C^+ A|| <= eta ||A - A X^+ X|| for
/// column skeletons picked by pivoting on X. X1 = X(:, pivots) and X2 holds
/// the remaining columns in `perm` order.
struct EtaCertificate {
  double eta_bound = 1.0;  ///< sqrt(1 + ||X1^{-1} X2||_2^2)
  Matrix X1;
  Matrix X2;
  IndexList perm;
  std::optional<double> residual_norm;  ///< ||A - A X^+ X||_F when requested
};

/// Computes the certificate with a dense solve X1^{-1} X2, O(l^2 (n-l)).
/// The spectral norm is exact (dense SVD) for n - l <= 5000 and a power
/// estimate (relative tolerance 1e-4, 200 iterations) beyond.
EtaCertificate eta_certificate(const Matrix& x, std::span<const Index> pivots);

struct SkeletonSet {
  IndexList Js;  ///< column skeletons, zero-based, distinct
  IndexList Is;  ///< row skeletons; empty when only columns were selected
  std::string algorithm;
  std::uint64_t seed = 0;
  std::optional<EtaCertificate> eta_col;
  std::optional<EtaCertificate> eta_row;

  Index rank() const noexcept { return static_cast<Index>(Js.size()); }
  /// Throws ParameterError when indices are out of range, repeated, or the
  /// two sides differ in size.
  void validate(Index m, Index n) const;
};

/// Text form: a small JSON document with the algorithm tag, seed, index
/// lists and certificate values (the certificate matrices are not stored).
std::string to_json(const SkeletonSet& set);
SkeletonSet skeleton_from_json(const std::string& text);

enum class RowSpaceKind {
  sketch,        ///< X = Gamma A
  power_sketch,  ///< X = Omega (A^T A)^q, plain
  rsvd,          ///< X = V^T from a randomized SVD with orthogonalized power passes
};

struct FrameworkOptions {
  RowSpaceKind row_space = RowSpaceKind::sketch;
  PivotKind pivot = PivotKind::lupp;
  SketchOptions sketch;
  int power_iterations = 1;  ///< used by power_sketch and rsvd
  bool certificates = true;
  bool residual = false;  ///< also store ||A - A X^+ X||_F (needs a dense copy of A)
  std::string algorithm;  ///< tag recorded in the result; derived when empty
};

/// Builds X, pivots its columns for Js, then pivots the rows of A(:, Js)
/// for Is. Throws RankDeficiencyError naming the stage that failed.
SkeletonSet select_framework(const MatrixSource& a, Index l, const FrameworkOptions& options);

/// q = 0: X = Gamma A; q >= 1: X = Omega (A^T A)^q. LUPP on both sides.
SkeletonSet rand_lupp(const MatrixSource& a, Index l, const SketchOptions& sketch, int q = 0);
SkeletonSet rand_cpqr(const MatrixSource& a, Index l, const SketchOptions& sketch, int q = 0);

/// LUPP on approximate right singular vectors (one orthogonalized pass).
SkeletonSet rsvd_deim(const MatrixSource& a, Index l, const SketchOptions& sketch);

/// Samples k distinct columns (rows) with probability proportional to the
/// rank-k leverage scores of a rank-l randomized SVD; sequential weighted
/// draws without replacement.
SkeletonSet rsvd_leverage_sampling(const MatrixSource& a, Index k, Index l, const SketchOptions& sketch,
                                   std::uint64_t sample_seed);

/// Weighted sampling of `count` distinct indices; throws when fewer than
/// `count` weights are positive.
IndexList sample_without_replacement(const Vector& weights, Index count, std::uint64_t seed);

struct StreamingSelection {
  SkeletonSet set;
  Matrix X;  ///< Gamma A, l×n
  Matrix Y;  ///< A Omega^T, m×l
};

/// Single pass over column panels accumulating X = Gamma A and
/// Y = A Omega^T, then column pivots on X and row pivots on Y. Never reads
/// A(:, Js). Results do not depend on block_width.
StreamingSelection streaming_select(const MatrixSource& a, Index l, const SketchOptions& gamma,
                                    const SketchOptions& omega, PivotKind pivot = PivotKind::lupp,
                                    Index block_width = 64);

} // namespace randskel
