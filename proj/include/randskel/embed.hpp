#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "randskel/matsource.hpp"

namespace randskel {

enum class EmbeddingKind { gaussian, srtt, sparse_sign };

std::string to_string(EmbeddingKind kind);
EmbeddingKind parse_embedding_kind(const std::string& text);

/// One oblivious l2 embedding Gamma: R^m -> R^l.
struct EmbeddingSpec {
  EmbeddingKind kind = EmbeddingKind::gaussian;
  Index l = 0;
  Index m = 0;
  Index zeta = 0;  ///< sparse_sign nonzeros per column; 0 selects min(l, 8)
  std::uint64_t seed = 0;

  Index effective_zeta() const noexcept;
  void validate() const;
};

/// Embedding dimension used when only a target rank is given:
/// k + 10 for Gaussian, ceil(1.5 k) + 10 for SRTT and sparse sign.
Index default_embedding_dim(EmbeddingKind kind, Index k);

/// Materialized random state of an embedding. Every entry is a pure
/// function of (spec, column index), so any column block can be generated
/// independently of the others.
///
///  - gaussian:    i.i.d. N(0, 1/l) entries.
///  - srtt:        sqrt(m/l) * Subsample * Hartley * Signs * Permutation,
///                 with the unitary discrete Hartley transform applied by FFT.
///  - sparse_sign: each column holds exactly zeta entries +-1/sqrt(zeta) at
///                 distinct uniformly random rows.
class Embedding {
public:
  explicit Embedding(EmbeddingSpec spec);
  ~Embedding();
  Embedding(Embedding&&) noexcept;
  Embedding& operator=(Embedding&&) noexcept;

  const EmbeddingSpec& spec() const noexcept { return spec_; }
  Index rows() const noexcept { return spec_.l; }
  Index cols() const noexcept { return spec_.m; }

  /// Gamma * B for B with m rows.
  Matrix apply(const Matrix& b) const;
  Matrix apply(const SparseMatrix& b) const;
  /// Gamma * b for a single vector.
  Vector apply(const Vector& b) const;

  /// Explicit Gamma(:, first : first+count).
  Matrix columns(Index first, Index count) const;
  Matrix dense() const;
  /// Gamma as a sparse matrix (sparse_sign only).
  const SparseMatrix& sparse() const;

  /// SRTT only: the orthogonal mixing stage T * Phi * Pi x before row
  /// subsampling and scaling.
  Vector srtt_mix(const Vector& x) const;

private:
  struct Srtt;
  void hartley_columns(const Matrix& mixed_in, Matrix& out) const;
  Matrix srtt_apply(const Matrix& b) const;

  EmbeddingSpec spec_;
  std::unique_ptr<Srtt> srtt_;
  SparseMatrix sparse_;
};

enum class SketchSide {
  row,  ///< X = Gamma A, Gamma is l×m
  col,  ///< Y = A Omega^T, Omega is l×n
};

/// Forms the sketch and records one application on `a`.
Matrix sketch(const EmbeddingSpec& spec, const MatrixSource& a, SketchSide side);

Matrix gaussian_sketch(const EmbeddingSpec& spec, const MatrixSource& a, SketchSide side);
Matrix srtt_sketch(const EmbeddingSpec& spec, const MatrixSource& a, SketchSide side = SketchSide::row);
Matrix sparse_sign_sketch(const EmbeddingSpec& spec, const MatrixSource& a,
                          SketchSide side = SketchSide::row);

} // namespace randskel
