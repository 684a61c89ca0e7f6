#pragma once

#include <atomic>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>

#include "randskel/types.hpp"

namespace randskel {

enum class StorageKind { dense, sparse, oracle };

/// Block operator: returns A * B (apply) or A^T * B (apply_transpose).
using BlockApply = std::function<Matrix(const Matrix&)>;

/// A real m×n matrix behind one of three storages: dense, compressed sparse
/// columns, or an apply/apply-transpose oracle. The matrix itself is
/// immutable; copies share the data and the usage counters.
///
/// Two counters are kept:
///  - passes(): complete streamed traversals (see ColumnStream);
///  - applications(): products with A or A^T, each call counting once
///    regardless of the block width.
class MatrixSource {
public:
  static MatrixSource dense(Matrix a);
  static MatrixSource sparse(SparseMatrix a);
  /// `nnz` is informational; pass -1 when unknown (reported as m*n).
  static MatrixSource oracle(Index rows, Index cols, BlockApply apply, BlockApply apply_transpose,
                             Index nnz = -1);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return nnz_; }
  StorageKind storage() const noexcept { return kind_; }

  /// Null unless the storage matches.
  const Matrix* dense_data() const noexcept;
  const SparseMatrix* sparse_data() const noexcept;

  Matrix apply(const Matrix& x) const;
  Matrix apply_transpose(const Matrix& y) const;
  Vector apply(const Vector& x) const;
  Vector apply_transpose(const Vector& y) const;

  /// Skeleton retrieval; does not count as an application.
  Matrix columns(std::span<const Index> cols) const;
  Matrix rows(std::span<const Index> rows) const;
  Matrix column_block(Index first, Index count) const;
  Matrix to_dense() const;
  /// Explicit A^T in the same storage family (oracles swap their maps).
  MatrixSource transposed() const;

  long passes() const noexcept;
  long applications() const noexcept;
  void record_pass() const noexcept;
  void record_application() const noexcept;

private:
  struct Counters {
    std::atomic<long> passes{0};
    std::atomic<long> applications{0};
  };
  struct Oracle {
    BlockApply apply;
    BlockApply apply_transpose;
  };
  using Storage = std::variant<Matrix, SparseMatrix, Oracle>;

  MatrixSource(Index rows, Index cols, Index nnz, StorageKind kind,
               std::shared_ptr<const Storage> storage);
  Matrix raw_apply(const Matrix& x) const;
  Matrix raw_apply_transpose(const Matrix& y) const;

  Index rows_ = 0;
  Index cols_ = 0;
  Index nnz_ = 0;
  StorageKind kind_ = StorageKind::dense;
  std::shared_ptr<const Storage> storage_;
  std::shared_ptr<Counters> counters_;
};

/// One column panel A(:, first : first+count). Sparse sources deliver a
/// sparse panel, the others a dense one.
struct StreamBlock {
  Index first = 0;
  Index count = 0;
  std::variant<Matrix, SparseMatrix> panel;

  bool is_sparse() const noexcept { return panel.index() == 1; }
  Matrix to_dense() const;
};

/// Single-consumer column-panel stream. Delivering the final block records
/// exactly one pass on the source.
class ColumnStream {
public:
  ColumnStream(MatrixSource source, Index block_width);

  std::optional<StreamBlock> next();
  Index block_count() const noexcept;
  Index block_width() const noexcept { return width_; }

private:
  MatrixSource source_;
  Index width_;
  Index cursor_ = 0;
  bool finished_ = false;
};

ColumnStream stream_columns(const MatrixSource& a, Index block_width);

/// Sparse-only alternative: batches of at most `batch` triplets in
/// column-major order. Exhausting the stream records one pass.
class TripletStream {
public:
  TripletStream(MatrixSource source, Index batch);
  std::optional<std::vector<Triplet>> next();

private:
  MatrixSource source_;
  Index batch_;
  Index column_ = 0;
  Index offset_ = 0;
  bool finished_ = false;
};

} // namespace randskel
