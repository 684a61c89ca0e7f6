#include "randskel/matsource.hpp"

#include <string>

#include "randskel/errors.hpp"

namespace randskel {
namespace {

void check_dims(Index rows, Index cols) {
  if (rows < 1 || cols < 1)
    throw DimensionError("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                         std::to_string(cols));
}

} // namespace

MatrixSource::MatrixSource(Index rows, Index cols, Index nnz, StorageKind kind,
                           std::shared_ptr<const Storage> storage)
    : rows_(rows), cols_(cols), nnz_(nnz), kind_(kind), storage_(std::move(storage)),
      counters_(std::make_shared<Counters>()) {}

MatrixSource MatrixSource::dense(Matrix a) {
  check_dims(a.rows(), a.cols());
  const Index m = a.rows();
  const Index n = a.cols();
  return MatrixSource(m, n, m * n, StorageKind::dense, std::make_shared<const Storage>(std::move(a)));
}

MatrixSource MatrixSource::sparse(SparseMatrix a) {
  check_dims(a.rows(), a.cols());
  a.makeCompressed();
  const Index m = a.rows();
  const Index n = a.cols();
  const Index nnz = a.nonZeros();
  return MatrixSource(m, n, nnz, StorageKind::sparse, std::make_shared<const Storage>(std::move(a)));
}

MatrixSource MatrixSource::oracle(Index rows, Index cols, BlockApply apply,
                                  BlockApply apply_transpose, Index nnz) {
  check_dims(rows, cols);
  if (!apply || !apply_transpose)
    throw ParameterError("oracle source needs both apply and apply_transpose");
  if (nnz < 0)
    nnz = rows * cols;
  return MatrixSource(rows, cols, nnz, StorageKind::oracle,
                      std::make_shared<const Storage>(Oracle{std::move(apply), std::move(apply_transpose)}));
}

const Matrix* MatrixSource::dense_data() const noexcept { return std::get_if<Matrix>(storage_.get()); }

const SparseMatrix* MatrixSource::sparse_data() const noexcept {
  return std::get_if<SparseMatrix>(storage_.get());
}

Matrix MatrixSource::raw_apply(const Matrix& x) const {
  if (x.rows() != cols_)
    throw DimensionError("apply: expected " + std::to_string(cols_) + " rows, got " +
                         std::to_string(x.rows()));
  switch (kind_) {
  case StorageKind::dense:
    return std::get<Matrix>(*storage_) * x;
  case StorageKind::sparse:
    return std::get<SparseMatrix>(*storage_) * x;
  case StorageKind::oracle:
    break;
  }
  Matrix y = std::get<Oracle>(*storage_).apply(x);
  if (y.rows() != rows_ || y.cols() != x.cols())
    throw DimensionError("oracle apply returned a block of the wrong shape");
  return y;
}

Matrix MatrixSource::raw_apply_transpose(const Matrix& y) const {
  if (y.rows() != rows_)
    throw DimensionError("apply_transpose: expected " + std::to_string(rows_) + " rows, got " +
                         std::to_string(y.rows()));
  switch (kind_) {
  case StorageKind::dense:
    return std::get<Matrix>(*storage_).transpose() * y;
  case StorageKind::sparse:
    return std::get<SparseMatrix>(*storage_).transpose() * y;
  case StorageKind::oracle:
    break;
  }
  Matrix x = std::get<Oracle>(*storage_).apply_transpose(y);
  if (x.rows() != cols_ || x.cols() != y.cols())
    throw DimensionError("oracle apply_transpose returned a block of the wrong shape");
  return x;
}

Matrix MatrixSource::apply(const Matrix& x) const {
  record_application();
  return raw_apply(x);
}

Matrix MatrixSource::apply_transpose(const Matrix& y) const {
  record_application();
  return raw_apply_transpose(y);
}

Vector MatrixSource::apply(const Vector& x) const {
  Matrix xm = x;
  return apply(xm).col(0);
}

Vector MatrixSource::apply_transpose(const Vector& y) const {
  Matrix ym = y;
  return apply_transpose(ym).col(0);
}

Matrix MatrixSource::columns(std::span<const Index> cols) const {
  const Index k = static_cast<Index>(cols.size());
  for (Index j : cols)
    if (j < 0 || j >= cols_)
      throw DimensionError("column index " + std::to_string(j) + " out of range");
  switch (kind_) {
  case StorageKind::dense: {
    const auto& a = std::get<Matrix>(*storage_);
    Matrix out(rows_, k);
    for (Index t = 0; t < k; ++t)
      out.col(t) = a.col(cols[t]);
    return out;
  }
  case StorageKind::sparse: {
    const auto& a = std::get<SparseMatrix>(*storage_);
    Matrix out = Matrix::Zero(rows_, k);
    for (Index t = 0; t < k; ++t)
      for (SparseMatrix::InnerIterator it(a, cols[t]); it; ++it)
        out(it.row(), t) = it.value();
    return out;
  }
  case StorageKind::oracle:
    break;
  }
  Matrix e = Matrix::Zero(cols_, k);
  for (Index t = 0; t < k; ++t)
    e(cols[t], t) = 1.0;
  return raw_apply(e);
}

Matrix MatrixSource::rows(std::span<const Index> rows) const {
  const Index k = static_cast<Index>(rows.size());
  for (Index i : rows)
    if (i < 0 || i >= rows_)
      throw DimensionError("row index " + std::to_string(i) + " out of range");
  switch (kind_) {
  case StorageKind::dense: {
    const auto& a = std::get<Matrix>(*storage_);
    Matrix out(k, cols_);
    for (Index t = 0; t < k; ++t)
      out.row(t) = a.row(rows[t]);
    return out;
  }
  case StorageKind::sparse: {
    const auto& a = std::get<SparseMatrix>(*storage_);
    // Column-major storage: one sweep with a row -> slot lookup.
    std::vector<Index> slot(static_cast<std::size_t>(rows_), -1);
    Matrix out = Matrix::Zero(k, cols_);
    for (Index t = 0; t < k; ++t)
      slot[static_cast<std::size_t>(rows[t])] = t;
    for (Index j = 0; j < cols_; ++j)
      for (SparseMatrix::InnerIterator it(a, j); it; ++it)
        if (Index s = slot[static_cast<std::size_t>(it.row())]; s >= 0)
          out(s, j) = it.value();
    // Repeated indices map to the last slot above; fill the others.
    for (Index t = 0; t < k; ++t)
      if (slot[static_cast<std::size_t>(rows[t])] != t)
        out.row(t) = out.row(slot[static_cast<std::size_t>(rows[t])]);
    return out;
  }
  case StorageKind::oracle:
    break;
  }
  Matrix e = Matrix::Zero(rows_, k);
  for (Index t = 0; t < k; ++t)
    e(rows[t], t) = 1.0;
  return raw_apply_transpose(e).transpose();
}

Matrix MatrixSource::column_block(Index first, Index count) const {
  if (first < 0 || count < 0 || first + count > cols_)
    throw DimensionError("column block out of range");
  switch (kind_) {
  case StorageKind::dense:
    return std::get<Matrix>(*storage_).middleCols(first, count);
  case StorageKind::sparse:
    return Matrix(std::get<SparseMatrix>(*storage_).middleCols(first, count));
  case StorageKind::oracle:
    break;
  }
  Matrix e = Matrix::Zero(cols_, count);
  for (Index t = 0; t < count; ++t)
    e(first + t, t) = 1.0;
  return raw_apply(e);
}

Matrix MatrixSource::to_dense() const { return column_block(0, cols_); }

MatrixSource MatrixSource::transposed() const {
  switch (kind_) {
  case StorageKind::dense:
    return dense(std::get<Matrix>(*storage_).transpose());
  case StorageKind::sparse:
    return sparse(SparseMatrix(std::get<SparseMatrix>(*storage_).transpose()));
  case StorageKind::oracle:
    break;
  }
  const auto& o = std::get<Oracle>(*storage_);
  return oracle(cols_, rows_, o.apply_transpose, o.apply, nnz_);
}

long MatrixSource::passes() const noexcept { return counters_->passes.load(); }
long MatrixSource::applications() const noexcept { return counters_->applications.load(); }
void MatrixSource::record_pass() const noexcept { counters_->passes.fetch_add(1); }
void MatrixSource::record_application() const noexcept { counters_->applications.fetch_add(1); }

Matrix StreamBlock::to_dense() const {
  if (const auto* d = std::get_if<Matrix>(&panel))
    return *d;
  return Matrix(std::get<SparseMatrix>(panel));
}

ColumnStream::ColumnStream(MatrixSource source, Index block_width)
    : source_(std::move(source)), width_(block_width) {
  if (block_width < 1)
    throw ParameterError("block_width must be >= 1");
}

Index ColumnStream::block_count() const noexcept { return (source_.cols() + width_ - 1) / width_; }

std::optional<StreamBlock> ColumnStream::next() {
  if (finished_)
    return std::nullopt;
  const Index n = source_.cols();
  const Index count = std::min(width_, n - cursor_);
  StreamBlock block;
  block.first = cursor_;
  block.count = count;
  if (const auto* sp = source_.sparse_data())
    block.panel = SparseMatrix(sp->middleCols(cursor_, count));
  else
    block.panel = source_.column_block(cursor_, count);
  cursor_ += count;
  if (cursor_ >= n) {
    finished_ = true;
    source_.record_pass();
  }
  return block;
}

ColumnStream stream_columns(const MatrixSource& a, Index block_width) {
  return ColumnStream(a, block_width);
}

TripletStream::TripletStream(MatrixSource source, Index batch) : source_(std::move(source)), batch_(batch) {
  if (batch < 1)
    throw ParameterError("triplet batch must be >= 1");
  if (source_.sparse_data() == nullptr)
    throw ParameterError("triplet streaming requires a sparse source");
}

std::optional<std::vector<Triplet>> TripletStream::next() {
  if (finished_)
    return std::nullopt;
  const SparseMatrix& a = *source_.sparse_data();
  const auto* outer = a.outerIndexPtr();
  const auto* inner = a.innerIndexPtr();
  const auto* values = a.valuePtr();
  std::vector<Triplet> out;
  out.reserve(static_cast<std::size_t>(batch_));
  while (column_ < a.cols() && static_cast<Index>(out.size()) < batch_) {
    const Index p = outer[column_] + offset_;
    if (p < outer[column_ + 1]) {
      out.emplace_back(inner[p], column_, values[p]);
      ++offset_;
    } else {
      ++column_;
      offset_ = 0;
    }
  }
  // Skip trailing empty columns so exhaustion is detected on this call.
  while (column_ < a.cols() && outer[column_] + offset_ >= outer[column_ + 1]) {
    ++column_;
    offset_ = 0;
  }
  if (column_ >= a.cols()) {
    finished_ = true;
    source_.record_pass();
  }
  if (out.empty())
    return std::nullopt;
  return out;
}

} // namespace randskel
