#include "randskel/embed.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>

#include <fftw3.h>

#include "randskel/errors.hpp"
#include "randskel/random.hpp"

namespace randskel {
namespace {

constexpr std::uint64_t kGaussianStream = 0x6761;
constexpr std::uint64_t kSparseStream = 0x7373;
constexpr std::uint64_t kSrttPermStream = 0x7031;
constexpr std::uint64_t kSrttSignStream = 0x7032;
constexpr std::uint64_t kSrttRowStream = 0x7033;

// FFTW planning is not thread safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex mu;
  return mu;
}

void gaussian_column(const EmbeddingSpec& spec, Index j, double* out) {
  std::mt19937_64 gen(derive_seed(spec.seed, kGaussianStream, static_cast<std::uint64_t>(j)));
  std::normal_distribution<double> normal(0.0, 1.0 / std::sqrt(static_cast<double>(spec.l)));
  for (Index i = 0; i < spec.l; ++i)
    out[i] = normal(gen);
}

} // namespace

std::string to_string(EmbeddingKind kind) {
  switch (kind) {
  case EmbeddingKind::gaussian:
    return "gaussian";
  case EmbeddingKind::srtt:
    return "srtt";
  case EmbeddingKind::sparse_sign:
    return "sparse_sign";
  }
  return "unknown";
}

EmbeddingKind parse_embedding_kind(const std::string& text) {
  if (text == "gaussian")
    return EmbeddingKind::gaussian;
  if (text == "srtt")
    return EmbeddingKind::srtt;
  if (text == "sparse_sign" || text == "sparse-sign")
    return EmbeddingKind::sparse_sign;
  throw ParameterError("unknown embedding kind '" + text + "'");
}

Index EmbeddingSpec::effective_zeta() const noexcept {
  if (kind != EmbeddingKind::sparse_sign)
    return 0;
  return zeta > 0 ? zeta : std::min<Index>(l, 8);
}

void EmbeddingSpec::validate() const {
  if (l < 1 || m < 1 || l > m)
    throw ParameterError("embedding needs 1 <= l <= m, got l=" + std::to_string(l) +
                         ", m=" + std::to_string(m));
  if (kind == EmbeddingKind::sparse_sign) {
    const Index z = effective_zeta();
    if (z < 2 || z > l)
      throw ParameterError("sparse sign embedding needs 2 <= zeta <= l, got zeta=" +
                           std::to_string(z) + ", l=" + std::to_string(l));
  }
}

Index default_embedding_dim(EmbeddingKind kind, Index k) {
  if (k < 1)
    throw ParameterError("target rank must be positive");
  if (kind == EmbeddingKind::gaussian)
    return k + 10;
  return (3 * k + 1) / 2 + 10;
}

struct Embedding::Srtt {
  std::vector<Index> perm;       // (Pi x)_i = x_{perm[i]}
  std::vector<Index> inv_perm;
  std::vector<double> signs;
  std::vector<Index> rows;       // kept rows of the transform
  fftw_plan plan = nullptr;

  ~Srtt() {
    if (plan) {
      std::lock_guard lock(fftw_planner_mutex());
      fftw_destroy_plan(plan);
    }
  }
};

Embedding::Embedding(EmbeddingSpec spec) : spec_(spec) {
  spec_.validate();
  const Index l = spec_.l;
  const Index m = spec_.m;
  if (spec_.kind == EmbeddingKind::srtt) {
    srtt_ = std::make_unique<Srtt>();
    auto& s = *srtt_;
    s.perm.resize(static_cast<std::size_t>(m));
    std::iota(s.perm.begin(), s.perm.end(), Index{0});
    std::mt19937_64 pg(derive_seed(spec_.seed, kSrttPermStream));
    std::shuffle(s.perm.begin(), s.perm.end(), pg);
    s.inv_perm.resize(s.perm.size());
    for (Index i = 0; i < m; ++i)
      s.inv_perm[static_cast<std::size_t>(s.perm[static_cast<std::size_t>(i)])] = i;

    std::mt19937_64 sg(derive_seed(spec_.seed, kSrttSignStream));
    std::bernoulli_distribution coin(0.5);
    s.signs.resize(static_cast<std::size_t>(m));
    for (auto& v : s.signs)
      v = coin(sg) ? 1.0 : -1.0;

    std::vector<Index> all(static_cast<std::size_t>(m));
    std::iota(all.begin(), all.end(), Index{0});
    std::mt19937_64 rg(derive_seed(spec_.seed, kSrttRowStream));
    for (Index i = 0; i < l; ++i) {
      std::uniform_int_distribution<Index> pick(i, m - 1);
      std::swap(all[static_cast<std::size_t>(i)], all[static_cast<std::size_t>(pick(rg))]);
    }
    s.rows.assign(all.begin(), all.begin() + l);

    std::vector<double> in(static_cast<std::size_t>(m)), out(static_cast<std::size_t>(m));
    std::lock_guard lock(fftw_planner_mutex());
    s.plan = fftw_plan_r2r_1d(static_cast<int>(m), in.data(), out.data(), FFTW_DHT,
                              FFTW_ESTIMATE | FFTW_UNALIGNED);
    if (!s.plan)
      throw Error("FFTW could not plan a Hartley transform of size " + std::to_string(m));
  } else if (spec_.kind == EmbeddingKind::sparse_sign) {
    const Index z = spec_.effective_zeta();
    const double v = 1.0 / std::sqrt(static_cast<double>(z));
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(m * z));
    std::vector<Index> rows(static_cast<std::size_t>(l));
    for (Index j = 0; j < m; ++j) {
      std::mt19937_64 gen(derive_seed(spec_.seed, kSparseStream, static_cast<std::uint64_t>(j)));
      std::iota(rows.begin(), rows.end(), Index{0});
      std::bernoulli_distribution coin(0.5);
      // Partial Fisher-Yates: first z slots are distinct uniform rows.
      for (Index i = 0; i < z; ++i) {
        std::uniform_int_distribution<Index> pick(i, l - 1);
        std::swap(rows[static_cast<std::size_t>(i)], rows[static_cast<std::size_t>(pick(gen))]);
        t.emplace_back(rows[static_cast<std::size_t>(i)], j, coin(gen) ? v : -v);
      }
    }
    sparse_.resize(l, m);
    sparse_.setFromTriplets(t.begin(), t.end());
  }
}

Embedding::~Embedding() = default;
Embedding::Embedding(Embedding&&) noexcept = default;
Embedding& Embedding::operator=(Embedding&&) noexcept = default;

Matrix Embedding::columns(Index first, Index count) const {
  if (first < 0 || count < 0 || first + count > spec_.m)
    throw DimensionError("embedding column block out of range");
  const Index l = spec_.l;
  Matrix out(l, count);
  switch (spec_.kind) {
  case EmbeddingKind::gaussian:
    for (Index c = 0; c < count; ++c)
      gaussian_column(spec_, first + c, out.col(c).data());
    break;
  case EmbeddingKind::sparse_sign:
    out = Matrix(sparse_.middleCols(first, count));
    break;
  case EmbeddingKind::srtt: {
    // Gamma e_j = sign * cas(2 pi row * i / m) / sqrt(l), with i = Pi^{-1}(j).
    const auto& s = *srtt_;
    const Index m = spec_.m;
    const double scale = 1.0 / std::sqrt(static_cast<double>(l));
    for (Index c = 0; c < count; ++c) {
      const Index i = s.inv_perm[static_cast<std::size_t>(first + c)];
      const double sign = s.signs[static_cast<std::size_t>(i)];
      for (Index r = 0; r < l; ++r) {
        const Index k = s.rows[static_cast<std::size_t>(r)];
        const Index phase = static_cast<Index>((static_cast<__int128>(k) * i) % m);
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(m);
        out(r, c) = sign * scale * (std::cos(angle) + std::sin(angle));
      }
    }
    break;
  }
  }
  return out;
}

Matrix Embedding::dense() const { return columns(0, spec_.m); }

const SparseMatrix& Embedding::sparse() const {
  if (spec_.kind != EmbeddingKind::sparse_sign)
    throw ParameterError("sparse() is only available for sparse sign embeddings");
  return sparse_;
}

void Embedding::hartley_columns(const Matrix& mixed_in, Matrix& out) const {
  out.resize(mixed_in.rows(), mixed_in.cols());
  Vector buffer(mixed_in.rows());
  for (Index c = 0; c < mixed_in.cols(); ++c) {
    buffer = mixed_in.col(c);
    fftw_execute_r2r(srtt_->plan, buffer.data(), out.col(c).data());
  }
}

Vector Embedding::srtt_mix(const Vector& x) const {
  if (spec_.kind != EmbeddingKind::srtt)
    throw ParameterError("srtt_mix is only available for SRTT embeddings");
  if (x.size() != spec_.m)
    throw DimensionError("srtt_mix: vector length mismatch");
  const auto& s = *srtt_;
  Matrix u(spec_.m, 1);
  for (Index i = 0; i < spec_.m; ++i)
    u(i, 0) = s.signs[static_cast<std::size_t>(i)] * x(s.perm[static_cast<std::size_t>(i)]);
  Matrix h;
  hartley_columns(u, h);
  return h.col(0) / std::sqrt(static_cast<double>(spec_.m));
}

Matrix Embedding::srtt_apply(const Matrix& b) const {
  const auto& s = *srtt_;
  const Index m = spec_.m;
  const Index l = spec_.l;
  // sqrt(m/l) from the subsampling and 1/sqrt(m) from the unitary transform.
  const double scale = 1.0 / std::sqrt(static_cast<double>(l));
  Matrix out(l, b.cols());
  Vector u(m), h(m);
  for (Index c = 0; c < b.cols(); ++c) {
    for (Index i = 0; i < m; ++i)
      u(i) = s.signs[static_cast<std::size_t>(i)] * b(s.perm[static_cast<std::size_t>(i)], c);
    fftw_execute_r2r(s.plan, u.data(), h.data());
    for (Index r = 0; r < l; ++r)
      out(r, c) = scale * h(s.rows[static_cast<std::size_t>(r)]);
  }
  return out;
}

Matrix Embedding::apply(const Matrix& b) const {
  if (b.rows() != spec_.m)
    throw DimensionError("embedding expects " + std::to_string(spec_.m) + " rows, got " +
                         std::to_string(b.rows()));
  switch (spec_.kind) {
  case EmbeddingKind::gaussian:
    return dense() * b;
  case EmbeddingKind::sparse_sign:
    return sparse_ * b;
  case EmbeddingKind::srtt:
    break;
  }
  return srtt_apply(b);
}

Matrix Embedding::apply(const SparseMatrix& b) const {
  if (b.rows() != spec_.m)
    throw DimensionError("embedding expects " + std::to_string(spec_.m) + " rows, got " +
                         std::to_string(b.rows()));
  switch (spec_.kind) {
  case EmbeddingKind::gaussian:
    return dense() * b;
  case EmbeddingKind::sparse_sign:
    return Matrix(SparseMatrix(sparse_ * b));
  case EmbeddingKind::srtt:
    break;
  }
  // Densify one column at a time to keep the workspace at O(m).
  const Index l = spec_.l;
  Matrix out(l, b.cols());
  Matrix col(spec_.m, 1);
  for (Index c = 0; c < b.cols(); ++c) {
    col.setZero();
    for (SparseMatrix::InnerIterator it(b, c); it; ++it)
      col(it.row(), 0) = it.value();
    out.col(c) = srtt_apply(col).col(0);
  }
  return out;
}

Vector Embedding::apply(const Vector& b) const {
  Matrix bm = b;
  return apply(bm).col(0);
}

Matrix sketch(const EmbeddingSpec& spec, const MatrixSource& a, SketchSide side) {
  const Index ambient = side == SketchSide::row ? a.rows() : a.cols();
  if (spec.m != ambient)
    throw DimensionError("embedding ambient dimension " + std::to_string(spec.m) +
                         " does not match the sketched dimension " + std::to_string(ambient));
  Embedding emb(spec);
  if (a.storage() == StorageKind::oracle) {
    Matrix gt = emb.dense().transpose();
    if (side == SketchSide::row)
      return a.apply_transpose(gt).transpose();
    return a.apply(gt);
  }
  a.record_application();
  if (const auto* d = a.dense_data()) {
    if (side == SketchSide::row)
      return emb.apply(*d);
    return emb.apply(Matrix(d->transpose())).transpose();
  }
  const SparseMatrix& s = *a.sparse_data();
  if (side == SketchSide::row)
    return emb.apply(s);
  return emb.apply(SparseMatrix(s.transpose())).transpose();
}

namespace {
void require_kind(const EmbeddingSpec& spec, EmbeddingKind kind) {
  if (spec.kind != kind)
    throw ParameterError("expected a " + to_string(kind) + " embedding spec, got " + to_string(spec.kind));
}
} // namespace

Matrix gaussian_sketch(const EmbeddingSpec& spec, const MatrixSource& a, SketchSide side) {
  require_kind(spec, EmbeddingKind::gaussian);
  return sketch(spec, a, side);
}

Matrix srtt_sketch(const EmbeddingSpec& spec, const MatrixSource& a, SketchSide side) {
  require_kind(spec, EmbeddingKind::srtt);
  return sketch(spec, a, side);
}

Matrix sparse_sign_sketch(const EmbeddingSpec& spec, const MatrixSource& a, SketchSide side) {
  require_kind(spec, EmbeddingKind::sparse_sign);
  return sketch(spec, a, side);
}

} // namespace randskel
