#include "randskel/skeleton.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_set>

#include <Eigen/LU>
#include "json.hpp"

#include "randskel/errors.hpp"
#include "randskel/linalg.hpp"
#include "randskel/random.hpp"

namespace randskel {

namespace {

constexpr Index kDenseEtaLimit = 5000;

void check_l(const MatrixSource& a, Index l) {
  if (l < 1 || l > std::min(a.rows(), a.cols()))
    throw ParameterError("skeleton size l = " + std::to_string(l) + " must lie in [1, min(m, n)] = [1, " +
                         std::to_string(std::min(a.rows(), a.cols())) + "]");
}

std::string default_tag(const FrameworkOptions& o) {
  const std::string base = o.pivot == PivotKind::lupp ? "rand-lupp" : "rand-cpqr";
  switch (o.row_space) {
  case RowSpaceKind::sketch:
    return base;
  case RowSpaceKind::power_sketch:
    return base + "-" + std::to_string(o.power_iterations) + "piter";
  case RowSpaceKind::rsvd:
    return o.pivot == PivotKind::lupp ? "rsvd-deim" : "rsvd-cpqr";
  }
  return base;
}

RowSpaceApproximator build_row_space(const MatrixSource& a, Index l, const FrameworkOptions& o) {
  switch (o.row_space) {
  case RowSpaceKind::sketch:
    return row_sketch_rangefinder(a, make_embedding(o.sketch, l, a.rows()));
  case RowSpaceKind::power_sketch:
    if (o.power_iterations < 1) throw ParameterError("power_sketch needs power_iterations >= 1");
    return plain_power_iteration(a, make_embedding(o.sketch, l, a.cols()), o.power_iterations);
  case RowSpaceKind::rsvd: {
    if (o.power_iterations < 1) throw ParameterError("rsvd needs power_iterations >= 1");
    auto y = orthogonalized_power_iteration(a, make_embedding(o.sketch, l, a.cols()), o.power_iterations);
    const SpectralData sd = randomized_svd(a, y);
    RowSpaceApproximator x;
    x.X = sd.V.transpose();
    x.provenance = RowSpaceProvenance::rsvd;
    x.power_iterations = o.power_iterations;
    x.seed = o.sketch.seed;
    return x;
  }
  }
  throw ParameterError("unknown row space kind");
}

std::optional<double> opt_eta(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

} // namespace

EmbeddingSpec make_embedding(const SketchOptions& options, Index l, Index ambient) {
  EmbeddingSpec spec;
  spec.kind = options.kind;
  spec.l = l;
  spec.m = ambient;
  spec.zeta = options.zeta;
  spec.seed = options.seed;
  spec.validate();
  return spec;
}

EtaCertificate eta_certificate(const Matrix& x, std::span<const Index> pivots) {
  const Index l = x.rows();
  const Index n = x.cols();
  if (static_cast<Index>(pivots.size()) != l)
    throw DimensionError("eta certificate needs exactly rows(X) pivots");
  EtaCertificate cert;
  std::vector<char> chosen(static_cast<std::size_t>(n), 0);
  for (Index p : pivots) {
    if (p < 0 || p >= n || chosen[static_cast<std::size_t>(p)])
      throw ParameterError("eta certificate: invalid or repeated pivot " + std::to_string(p));
    chosen[static_cast<std::size_t>(p)] = 1;
    cert.perm.push_back(p);
  }
  for (Index j = 0; j < n; ++j)
    if (!chosen[static_cast<std::size_t>(j)]) cert.perm.push_back(j);

  cert.X1 = gather_columns(x, pivots);
  const std::span<const Index> rest(cert.perm.data() + l, static_cast<std::size_t>(n - l));
  cert.X2 = gather_columns(x, rest);
  if (n == l) {
    cert.eta_bound = 1.0;
    return cert;
  }

  Eigen::PartialPivLU<Matrix> lu(cert.X1);
  const double rc = lu.rcond();
  if (!(rc > 1e-15))
    throw SingularMatrixError("eta certificate: X(:, pivots) is singular (rcond " + std::to_string(rc) + ")");
  const Matrix t = lu.solve(cert.X2);
  if (!all_finite(t)) throw InstabilityError("eta certificate: non-finite solve");

  double s = 0.0;
  if (n - l <= kDenseEtaLimit) {
    s = spectral_norm(t);
  } else {
    auto est = spectral_norm_estimate(
        t.rows(), t.cols(), [&](const Vector& v) -> Vector { return t * v; },
        [&](const Vector& v) -> Vector { return t.transpose() * v; }, 1e-4, 200, 0x65746100ULL);
    s = est.value;
  }
  cert.eta_bound = std::sqrt(1.0 + s * s);
  return cert;
}

void SkeletonSet::validate(Index m, Index n) const {
  auto check = [](const IndexList& idx, Index bound, const char* what) {
    std::unordered_set<Index> seen;
    for (Index i : idx) {
      if (i < 0 || i >= bound)
        throw ParameterError(std::string(what) + " index " + std::to_string(i) + " out of range [0, " +
                             std::to_string(bound) + ")");
      if (!seen.insert(i).second) throw ParameterError(std::string(what) + " index " + std::to_string(i) + " repeated");
    }
  };
  check(Js, n, "column");
  check(Is, m, "row");
  if (!Is.empty() && Is.size() != Js.size())
    throw ParameterError("row and column skeletons differ in size");
}

std::string to_json(const SkeletonSet& set) {
  nlohmann::json j;
  j["algorithm"] = set.algorithm;
  j["seed"] = set.seed;
  j["Js"] = set.Js;
  j["Is"] = set.Is;
  j["eta_col"] = set.eta_col ? nlohmann::json(set.eta_col->eta_bound) : nlohmann::json(nullptr);
  j["eta_row"] = set.eta_row ? nlohmann::json(set.eta_row->eta_bound) : nlohmann::json(nullptr);
  if (set.eta_col && set.eta_col->residual_norm) j["residual_col"] = *set.eta_col->residual_norm;
  return j.dump(2);
}

SkeletonSet skeleton_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("skeleton set: ") + e.what(), 0);
  }
  SkeletonSet s;
  try {
    s.algorithm = j.value("algorithm", std::string());
    s.seed = j.value("seed", std::uint64_t{0});
    s.Js = j.at("Js").get<IndexList>();
    s.Is = j.value("Is", IndexList{});
    if (auto e = opt_eta(j, "eta_col")) {
      s.eta_col.emplace();
      s.eta_col->eta_bound = *e;
      if (j.contains("residual_col")) s.eta_col->residual_norm = j.at("residual_col").get<double>();
    }
    if (auto e = opt_eta(j, "eta_row")) {
      s.eta_row.emplace();
      s.eta_row->eta_bound = *e;
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("skeleton set: ") + e.what(), 0);
  }
  return s;
}

SkeletonSet select_framework(const MatrixSource& a, Index l, const FrameworkOptions& options) {
  check_l(a, l);
  const RowSpaceApproximator x = build_row_space(a, l, options);
  const PivotFactorization pc = pivot_columns(x.X, options.pivot);

  SkeletonSet out;
  out.algorithm = options.algorithm.empty() ? default_tag(options) : options.algorithm;
  out.seed = options.sketch.seed;
  out.Js = pc.pivots;

  const Matrix c = a.columns(out.Js);
  const PivotFactorization pr = pivot_rows(c, options.pivot);
  out.Is = pr.pivots;

  if (options.certificates) {
    out.eta_col = eta_certificate(x.X, out.Js);
    out.eta_row = eta_certificate(c.transpose(), out.Is);
    if (options.residual) out.eta_col->residual_norm = rangefinder_error(a.to_dense(), x.X);
  }
  return out;
}

SkeletonSet rand_lupp(const MatrixSource& a, Index l, const SketchOptions& sketch, int q) {
  if (q < 0) throw ParameterError("power iteration count must be >= 0");
  FrameworkOptions o;
  o.row_space = q == 0 ? RowSpaceKind::sketch : RowSpaceKind::power_sketch;
  o.pivot = PivotKind::lupp;
  o.sketch = sketch;
  o.power_iterations = q;
  return select_framework(a, l, o);
}

SkeletonSet rand_cpqr(const MatrixSource& a, Index l, const SketchOptions& sketch, int q) {
  if (q < 0) throw ParameterError("power iteration count must be >= 0");
  FrameworkOptions o;
  o.row_space = q == 0 ? RowSpaceKind::sketch : RowSpaceKind::power_sketch;
  o.pivot = PivotKind::cpqr;
  o.sketch = sketch;
  o.power_iterations = q;
  return select_framework(a, l, o);
}

SkeletonSet rsvd_deim(const MatrixSource& a, Index l, const SketchOptions& sketch) {
  FrameworkOptions o;
  o.row_space = RowSpaceKind::rsvd;
  o.pivot = PivotKind::lupp;
  o.sketch = sketch;
  o.power_iterations = 1;
  return select_framework(a, l, o);
}

IndexList sample_without_replacement(const Vector& weights, Index count, std::uint64_t seed) {
  if (count < 0) throw ParameterError("sample count must be non-negative");
  Vector w = weights;
  Index positive = 0;
  for (Index i = 0; i < w.size(); ++i) {
    if (!std::isfinite(w(i)) || w(i) < 0.0) throw ParameterError("sampling weights must be finite and non-negative");
    if (w(i) > 0.0) ++positive;
  }
  if (positive < count)
    throw RankDeficiencyError("leverage sampling", positive,
                              "only " + std::to_string(positive) + " positive scores for " + std::to_string(count) +
                                  " draws");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  IndexList out;
  out.reserve(static_cast<std::size_t>(count));
  for (Index d = 0; d < count; ++d) {
    const double total = w.sum();
    const double u = unif(rng) * total;
    double acc = 0.0;
    Index pick = -1;
    for (Index i = 0; i < w.size(); ++i) {
      if (w(i) <= 0.0) continue;
      pick = i;
      acc += w(i);
      if (u < acc) break;
    }
    out.push_back(pick);
    w(pick) = 0.0;
  }
  return out;
}

SkeletonSet rsvd_leverage_sampling(const MatrixSource& a, Index k, Index l, const SketchOptions& sketch,
                                   std::uint64_t sample_seed) {
  check_l(a, l);
  if (k < 1 || k > l) throw ParameterError("leverage sampling needs 1 <= k <= l");
  auto y = orthogonalized_power_iteration(a, make_embedding(sketch, l, a.cols()), 1);
  const SpectralData sd = randomized_svd(a, y);
  SkeletonSet out;
  out.algorithm = "rsvd-ls";
  out.seed = sketch.seed;
  out.Js = sample_without_replacement(leverage_scores(sd, k), k, derive_seed(sample_seed, 0x636f6c, 0));
  out.Is = sample_without_replacement(row_leverage_scores(sd, k), k, derive_seed(sample_seed, 0x726f77, 0));
  return out;
}

StreamingSelection streaming_select(const MatrixSource& a, Index l, const SketchOptions& gamma,
                                    const SketchOptions& omega, PivotKind pivot, Index block_width) {
  check_l(a, l);
  const Index m = a.rows();
  const Index n = a.cols();
  const Embedding g(make_embedding(gamma, l, m));
  const Embedding w(make_embedding(omega, l, n));
  const bool srtt = gamma.kind == EmbeddingKind::srtt;
  const Matrix gd = srtt ? Matrix() : g.dense();

  StreamingSelection out;
  out.X = Matrix::Zero(l, n);
  out.Y = Matrix::Zero(m, l);

  // Every column is folded in on its own, in index order, so the panel
  // width never changes the floating-point result.
  ColumnStream stream(a, block_width);
  while (auto block = stream.next()) {
    const Matrix om = w.columns(block->first, block->count);
    if (block->is_sparse()) {
      const auto& p = std::get<SparseMatrix>(block->panel);
      for (Index c = 0; c < p.outerSize(); ++c) {
        const Index j = block->first + c;
        if (srtt) {
          Vector col = Vector::Zero(m);
          for (SparseMatrix::InnerIterator it(p, c); it; ++it) col(it.row()) = it.value();
          out.X.col(j) = g.apply(col);
        } else {
          for (SparseMatrix::InnerIterator it(p, c); it; ++it) out.X.col(j) += it.value() * gd.col(it.row());
        }
        for (SparseMatrix::InnerIterator it(p, c); it; ++it)
          out.Y.row(it.row()) += it.value() * om.col(c).transpose();
      }
    } else {
      const auto& p = std::get<Matrix>(block->panel);
      for (Index c = 0; c < p.cols(); ++c) {
        const Index j = block->first + c;
        const Vector col = p.col(c);
        if (srtt)
          out.X.col(j) = g.apply(col);
        else
          out.X.col(j).noalias() = gd * col;
        out.Y.noalias() += col * om.col(c).transpose();
      }
    }
  }

  if (!all_finite(out.X) || !all_finite(out.Y)) throw InstabilityError("streaming sketch produced non-finite values");

  const PivotFactorization pc = pivot_columns(out.X, pivot);
  const PivotFactorization pr = pivot_rows(out.Y, pivot);
  out.set.algorithm = std::string("streaming-") + to_string(pivot);
  out.set.seed = gamma.seed;
  out.set.Js = pc.pivots;
  out.set.Is = pr.pivots;
  out.set.eta_col = eta_certificate(out.X, out.set.Js);
  out.set.eta_row = eta_certificate(out.Y.transpose(), out.set.Is);
  return out;
}

} // namespace randskel
