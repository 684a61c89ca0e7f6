#include <cmath>

#include "catch_amalgamated.hpp"

#include "oracles.hpp"
#include "randskel/embed.hpp"
#include "randskel/errors.hpp"
#include "randskel/linalg.hpp"

using namespace randskel;

namespace {

EmbeddingSpec make(EmbeddingKind kind, Index l, Index m, std::uint64_t seed, Index zeta = 0) {
  EmbeddingSpec s;
  s.kind = kind;
  s.l = l;
  s.m = m;
  s.seed = seed;
  s.zeta = zeta;
  return s;
}

double mean_sq_norm_e1(EmbeddingKind kind, Index l, Index m, int seeds) {
  double total = 0.0;
  for (int s = 0; s < seeds; ++s) {
    const Embedding g(make(kind, l, m, static_cast<std::uint64_t>(s) + 1));
    total += g.apply(Vector(Vector::Unit(m, 0))).squaredNorm();
  }
  return total / seeds;
}

} // namespace

TEST_CASE("embed - spec validation and defaults", "[embed]") {
  CHECK_THROWS_AS(make(EmbeddingKind::gaussian, 0, 10, 1).validate(), ParameterError);
  CHECK_THROWS_AS(make(EmbeddingKind::gaussian, 11, 10, 1).validate(), ParameterError);
  CHECK_THROWS_AS(make(EmbeddingKind::sparse_sign, 5, 10, 1, 1).validate(), ParameterError);
  CHECK_THROWS_AS(make(EmbeddingKind::sparse_sign, 5, 10, 1, 6).validate(), ParameterError);
  CHECK(make(EmbeddingKind::sparse_sign, 20, 100, 1).effective_zeta() == 8);
  CHECK(make(EmbeddingKind::sparse_sign, 5, 100, 1).effective_zeta() == 5);
  CHECK(default_embedding_dim(EmbeddingKind::gaussian, 20) == 30);
  CHECK(default_embedding_dim(EmbeddingKind::srtt, 20) == 40);
  CHECK(default_embedding_dim(EmbeddingKind::sparse_sign, 5) == 18);
  CHECK(parse_embedding_kind("sparse-sign") == EmbeddingKind::sparse_sign);
  CHECK(parse_embedding_kind(to_string(EmbeddingKind::srtt)) == EmbeddingKind::srtt);
  CHECK_THROWS_AS(parse_embedding_kind("fourier"), ParameterError);
}

TEST_CASE("embed - zero input gives zero sketch", "[embed]") {
  const auto zero = MatrixSource::dense(Matrix::Zero(16, 5));
  for (auto kind : {EmbeddingKind::gaussian, EmbeddingKind::srtt, EmbeddingKind::sparse_sign}) {
    const Matrix x = sketch(make(kind, 16, 16, 3), zero, SketchSide::row);
    CHECK(x.rows() == 16);
    CHECK(x.cols() == 5);
    CHECK(x.cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("embed - explicit columns, dense form and application agree", "[embed]") {
  const Matrix a = oracle::gaussian(37, 6, 4);
  for (auto kind : {EmbeddingKind::gaussian, EmbeddingKind::srtt, EmbeddingKind::sparse_sign}) {
    const Embedding g(make(kind, 9, 37, 5));
    const Matrix d = g.dense();
    REQUIRE(d.rows() == 9);
    REQUIRE(d.cols() == 37);
    CHECK((g.columns(10, 7) - d.middleCols(10, 7)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK((g.apply(a) - d * a).norm() <= 1e-12 * (d.norm() * a.norm()));
    const SparseMatrix as = a.sparseView();
    CHECK((g.apply(as) - d * a).norm() <= 1e-12 * (d.norm() * a.norm()));
  }
}

TEST_CASE("embed - row and column sides", "[embed]") {
  const Matrix a = oracle::gaussian(30, 20, 6);
  const auto src = MatrixSource::dense(a);
  const Embedding g(make(EmbeddingKind::gaussian, 5, 30, 7));
  const Embedding w(make(EmbeddingKind::gaussian, 5, 20, 7));
  CHECK((gaussian_sketch(make(EmbeddingKind::gaussian, 5, 30, 7), src, SketchSide::row) - g.dense() * a).norm() <= 1e-12);
  CHECK((gaussian_sketch(make(EmbeddingKind::gaussian, 5, 20, 7), src, SketchSide::col) - a * w.dense().transpose())
            .norm() <= 1e-12);
  CHECK_THROWS_AS(gaussian_sketch(make(EmbeddingKind::gaussian, 5, 21, 7), src, SketchSide::row), DimensionError);
  CHECK_THROWS_AS(srtt_sketch(make(EmbeddingKind::gaussian, 5, 30, 7), src), ParameterError);
}

TEST_CASE("embed - determinism", "[embed]") {
  const Matrix a = oracle::gaussian(64, 8, 8);
  for (auto kind : {EmbeddingKind::gaussian, EmbeddingKind::srtt, EmbeddingKind::sparse_sign}) {
    const Matrix x1 = Embedding(make(kind, 12, 64, 99)).apply(a);
    const Matrix x2 = Embedding(make(kind, 12, 64, 99)).apply(a);
    const Matrix x3 = Embedding(make(kind, 12, 64, 100)).apply(a);
    CHECK(x1 == x2);
    CHECK(x1 != x3);
  }
}

TEST_CASE("gaussian - norm preservation in expectation", "[embed][montecarlo]") {
  const double mean = mean_sq_norm_e1(EmbeddingKind::gaussian, 20, 50, 2000);
  CHECK(std::abs(mean - 1.0) <= 0.1);
}

TEST_CASE("gaussian - subspace distortion for rank 5 at l = 200", "[embed][montecarlo]") {
  const Matrix a = oracle::low_rank(300, 40, 5, 10);
  const Embedding g(make(EmbeddingKind::gaussian, 200, 300, 11));
  const Matrix ga = g.apply(a);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> nd;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    Vector x(40);
    for (Index i = 0; i < 40; ++i) x(i) = nd(rng);
    x.normalize();
    const double ax = (a * x).norm();
    worst = std::max(worst, std::abs((ga * x).norm() - ax) / ax);
  }
  CHECK(worst <= 0.5);
}

TEST_CASE("gaussian - sketches of full-rank input have full row rank", "[embed]") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const Matrix a = oracle::gaussian(60, 45, 100 + s);
    const Matrix x = Embedding(make(EmbeddingKind::gaussian, 15, 60, s)).apply(a);
    const Vector sv = oracle::singular_values(x);
    CHECK(sv(sv.size() - 1) > 1e-10 * sv(0));
  }
}

TEST_CASE("srtt - mixing stage is an isometry", "[embed][srtt]") {
  const Embedding g(make(EmbeddingKind::srtt, 16, 64, 13));
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Vector x = oracle::gaussian(64, 1, s).col(0);
    CHECK(std::abs(g.srtt_mix(x).norm() - x.norm()) <= 1e-12 * x.norm());
  }
  // Odd and prime lengths go through the same transform.
  const Embedding p(make(EmbeddingKind::srtt, 5, 31, 14));
  const Vector y = oracle::gaussian(31, 1, 15).col(0);
  CHECK(std::abs(p.srtt_mix(y).norm() - y.norm()) <= 1e-12 * y.norm());
}

TEST_CASE("srtt - captures an exact rank-5 range", "[embed][srtt]") {
  const Matrix a = oracle::low_rank(200, 150, 5, 16);
  const Matrix x = srtt_sketch(make(EmbeddingKind::srtt, 40, 200, 17), MatrixSource::dense(a));
  CHECK(oracle::rangefinder_residual(a, x).norm() <= 1e-8 * a.norm());
}

TEST_CASE("srtt - subsampled rows are scaled Hartley rows", "[embed][srtt]") {
  // sqrt(m/l) * (1/sqrt(m)) = 1/sqrt(l): every entry has |.| <= sqrt(2/l).
  const Embedding g(make(EmbeddingKind::srtt, 8, 32, 18));
  CHECK(g.dense().cwiseAbs().maxCoeff() <= std::sqrt(2.0 / 8.0) + 1e-12);
  const double mean = mean_sq_norm_e1(EmbeddingKind::srtt, 8, 32, 500);
  CHECK(std::abs(mean - 1.0) <= 0.15);
}

TEST_CASE("sparse sign - column structure", "[embed][sparse_sign]") {
  const Embedding g(make(EmbeddingKind::sparse_sign, 12, 90, 19, 4));
  const SparseMatrix& s = g.sparse();
  REQUIRE(s.rows() == 12);
  REQUIRE(s.cols() == 90);
  for (Index j = 0; j < s.outerSize(); ++j) {
    Index nz = 0;
    for (SparseMatrix::InnerIterator it(s, j); it; ++it) {
      ++nz;
      CHECK(std::abs(std::abs(it.value()) - 0.5) <= 1e-15);
    }
    CHECK(nz == 4);
  }
  const Embedding dflt(make(EmbeddingKind::sparse_sign, 20, 50, 20));
  for (Index j = 0; j < 50; ++j) CHECK(dflt.sparse().col(j).nonZeros() == 8);
  CHECK_THROWS_AS(Embedding(make(EmbeddingKind::gaussian, 4, 9, 1)).sparse(), ParameterError);
}

TEST_CASE("sparse sign - norm preservation in expectation", "[embed][sparse_sign][montecarlo]") {
  const double mean = mean_sq_norm_e1(EmbeddingKind::sparse_sign, 20, 50, 2000);
  CHECK(std::abs(mean - 1.0) <= 0.1);
}
