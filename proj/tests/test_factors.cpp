#include <cmath>
#include <filesystem>
#include <fstream>

#include "catch_amalgamated.hpp"
#include "json.hpp"

#include "oracles.hpp"
#include "randskel/errors.hpp"
#include "randskel/factors.hpp"
#include "randskel/matrix_market.hpp"
#include "randskel/skeleton.hpp"
#include "randskel/snn.hpp"

using namespace randskel;

namespace {

IndexList random_subset(Index n, Index k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  IndexList all(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) all[static_cast<std::size_t>(i)] = i;
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(static_cast<std::size_t>(k));
  return all;
}

IndexList iota(Index k) {
  IndexList v(static_cast<std::size_t>(k));
  for (Index i = 0; i < k; ++i) v[static_cast<std::size_t>(i)] = i;
  return v;
}

Matrix coordinate_projection(Index n, Index k) {
  Matrix p = Matrix::Zero(n, n);
  p.topLeftCorner(k, k).setIdentity();
  return p;
}

SketchOptions seeded(std::uint64_t s) {
  SketchOptions o;
  o.seed = s;
  return o;
}

} // namespace

TEST_CASE("column id - identity, exact rank, dense oracle", "[factors][id]") {
  const auto id = MatrixSource::dense(Matrix::Identity(6, 6));
  CHECK((build_column_id(id, iota(2)).reconstruct() - coordinate_projection(6, 2)).cwiseAbs().maxCoeff() <= 1e-15);

  const Matrix lr = oracle::low_rank(40, 30, 5, 1);
  const auto lsrc = MatrixSource::dense(lr);
  const auto sel = rand_lupp(lsrc, 5, seeded(2));
  CHECK((lr - build_column_id(lsrc, sel.Js).reconstruct()).norm() <= 1e-8 * lr.norm());

  const Matrix a = oracle::gaussian(40, 30, 3);
  const auto src = MatrixSource::dense(a);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const IndexList js = random_subset(30, 5, s);
    const Factors f = build_column_id(src, js);
    CHECK(f.kind() == FactorKind::column_id);
    CHECK(f.component("C").cols() == 5);
    CHECK(f.component("Z").rows() == 5);
    CHECK((f.reconstruct() - oracle::column_id(a, js)).norm() <= 1e-10 * a.norm());
  }
}

TEST_CASE("column id - dependent columns are rejected", "[factors][id]") {
  Matrix a = oracle::gaussian(10, 6, 4);
  a.col(3) = 2.0 * a.col(1);
  const IndexList js{1, 3};
  CHECK_THROWS_AS(build_column_id(MatrixSource::dense(a), js), RankDeficiencyError);
  const IndexList rep{1, 1};
  CHECK_THROWS_AS(build_column_id(MatrixSource::dense(a), rep), ParameterError);
}

TEST_CASE("row id - identity, exact rank, dense oracle", "[factors][id]") {
  const auto id = MatrixSource::dense(Matrix::Identity(6, 6));
  CHECK((build_row_id(id, iota(2)).reconstruct() - coordinate_projection(6, 2)).cwiseAbs().maxCoeff() <= 1e-15);

  const Matrix lr = oracle::low_rank(40, 30, 5, 5);
  const auto lsrc = MatrixSource::dense(lr);
  const auto sel = rand_lupp(lsrc, 5, seeded(6));
  CHECK((lr - build_row_id(lsrc, sel.Is).reconstruct()).norm() <= 1e-8 * lr.norm());

  const Matrix a = oracle::gaussian(40, 30, 7);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const IndexList is = random_subset(40, 5, 10 + s);
    CHECK((build_row_id(MatrixSource::dense(a), is).reconstruct() - oracle::row_id(a, is)).norm() <= 1e-10 * a.norm());
  }
  Matrix b = a;
  b.row(4) = -b.row(2);
  const IndexList dep{2, 4};
  CHECK_THROWS_AS(build_row_id(MatrixSource::dense(b), dep), RankDeficiencyError);
}

TEST_CASE("two-sided id - identity, equality with column id, singular S", "[factors][id]") {
  const auto id = MatrixSource::dense(Matrix::Identity(7, 7));
  CHECK((build_two_sided_id(id, iota(3), iota(3)).reconstruct() - coordinate_projection(7, 3)).cwiseAbs().maxCoeff() <=
        1e-15);

  const Matrix a = oracle::gaussian(40, 30, 8);
  const auto src = MatrixSource::dense(a);
  const auto sel = rand_lupp(src, 8, seeded(9));
  const Factors t = build_two_sided_id(src, sel.Is, sel.Js);
  const Factors c = build_column_id(src, sel.Js);
  CHECK((t.reconstruct() - c.reconstruct()).norm() <= 1e-10 * a.norm());
  REQUIRE(t.skeleton_condition().has_value());
  const Vector sv = oracle::singular_values(t.component("S"));
  CHECK(std::abs(*t.skeleton_condition() - sv(0) / sv(sv.size() - 1)) <= 1e-8 * *t.skeleton_condition());

  Matrix z = oracle::gaussian(8, 8, 10);
  z(0, 0) = 0.0;
  const IndexList is{0, 1}, js{0, 2};
  z(1, 0) = 0.0;
  CHECK_THROWS_AS(build_two_sided_id(MatrixSource::dense(z), is, js), SingularMatrixError);
}

TEST_CASE("two-sided id - conditioning of S on an SNN instance", "[factors][id]") {
  SnnSpec spec;
  spec.m = spec.n = 200;
  spec.weights = snn_reference_weights(200);
  spec.seed = 1;
  const auto src = snn_generate(spec);
  const auto sel = rand_lupp(src, 20, seeded(11));
  const auto t = build_two_sided_id(src, sel.Is, sel.Js);
  const double cond = *t.skeleton_condition();
  // Reference: the best rank-20 block has condition sigma_1 / sigma_20.
  const Vector sv = oracle::singular_values(src.to_dense());
  const double ref = sv(0) / sv(19);
  WARN("cond(S) = " << cond << ", sigma_1/sigma_20 = " << ref);
  CHECK(std::isfinite(cond));
  CHECK(cond <= 100.0 * ref);
}

TEST_CASE("stable cur - identity, dense oracle, orthonormal bases", "[factors][cur]") {
  const auto id = MatrixSource::dense(Matrix::Identity(4, 4));
  CHECK((build_cur_stable(id, iota(2), iota(2)).reconstruct() - coordinate_projection(4, 2)).cwiseAbs().maxCoeff() <=
        1e-15);

  const Matrix a = oracle::low_rank(6, 5, 3, 12);
  const auto src = MatrixSource::dense(a);
  const IndexList is{0, 2, 5}, js{1, 3, 4};
  const Factors f = build_cur_stable(src, is, js);
  CHECK((f.reconstruct() - oracle::cur(a, is, js)).norm() <= 1e-9 * a.norm());
  for (const char* q : {"Q_C", "Q_R"}) {
    const Matrix& m = f.component(q);
    CHECK((m.transpose() * m - Matrix::Identity(m.cols(), m.cols())).cwiseAbs().maxCoeff() <= 1e-10);
  }
  CHECK(f.component("M").rows() == 3);
  CHECK_THROWS_AS(f.component("Z"), ParameterError);
}

TEST_CASE("stable cur - never worse than the skeleton inverse on ill-conditioned input", "[factors][cur]") {
  Vector sigma(30);
  for (Index i = 0; i < 30; ++i) sigma(i) = std::pow(10.0, -10.0 * static_cast<double>(i) / 29.0);
  const Matrix a = oracle::with_spectrum(50, 40, sigma, 13);
  const auto src = MatrixSource::dense(a);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto sel = rand_lupp(src, 20, seeded(14 + s));
    const double stable = (a - build_cur_stable(src, sel.Is, sel.Js).reconstruct()).norm();
    const double inverse = (a - build_cur_skeleton_inverse(src, sel.Is, sel.Js).reconstruct()).norm();
    CHECK(stable <= inverse + 1e-12 * a.norm());
  }
}

TEST_CASE("skeleton-inverse cur - identity, exact rank, comparison", "[factors][cur]") {
  const auto id = MatrixSource::dense(Matrix::Identity(5, 5));
  CHECK((build_cur_skeleton_inverse(id, iota(2), iota(2)).reconstruct() - coordinate_projection(5, 2))
            .cwiseAbs()
            .maxCoeff() <= 1e-15);

  const Matrix lr = oracle::low_rank(30, 25, 4, 15);
  const auto lsrc = MatrixSource::dense(lr);
  const auto sel = rand_lupp(lsrc, 4, seeded(16));
  CHECK((lr - build_cur_skeleton_inverse(lsrc, sel.Is, sel.Js).reconstruct()).norm() <= 1e-8 * lr.norm());

  Vector sigma(25);
  for (Index i = 0; i < 25; ++i) sigma(i) = std::pow(0.8, static_cast<double>(i));
  const Matrix a = oracle::with_spectrum(30, 25, sigma, 17);
  const auto src = MatrixSource::dense(a);
  const auto s2 = rand_lupp(src, 8, seeded(18));
  const double stable = (a - build_cur_stable(src, s2.Is, s2.Js).reconstruct()).norm();
  const double inverse = (a - build_cur_skeleton_inverse(src, s2.Is, s2.Js).reconstruct()).norm();
  CHECK(inverse <= 10.0 * stable);

  CHECK_THROWS_AS(build_cur_skeleton_inverse(Matrix::Ones(3, 2), Matrix::Ones(2, 2), Matrix::Ones(2, 4)),
                  SingularMatrixError);
}

TEST_CASE("streaming id - sketches reproduce interpolation coefficients", "[factors][streaming]") {
  const Matrix lr = oracle::low_rank(60, 45, 6, 19);
  const auto src = MatrixSource::dense(lr);
  const auto st = streaming_select(src, 6, seeded(20), seeded(21));
  const long passes = src.passes();
  const long apps = src.applications();
  const Factors f = estimate_id_from_sketches(st.X, st.Y, st.set.Js, st.set.Is);
  CHECK(src.passes() == passes);
  CHECK(src.applications() == apps);
  CHECK(f.kind() == FactorKind::id_streaming);

  Matrix c(60, 6), r(6, 45);
  for (Index j = 0; j < 6; ++j) c.col(j) = lr.col(st.set.Js[static_cast<std::size_t>(j)]);
  for (Index i = 0; i < 6; ++i) r.row(i) = lr.row(st.set.Is[static_cast<std::size_t>(i)]);
  const Matrix cpa = oracle::pinv(c) * lr;
  const Matrix apr = lr * oracle::pinv(r);
  CHECK((f.component("Z") - cpa).norm() <= 1e-8 * cpa.norm());
  CHECK((f.component("W") - apr).norm() <= 1e-8 * apr.norm());

  CHECK_THROWS_AS(f.reconstruct(), ParameterError);
  const Factors withc = f.with_columns(c);
  CHECK((withc.reconstruct() - lr).norm() <= 1e-8 * lr.norm());
}

TEST_CASE("streaming id - near-low-rank input", "[factors][streaming]") {
  const Matrix a = oracle::low_rank(100, 80, 20, 22) + 1e-6 * oracle::gaussian(100, 80, 23);
  const auto src = MatrixSource::dense(a);
  const auto st = streaming_select(src, 20, seeded(24), seeded(25));
  const Factors f = estimate_id_from_sketches(st.X, st.Y, st.set.Js, st.set.Is);
  Matrix c(100, 20);
  for (Index j = 0; j < 20; ++j) c.col(j) = a.col(st.set.Js[static_cast<std::size_t>(j)]);
  CHECK((f.component("Z") - oracle::pinv(c) * a).norm() <= 1e-3);
}

TEST_CASE("factors - apply agrees with reconstruction for every kind", "[factors]") {
  const Matrix a = oracle::gaussian(25, 20, 26);
  const auto src = MatrixSource::dense(a);
  const auto sel = rand_lupp(src, 6, seeded(27));
  const std::vector<Factors> all{build_column_id(src, sel.Js), build_row_id(src, sel.Is),
                                 build_two_sided_id(src, sel.Is, sel.Js), build_cur_stable(src, sel.Is, sel.Js),
                                 build_cur_skeleton_inverse(src, sel.Is, sel.Js)};
  const Matrix v = oracle::gaussian(20, 3, 28);
  const Matrix u = oracle::gaussian(25, 2, 29);
  for (const auto& f : all) {
    INFO(to_string(f.kind()));
    const Matrix rec = f.reconstruct();
    CHECK((f.apply(v) - rec * v).norm() <= 1e-10 * rec.norm() * v.norm());
    CHECK((f.apply_transpose(u) - rec.transpose() * u).norm() <= 1e-10 * rec.norm() * u.norm());
    CHECK((f.reconstruct_columns(4, 7) - rec.middleCols(4, 7)).norm() <= 1e-12 * rec.norm());
    CHECK((f.apply(Vector(v.col(0))) - rec * v.col(0)).norm() <= 1e-10 * rec.norm() * v.col(0).norm());
  }
}

TEST_CASE("evaluate error - degenerate ratio and diagonal example", "[factors][error]") {
  const Matrix lr = oracle::low_rank(30, 20, 4, 30);
  const auto lsrc = MatrixSource::dense(lr);
  const auto sel = rand_lupp(lsrc, 4, seeded(31));
  const auto rep = evaluate_error(lsrc, build_cur_stable(lsrc, sel.Is, sel.Js), 4, Norm::frobenius);
  CHECK(rep.err <= 1e-12 * lr.norm());
  CHECK(rep.opt_err <= 1e-12 * lr.norm());
  CHECK(rep.ratio == 1.0);

  Matrix d = Matrix::Zero(5, 5);
  d.diagonal() << 5, 4, 3, 2, 1;
  const auto dsrc = MatrixSource::dense(d);
  const IndexList js{0, 1};
  const auto sp = evaluate_error(dsrc, build_column_id(dsrc, js), 2, Norm::spectral);
  CHECK(std::abs(sp.opt_err - 3.0) <= 1e-14);
  CHECK(std::abs(sp.err - 3.0) <= 1e-14);
  const auto fr = evaluate_error(dsrc, build_column_id(dsrc, js), 2, Norm::frobenius);
  CHECK(std::abs(fr.opt_err - std::sqrt(14.0)) <= 1e-14);
  CHECK(std::abs(fr.ratio - 1.0) <= 1e-14);
}

TEST_CASE("evaluate error - ratio never below one", "[factors][error]") {
  const Matrix a = oracle::gaussian(30, 25, 32);
  const auto src = MatrixSource::dense(a);
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto sel = rand_cpqr(src, 5 + static_cast<Index>(s), seeded(33 + s));
    const auto f = build_cur_stable(src, sel.Is, sel.Js);
    for (Norm nm : {Norm::frobenius, Norm::spectral}) {
      const auto rep = evaluate_error(src, f, sel.rank(), nm);
      CHECK(rep.ratio >= 1.0 - 1e-9);
      const Vector sv = oracle::singular_values(a);
      CHECK(std::abs(rep.opt_err - oracle::tail(sv, sel.rank(), nm == Norm::frobenius)) <= 1e-12 * a.norm());
    }
  }
}

TEST_CASE("evaluate error - budget and supplied spectrum", "[factors][error]") {
  // 2100 x 2000 sparse diagonal: beyond the dense budget.
  SparseMatrix s(2100, 2000);
  std::vector<Triplet> t;
  Vector sigma(2000);
  for (Index i = 0; i < 2000; ++i) {
    sigma(i) = 1.0 / static_cast<double>(i + 1);
    t.emplace_back(i, i, sigma(i));
  }
  s.setFromTriplets(t.begin(), t.end());
  const auto src = MatrixSource::sparse(s);
  const IndexList js{0, 1, 2}, is{0, 1, 2};
  const Factors f = build_cur_stable(src, is, js);
  CHECK_THROWS_AS(evaluate_error(src, f, 3, Norm::frobenius), BudgetError);
  const auto fr = evaluate_error(src, f, 3, Norm::frobenius, sigma);
  CHECK(std::abs(fr.err - fr.opt_err) <= 1e-12);
  CHECK(std::abs(fr.ratio - 1.0) <= 1e-10);
  const auto sp = evaluate_error(src, f, 3, Norm::spectral, sigma);
  CHECK(sp.estimated);
  CHECK(std::abs(sp.err - 0.25) <= 1e-3 * 0.25);
  CHECK(std::abs(sp.opt_err - 0.25) <= 1e-15);
}

TEST_CASE("factors - export writes matrices and manifest", "[factors][export]") {
  const Matrix a = oracle::gaussian(12, 9, 40);
  const auto src = MatrixSource::dense(a);
  const auto sel = rand_lupp(src, 3, seeded(41));
  const Factors f = build_cur_stable(src, sel.Is, sel.Js);
  const auto dir = std::filesystem::temp_directory_path() / "randskel_export_test";
  std::filesystem::remove_all(dir);
  export_factors(f, dir);
  std::ifstream in(dir / "manifest.json");
  const auto manifest = nlohmann::json::parse(in);
  CHECK(manifest["kind"] == "cur_stable");
  CHECK(manifest["rows"] == 12);
  CHECK(manifest["cols"] == 9);
  CHECK(manifest["Js"].get<IndexList>() == sel.Js);
  CHECK(manifest["Is"].get<IndexList>() == sel.Is);
  for (const char* name : {"Q_C", "M", "Q_R"}) {
    const auto file = dir / manifest["components"][name]["file"].get<std::string>();
    CHECK(load_matrix_market(file).to_dense() == f.component(name));
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("cur - sandwich between column id and the sum of one-sided errors", "[factors][cur]") {
  Vector sigma(25);
  for (Index i = 0; i < 25; ++i) sigma(i) = 1.0 / static_cast<double>(i + 1);
  const Matrix a = oracle::with_spectrum(30, 25, sigma, 40);
  const auto src = MatrixSource::dense(a);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const IndexList is = random_subset(30, 6, 41 + s), js = random_subset(25, 6, 51 + s);
    const Matrix cca = build_column_id(src, js).reconstruct();
    const double col = (a - cca).norm();
    const double row = (a - build_row_id(src, is).reconstruct()).norm();
    const Matrix cur = build_cur_stable(src, is, js).reconstruct();
    const double both = (a - cur).norm();
    CHECK(col <= both * (1 + 1e-9));
    CHECK(both * both <= (col * col + row * row) * (1 + 1e-9));
    CHECK(std::abs(both * both - col * col - (cca - cur).squaredNorm()) <= 1e-9 * a.squaredNorm());
    CHECK(oracle::spectral(a - cca) <= oracle::spectral(a - cur) * (1 + 1e-9));
  }
}
