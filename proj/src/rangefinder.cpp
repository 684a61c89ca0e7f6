#include "randskel/rangefinder.hpp"

#include <string>

#include "randskel/errors.hpp"
#include "randskel/linalg.hpp"

namespace randskel {
namespace {

void check_power_args(const MatrixSource& a, const EmbeddingSpec& spec, int q) {
  if (q < 1)
    throw ParameterError("power iteration count must be >= 1");
  if (spec.m != a.cols())
    throw DimensionError("power iteration embedding must act on R^n (n = " + std::to_string(a.cols()) + ")");
}

void require_finite(const Matrix& m, const std::string& stage) {
  if (!m.allFinite())
    throw InstabilityError(stage +
                           ": non-finite entries in plain power iteration; use the orthogonalized variant");
}

} // namespace

std::string to_string(RowSpaceProvenance p) {
  switch (p) {
  case RowSpaceProvenance::sketch:
    return "sketch";
  case RowSpaceProvenance::plain_power:
    return "plain_power";
  case RowSpaceProvenance::orthogonalized_power:
    return "orthogonalized_power";
  case RowSpaceProvenance::rsvd:
    return "rsvd";
  }
  return "unknown";
}

void require_full_row_rank(const Matrix& x, const std::string& stage, double rel_tol) {
  if (!x.allFinite())
    throw InstabilityError(stage + ": non-finite entries");
  Vector s = singular_values(x);
  if (s.size() < x.rows() || !(s(s.size() - 1) > rel_tol * s(0)))
    throw RankDeficiencyError(stage, 0,
                              "row space approximator is numerically rank deficient; use a smaller l");
}

RowSpaceApproximator row_sketch_rangefinder(const MatrixSource& a, const EmbeddingSpec& spec) {
  if (spec.l > std::min(a.rows(), a.cols()))
    throw ParameterError("row sketch needs l <= min(m, n)");
  RowSpaceApproximator out;
  out.X = sketch(spec, a, SketchSide::row);
  out.provenance = RowSpaceProvenance::sketch;
  out.seed = spec.seed;
  require_full_row_rank(out.X, "row sketch");
  return out;
}

RowSpaceApproximator plain_power_iteration(const MatrixSource& a, const EmbeddingSpec& spec, int q) {
  check_power_args(a, spec, q);
  // X^T = (A^T A)^q Omega^T, starting from Y = A Omega^T.
  Matrix y = sketch(spec, a, SketchSide::col);
  require_finite(y, "plain power iteration");
  Matrix xt = a.apply_transpose(y);
  require_finite(xt, "plain power iteration");
  for (int i = 1; i < q; ++i) {
    y = a.apply(xt);
    require_finite(y, "plain power iteration");
    xt = a.apply_transpose(y);
    require_finite(xt, "plain power iteration");
  }
  RowSpaceApproximator out;
  out.X = xt.transpose();
  out.provenance = RowSpaceProvenance::plain_power;
  out.power_iterations = q;
  out.seed = spec.seed;
  return out;
}

RowSpaceApproximator orthogonalized_power_iteration(const MatrixSource& a, const EmbeddingSpec& spec,
                                                    int q) {
  check_power_args(a, spec, q);
  Matrix y = sketch(spec, a, SketchSide::col);
  for (int i = 2; i <= q; ++i) {
    Matrix z = thin_qr(a.apply_transpose(y), "orthogonalized power iteration").q;
    y = thin_qr(a.apply(z), "orthogonalized power iteration").q;
  }
  Matrix qy = thin_qr(y, "orthogonalized power iteration").q;
  RowSpaceApproximator out;
  out.X = a.apply_transpose(qy).transpose();
  out.provenance = RowSpaceProvenance::orthogonalized_power;
  out.power_iterations = q;
  out.seed = spec.seed;
  return out;
}

SpectralData randomized_svd(const MatrixSource& a, const RowSpaceApproximator& x) {
  if (x.X.cols() != a.cols())
    throw DimensionError("randomized_svd: approximator has the wrong number of columns");
  require_full_row_rank(x.X, "randomized SVD");
  Matrix qx = thin_qr(x.X.transpose(), "randomized SVD").q;  // n×l
  Matrix aq = a.apply(qx);                                   // m×l
  Eigen::BDCSVD<Matrix> svd(aq, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SpectralData sd;
  sd.U = svd.matrixU();
  sd.sigma = svd.singularValues();
  sd.V = qx * svd.matrixV();
  return sd;
}

SpectralData randomized_svd(const MatrixSource& a, const EmbeddingSpec& spec) {
  return randomized_svd(a, row_sketch_rangefinder(a, spec));
}

Vector leverage_scores(const SpectralData& sd, Index k) {
  if (k < 1 || k > sd.V.cols())
    throw ParameterError("leverage_scores: need 1 <= k <= l");
  return sd.V.leftCols(k).rowwise().squaredNorm();
}

Vector row_leverage_scores(const SpectralData& sd, Index k) {
  if (k < 1 || k > sd.U.cols())
    throw ParameterError("row_leverage_scores: need 1 <= k <= l");
  return sd.U.leftCols(k).rowwise().squaredNorm();
}

double rangefinder_error(const Matrix& a, const Matrix& x, Norm norm) {
  if (x.cols() != a.cols())
    throw DimensionError("rangefinder_error: column count mismatch");
  // Householder Q spans the (numerical) row space even when X is ill conditioned.
  Eigen::HouseholderQR<Matrix> qr(x.transpose());
  Matrix q = qr.householderQ() * Matrix::Identity(x.cols(), std::min(x.rows(), x.cols()));
  Matrix residual = a - (a * q) * q.transpose();
  return norm == Norm::frobenius ? residual.norm() : spectral_norm(residual);
}

} // namespace randskel
