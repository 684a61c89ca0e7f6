#include "randskel/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "randskel/errors.hpp"

namespace randskel {

ThinQR thin_qr(const Matrix& M, std::string_view stage, double rank_tol) {
  const Index d = M.rows();
  const Index l = M.cols();
  if (l > d)
    throw DimensionError(std::string(stage) + ": QR needs rows >= cols, got " + std::to_string(d) +
                         "x" + std::to_string(l));
  Eigen::HouseholderQR<Matrix> qr(M);
  Matrix q = qr.householderQ() * Matrix::Identity(d, l);
  Matrix r = qr.matrixQR().topRows(l).triangularView<Eigen::Upper>();

  double rmax = 0.0;
  for (Index i = 0; i < l; ++i)
    rmax = std::max(rmax, std::abs(r(i, i)));
  for (Index i = 0; i < l; ++i) {
    if (!(std::abs(r(i, i)) > rank_tol * rmax))
      throw RankDeficiencyError(std::string(stage), i + 1,
                                "column " + std::to_string(i + 1) + " is numerically dependent");
    if (r(i, i) < 0.0) {
      r.row(i) *= -1.0;
      q.col(i) *= -1.0;
    }
  }
  return {std::move(q), std::move(r)};
}

Matrix ortho(const Matrix& M, double rank_tol) { return thin_qr(M, "ortho", rank_tol).q; }

Matrix gather_columns(const Matrix& M, std::span<const Index> cols) {
  Matrix out(M.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    out.col(static_cast<Index>(j)) = M.col(cols[j]);
  return out;
}

Matrix gather_rows(const Matrix& M, std::span<const Index> rows) {
  Matrix out(static_cast<Index>(rows.size()), M.cols());
  for (std::size_t i = 0; i < rows.size(); ++i)
    out.row(static_cast<Index>(i)) = M.row(rows[i]);
  return out;
}

Vector singular_values(const Matrix& M) {
  if (M.size() == 0)
    return Vector{};
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues();
}

double spectral_norm(const Matrix& M) {
  if (M.size() == 0)
    return 0.0;
  return singular_values(M)(0);
}

NormEstimate spectral_norm_estimate(Index rows, Index cols,
                                    const std::function<Vector(const Vector&)>& apply,
                                    const std::function<Vector(const Vector&)>& apply_transpose,
                                    double rel_tol, int max_iterations, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> normal;
  Vector x(cols);
  for (Index i = 0; i < cols; ++i)
    x(i) = normal(gen);
  x.normalize();
  (void)rows;

  double estimate = 0.0;
  for (int it = 1; it <= max_iterations; ++it) {
    Vector y = apply(x);
    const double ny = y.norm();
    if (ny == 0.0)
      return {0.0, it, true};
    Vector z = apply_transpose(y / ny);
    const double next = z.norm();
    if (next == 0.0)
      return {ny, it, true};
    x = z / next;
    if (it > 1 && std::abs(next - estimate) <= rel_tol * next)
      return {next, it, true};
    estimate = next;
  }
  return {estimate, max_iterations, false};
}

double tail_norm(const Vector& sigma, Index k, Norm norm) {
  if (k >= sigma.size())
    return 0.0;
  if (norm == Norm::spectral)
    return sigma(k);
  return sigma.tail(sigma.size() - k).norm();
}

bool all_finite(const Matrix& M) { return M.allFinite(); }

} // namespace randskel
