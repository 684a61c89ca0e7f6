#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>

#include "randskel/matsource.hpp"
#include "randskel/types.hpp"

namespace randskel {

enum class FactorKind { column_id, row_id, two_sided_id, cur_stable, cur_skeleton_inverse, id_streaming };

std::string to_string(FactorKind kind);

/// Low-rank factorization A ≈ left * middle * right, with the pieces kept
/// under their usual names:
///   column_id             C, Z             A ≈ C Z
///   row_id                W, R             A ≈ W R
///   two_sided_id          CSinv, S, Z      A ≈ (C S^{-1}) S (C^+ A)
///   cur_stable            Q_C, M, Q_R      A ≈ Q_C M Q_R^T
///   cur_skeleton_inverse  C, S, R, Sinv    A ≈ C S^{-1} R
///   id_streaming          Z, W (+ C)       C^+ A ≈ X1^+ X, A R^+ ≈ Y Y1^+
/// Immutable after construction.
class Factors {
public:
  FactorKind kind() const noexcept { return kind_; }
  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  const IndexList& Is() const noexcept { return is_; }
  const IndexList& Js() const noexcept { return js_; }
  Index rank() const noexcept;

  bool has(const std::string& name) const;
  /// Throws ParameterError for a name the kind does not carry.
  const Matrix& component(const std::string& name) const;
  const std::map<std::string, Matrix>& components() const noexcept { return parts_; }

  Matrix reconstruct() const;
  /// Columns first : first+count of the reconstruction.
  Matrix reconstruct_columns(Index first, Index count) const;
  Matrix apply(const Matrix& v) const;
  Vector apply(const Vector& v) const;
  Matrix apply_transpose(const Matrix& v) const;

  /// 2-norm condition number of S where the kind stores one.
  std::optional<double> skeleton_condition() const;

  /// id_streaming only: attaches C = A(:, Js) so the estimate C Z can be
  /// reconstructed.
  Factors with_columns(Matrix c) const;

  Factors(FactorKind kind, Index rows, Index cols, IndexList is, IndexList js, std::map<std::string, Matrix> parts);

private:
  // Evaluates left * middle * right * B (B null means the identity) for
  // right-hand sides restricted to columns [first, first+count).
  Matrix product_cols(Index first, Index count) const;

  FactorKind kind_;
  Index rows_ = 0;
  Index cols_ = 0;
  IndexList is_;
  IndexList js_;
  std::map<std::string, Matrix> parts_;
};

/// C C^+ A, with Z = C^+ A from a Householder least-squares solve.
Factors build_column_id(const MatrixSource& a, std::span<const Index> js);
/// A R^+ R.
Factors build_row_id(const MatrixSource& a, std::span<const Index> is);
/// Same reconstruction as the column ID; C S^{-1} and C^+ A by solves.
Factors build_two_sided_id(const MatrixSource& a, std::span<const Index> is, std::span<const Index> js);
/// Q_C (Q_C^T A Q_R) Q_R^T from unpivoted QR of C and R^T.
Factors build_cur_stable(const MatrixSource& a, std::span<const Index> is, std::span<const Index> js);
/// C S^{-1} R with an explicit inverse of S.
Factors build_cur_skeleton_inverse(const Matrix& c, const Matrix& s, const Matrix& r);
Factors build_cur_skeleton_inverse(const MatrixSource& a, std::span<const Index> is, std::span<const Index> js);
/// Interpolation coefficients from the sketches alone; A is never touched.
Factors estimate_id_from_sketches(const Matrix& x, const Matrix& y, std::span<const Index> js,
                                  std::span<const Index> is);

struct ErrorReport {
  double err = 0.0;
  double opt_err = 0.0;
  double ratio = 1.0;
  bool estimated = false;  ///< err came from power iteration (tolerance 1e-4)
};

/// Entry budget (m*n) for dense residuals and SVDs.
inline constexpr double kDenseBudget = 4.0e6;

/// err = ||A - F||, opt_err = ||A - A_k|| from a dense SVD or the supplied
/// spectrum, ratio = err / opt_err. When opt_err and err are both at most
/// 1e-12 ||A||_F the ratio is reported as 1.
ErrorReport evaluate_error(const MatrixSource& a, const Factors& f, Index k, Norm norm,
                           const std::optional<Vector>& spectrum = std::nullopt);

/// Writes one .mtx file per component plus manifest.json.
void export_factors(const Factors& f, const std::filesystem::path& dir);

} // namespace randskel
