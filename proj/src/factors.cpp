#include "randskel/factors.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include <Eigen/LU>

#include "json.hpp"
#include "randskel/errors.hpp"
#include "randskel/linalg.hpp"
#include "randskel/matrix_market.hpp"

namespace randskel {

namespace {

struct Chain {
  const Matrix* left = nullptr;
  const Matrix* middle = nullptr;  // null: identity
  const Matrix* right = nullptr;
  bool right_transposed = false;   // right stored as its transpose (Q_R)
};

// C^+ B through a thin Householder QR of C.
Matrix least_squares(const ThinQR& qr, const Matrix& qt_b) {
  return qr.r.triangularView<Eigen::Upper>().solve(qt_b);
}

void check_indices(std::span<const Index> idx, Index bound, const char* what) {
  std::vector<char> seen(static_cast<std::size_t>(bound), 0);
  for (Index i : idx) {
    if (i < 0 || i >= bound)
      throw ParameterError(std::string(what) + " index " + std::to_string(i) + " out of range");
    if (seen[static_cast<std::size_t>(i)]) throw ParameterError(std::string(what) + " index " + std::to_string(i) + " repeated");
    seen[static_cast<std::size_t>(i)] = 1;
  }
  if (idx.empty()) throw ParameterError(std::string(what) + " skeleton is empty");
}

Eigen::PartialPivLU<Matrix> checked_lu(const Matrix& s, const char* stage) {
  if (s.rows() != s.cols()) throw DimensionError(std::string(stage) + ": S must be square");
  Eigen::PartialPivLU<Matrix> lu(s);
  const double rc = lu.rcond();
  if (!(rc > std::numeric_limits<double>::epsilon()))
    throw SingularMatrixError(std::string(stage) + ": S is singular (rcond " + std::to_string(rc) + ")");
  return lu;
}

IndexList to_list(std::span<const Index> s) { return IndexList(s.begin(), s.end()); }

} // namespace

std::string to_string(FactorKind kind) {
  switch (kind) {
  case FactorKind::column_id: return "column_id";
  case FactorKind::row_id: return "row_id";
  case FactorKind::two_sided_id: return "two_sided_id";
  case FactorKind::cur_stable: return "cur_stable";
  case FactorKind::cur_skeleton_inverse: return "cur_skeleton_inverse";
  case FactorKind::id_streaming: return "id_streaming";
  }
  return "unknown";
}

Factors::Factors(FactorKind kind, Index rows, Index cols, IndexList is, IndexList js,
                 std::map<std::string, Matrix> parts)
    : kind_(kind), rows_(rows), cols_(cols), is_(std::move(is)), js_(std::move(js)), parts_(std::move(parts)) {}

Index Factors::rank() const noexcept { return static_cast<Index>(std::max(is_.size(), js_.size())); }

bool Factors::has(const std::string& name) const { return parts_.count(name) != 0; }

const Matrix& Factors::component(const std::string& name) const {
  auto it = parts_.find(name);
  if (it == parts_.end())
    throw ParameterError("factors of kind " + to_string(kind_) + " have no component '" + name + "'");
  return it->second;
}

namespace {

Chain chain_of(const Factors& f) {
  Chain c;
  switch (f.kind()) {
  case FactorKind::column_id:
    c.left = &f.component("C");
    c.right = &f.component("Z");
    break;
  case FactorKind::row_id:
    c.left = &f.component("W");
    c.right = &f.component("R");
    break;
  case FactorKind::two_sided_id:
    c.left = &f.component("CSinv");
    c.middle = &f.component("S");
    c.right = &f.component("Z");
    break;
  case FactorKind::cur_stable:
    c.left = &f.component("Q_C");
    c.middle = &f.component("M");
    c.right = &f.component("Q_R");
    c.right_transposed = true;
    break;
  case FactorKind::cur_skeleton_inverse:
    c.left = &f.component("C");
    c.middle = &f.component("Sinv");
    c.right = &f.component("R");
    break;
  case FactorKind::id_streaming:
    if (!f.has("C")) throw ParameterError("streaming ID estimate has no columns attached; call with_columns first");
    c.left = &f.component("C");
    c.right = &f.component("Z");
    break;
  }
  return c;
}

} // namespace

Matrix Factors::product_cols(Index first, Index count) const {
  const Chain c = chain_of(*this);
  Matrix r = c.right_transposed ? Matrix(c.right->middleRows(first, count).transpose())
                                : Matrix(c.right->middleCols(first, count));
  if (c.middle) r = (*c.middle) * r;
  return (*c.left) * r;
}

Matrix Factors::reconstruct() const { return product_cols(0, cols_); }

Matrix Factors::reconstruct_columns(Index first, Index count) const {
  if (first < 0 || count < 0 || first + count > cols_) throw DimensionError("reconstruct_columns: range out of bounds");
  return product_cols(first, count);
}

Matrix Factors::apply(const Matrix& v) const {
  if (v.rows() != cols_) throw DimensionError("Factors::apply: operand has wrong row count");
  const Chain c = chain_of(*this);
  Matrix r = c.right_transposed ? Matrix(c.right->transpose() * v) : Matrix((*c.right) * v);
  if (c.middle) r = (*c.middle) * r;
  return (*c.left) * r;
}

Vector Factors::apply(const Vector& v) const { return apply(Matrix(v)).col(0); }

Matrix Factors::apply_transpose(const Matrix& v) const {
  if (v.rows() != rows_) throw DimensionError("Factors::apply_transpose: operand has wrong row count");
  const Chain c = chain_of(*this);
  Matrix r = c.left->transpose() * v;
  if (c.middle) r = c.middle->transpose() * r;
  return c.right_transposed ? Matrix((*c.right) * r) : Matrix(c.right->transpose() * r);
}

std::optional<double> Factors::skeleton_condition() const {
  if (!has("S")) return std::nullopt;
  const Vector s = singular_values(component("S"));
  if (s.size() == 0) return std::nullopt;
  const double lo = s(s.size() - 1);
  return lo > 0.0 ? s(0) / lo : std::numeric_limits<double>::infinity();
}

Factors Factors::with_columns(Matrix c) const {
  if (kind_ != FactorKind::id_streaming) throw ParameterError("with_columns applies to streaming ID estimates only");
  if (c.rows() != rows_ || c.cols() != static_cast<Index>(js_.size()))
    throw DimensionError("with_columns: C must be m × |Js|");
  auto parts = parts_;
  parts["C"] = std::move(c);
  return Factors(kind_, rows_, cols_, is_, js_, std::move(parts));
}

Factors build_column_id(const MatrixSource& a, std::span<const Index> js) {
  check_indices(js, a.cols(), "column");
  Matrix c = a.columns(js);
  const ThinQR qr = thin_qr(c, "column ID", 1e-12);
  Matrix z = least_squares(qr, a.apply_transpose(qr.q).transpose());
  return Factors(FactorKind::column_id, a.rows(), a.cols(), {}, to_list(js), {{"C", std::move(c)}, {"Z", std::move(z)}});
}

Factors build_row_id(const MatrixSource& a, std::span<const Index> is) {
  check_indices(is, a.rows(), "row");
  Matrix r = a.rows(is);
  const ThinQR qr = thin_qr(r.transpose(), "row ID", 1e-12);
  // A R^+ = A Q T^{-T}
  const Matrix aq = a.apply(qr.q);
  Matrix w = qr.r.triangularView<Eigen::Upper>().solve(aq.transpose()).transpose();
  return Factors(FactorKind::row_id, a.rows(), a.cols(), to_list(is), {}, {{"W", std::move(w)}, {"R", std::move(r)}});
}

Factors build_two_sided_id(const MatrixSource& a, std::span<const Index> is, std::span<const Index> js) {
  check_indices(is, a.rows(), "row");
  check_indices(js, a.cols(), "column");
  if (is.size() != js.size()) throw DimensionError("two-sided ID needs |Is| == |Js|");
  const Matrix c = a.columns(js);
  Matrix s = gather_rows(c, is);
  // (C S^{-1})^T = S^{-T} C^T
  const auto lu = checked_lu(s.transpose(), "two-sided ID");
  Matrix csinv = lu.solve(c.transpose()).transpose();
  const ThinQR qr = thin_qr(c, "two-sided ID", 1e-12);
  Matrix z = least_squares(qr, a.apply_transpose(qr.q).transpose());
  return Factors(FactorKind::two_sided_id, a.rows(), a.cols(), to_list(is), to_list(js),
                 {{"CSinv", std::move(csinv)}, {"S", std::move(s)}, {"Z", std::move(z)}});
}

Factors build_cur_stable(const MatrixSource& a, std::span<const Index> is, std::span<const Index> js) {
  check_indices(is, a.rows(), "row");
  check_indices(js, a.cols(), "column");
  const ThinQR qc = thin_qr(a.columns(js), "stable CUR (C)", 1e-12);
  const ThinQR qr = thin_qr(a.rows(is).transpose(), "stable CUR (R)", 1e-12);
  Matrix m = qc.q.transpose() * a.apply(qr.q);
  return Factors(FactorKind::cur_stable, a.rows(), a.cols(), to_list(is), to_list(js),
                 {{"Q_C", qc.q}, {"M", std::move(m)}, {"Q_R", qr.q}});
}

Factors build_cur_skeleton_inverse(const Matrix& c, const Matrix& s, const Matrix& r) {
  if (c.cols() != s.rows() || s.cols() != r.rows()) throw DimensionError("C S^{-1} R: inconsistent shapes");
  const auto lu = checked_lu(s, "skeleton-inverse CUR");
  Matrix sinv = lu.inverse();
  return Factors(FactorKind::cur_skeleton_inverse, c.rows(), r.cols(), {}, {},
                 {{"C", c}, {"S", s}, {"R", r}, {"Sinv", std::move(sinv)}});
}

Factors build_cur_skeleton_inverse(const MatrixSource& a, std::span<const Index> is, std::span<const Index> js) {
  check_indices(is, a.rows(), "row");
  check_indices(js, a.cols(), "column");
  const Matrix c = a.columns(js);
  const Matrix s = gather_rows(c, is);
  const Matrix r = a.rows(is);
  const Factors f = build_cur_skeleton_inverse(c, s, r);
  return Factors(f.kind(), f.rows(), f.cols(), to_list(is), to_list(js), f.components());
}

Factors estimate_id_from_sketches(const Matrix& x, const Matrix& y, std::span<const Index> js,
                                  std::span<const Index> is) {
  check_indices(js, x.cols(), "column");
  check_indices(is, y.rows(), "row");
  std::map<std::string, Matrix> parts;
  {
    const ThinQR qr = thin_qr(gather_columns(x, js), "streaming ID (X1)", 1e-12);
    parts["Z"] = least_squares(qr, qr.q.transpose() * x);
  }
  {
    // Y Y1^+ = (Y1^T)^+ Y^T transposed
    const ThinQR qr = thin_qr(gather_rows(y, is).transpose(), "streaming ID (Y1)", 1e-12);
    parts["W"] = least_squares(qr, qr.q.transpose() * y.transpose()).transpose();
  }
  return Factors(FactorKind::id_streaming, y.rows(), x.cols(), to_list(is), to_list(js), std::move(parts));
}

ErrorReport evaluate_error(const MatrixSource& a, const Factors& f, Index k, Norm norm,
                           const std::optional<Vector>& spectrum) {
  if (f.rows() != a.rows() || f.cols() != a.cols()) throw DimensionError("evaluate_error: factor shape differs from A");
  if (k < 0) throw ParameterError("evaluate_error: k must be non-negative");
  const double entries = static_cast<double>(a.rows()) * static_cast<double>(a.cols());
  ErrorReport rep;
  double norm_a = 0.0;

  if (entries <= kDenseBudget) {
    const Matrix d = a.to_dense();
    const Matrix res = d - f.reconstruct();
    norm_a = d.norm();
    rep.err = norm == Norm::frobenius ? res.norm() : spectral_norm(res);
    rep.opt_err = tail_norm(spectrum ? *spectrum : singular_values(d), k, norm);
  } else {
    if (!spectrum)
      throw BudgetError("evaluate_error: " + std::to_string(a.rows()) + "×" + std::to_string(a.cols()) +
                        " exceeds the dense SVD budget and no spectrum was supplied");
    rep.opt_err = tail_norm(*spectrum, k, norm);
    if (norm == Norm::frobenius) {
      const Index width = std::max<Index>(1, static_cast<Index>(kDenseBudget / static_cast<double>(a.rows()) / 4));
      double sq = 0.0, sq_a = 0.0;
      for (Index first = 0; first < a.cols(); first += width) {
        const Index count = std::min(width, a.cols() - first);
        const Matrix block = a.column_block(first, count);
        sq_a += block.squaredNorm();
        sq += (block - f.reconstruct_columns(first, count)).squaredNorm();
      }
      rep.err = std::sqrt(sq);
      norm_a = std::sqrt(sq_a);
    } else {
      auto est = spectral_norm_estimate(
          a.rows(), a.cols(), [&](const Vector& v) -> Vector { return a.apply(v) - f.apply(v); },
          [&](const Vector& v) -> Vector { return a.apply_transpose(v) - Vector(f.apply_transpose(Matrix(v)).col(0)); },
          1e-4, 300, 0x6572726fULL);
      rep.err = est.value;
      rep.estimated = true;
      norm_a = spectrum->norm();
    }
  }

  const double tiny = 1e-12 * norm_a;
  if (rep.opt_err <= tiny && rep.err <= tiny)
    rep.ratio = 1.0;
  else if (rep.opt_err == 0.0)
    rep.ratio = std::numeric_limits<double>::infinity();
  else
    rep.ratio = rep.err / rep.opt_err;
  return rep;
}

void export_factors(const Factors& f, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  nlohmann::json manifest;
  manifest["kind"] = to_string(f.kind());
  manifest["rows"] = f.rows();
  manifest["cols"] = f.cols();
  manifest["Is"] = f.Is();
  manifest["Js"] = f.Js();
  nlohmann::json files = nlohmann::json::object();
  for (const auto& [name, m] : f.components()) {
    const std::string file = name + ".mtx";
    std::ofstream out(dir / file);
    if (!out) throw Error("cannot write " + (dir / file).string());
    write_matrix_market(out, m);
    files[name] = {{"file", file}, {"rows", m.rows()}, {"cols", m.cols()}};
  }
  manifest["components"] = files;
  std::ofstream out(dir / "manifest.json");
  if (!out) throw Error("cannot write " + (dir / "manifest.json").string());
  out << manifest.dump(2) << '\n';
}

} // namespace randskel
