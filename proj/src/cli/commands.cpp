#include "randskel/cli/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>

#include "randskel/errors.hpp"
#include "randskel/linalg.hpp"
#include "randskel/random.hpp"

namespace randskel::cli {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string opt_num(const std::optional<double>& x) { return x ? num(*x) : std::string(); }

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

void check_dense_budget(const MatrixSource& a) {
  if (static_cast<double>(a.rows()) * static_cast<double>(a.cols()) > kDenseBudget)
    throw BudgetError("matrix " + std::to_string(a.rows()) + "×" + std::to_string(a.cols()) +
                      " exceeds the dense SVD budget used for optimal errors");
}

} // namespace

std::vector<ErrVsRankRow> err_vs_rank(const ExperimentConfig& cfg) {
  cfg.validate();
  const MatrixSource a = build_matrix(cfg.matrix);
  if (cfg.ranks.back() + cfg.oversample > std::min(a.rows(), a.cols()))
    throw ParameterError("ranks: largest k + oversample exceeds min(m, n)");
  check_dense_budget(a);
  const Vector sigma = singular_values(a.to_dense());

  std::vector<ErrVsRankRow> rows;
  for (const auto& alg : cfg.algorithms) {
    for (Index k : cfg.ranks) {
      for (int t = 0; t < cfg.trials; ++t) {
        SketchOptions sketch;
        sketch.kind = cfg.embedding;
        sketch.seed = trial_seed(cfg.seed, alg, k, t);
        const auto t0 = Clock::now();
        const SkeletonSet set = run_algorithm(alg, a, k, k + cfg.oversample, sketch);
        const Factors f = build_cur_stable(a, set.Is, set.Js);
        const double wall = seconds_since(t0);
        const ErrorReport rep = evaluate_error(a, f, k, cfg.norm, sigma);
        ErrVsRankRow r;
        r.algorithm = alg;
        r.k = k;
        r.trial = t;
        r.err = rep.err;
        r.opt_err = rep.opt_err;
        r.ratio = rep.ratio;
        r.wall_seconds = wall;
        if (set.eta_col) r.eta_col = set.eta_col->eta_bound;
        if (set.eta_row) r.eta_row = set.eta_row->eta_bound;
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

void write_err_vs_rank_csv(std::ostream& out, const std::vector<ErrVsRankRow>& rows) {
  out << "algorithm,k,trial,err,opt_err,ratio,wall_seconds,eta_col,eta_row\n";
  for (const auto& r : rows)
    out << r.algorithm << ',' << r.k << ',' << r.trial << ',' << num(r.err) << ',' << num(r.opt_err) << ','
        << num(r.ratio) << ',' << num(r.wall_seconds) << ',' << opt_num(r.eta_col) << ',' << opt_num(r.eta_row)
        << '\n';
}

void BenchEmbedConfig::validate() const {
  if (kinds.empty()) throw ParameterError("kinds: list is empty");
  if (ms.empty() || ls.empty()) throw ParameterError("m, l: size grids must not be empty");
  if (n < 1) throw ParameterError("n: must be positive");
  if (trials < 1) throw ParameterError("trials: must be >= 1");
  for (Index m : ms)
    if (m < 1) throw ParameterError("m: sizes must be positive");
  for (Index l : ls)
    if (l < 1) throw ParameterError("l: sizes must be positive");
}

std::vector<BenchEmbedRow> bench_embed(const BenchEmbedConfig& cfg) {
  cfg.validate();
  std::vector<BenchEmbedRow> rows;
  for (Index m : cfg.ms) {
    const Matrix a = gaussian_matrix(m, cfg.n, derive_seed(cfg.seed, 0x656d62, static_cast<std::uint64_t>(m)));
    for (Index l : cfg.ls) {
      if (l > m) throw ParameterError("l: embedding dimension " + std::to_string(l) + " exceeds m = " + std::to_string(m));
      for (EmbeddingKind kind : cfg.kinds) {
        EmbeddingSpec spec;
        spec.kind = kind;
        spec.l = l;
        spec.m = m;
        spec.seed = cfg.seed;
        if (kind == EmbeddingKind::sparse_sign && l < 2) continue;
        const Embedding emb(spec);
        std::vector<double> times;
        for (int t = 0; t < cfg.trials; ++t) {
          const auto t0 = Clock::now();
          const Matrix y = emb.apply(a);
          times.push_back(seconds_since(t0));
          if (!all_finite(y)) throw InstabilityError("bench-embed: non-finite sketch");
        }
        rows.push_back({kind, m, cfg.n, l, median(times)});
      }
    }
  }
  return rows;
}

void write_bench_embed_csv(std::ostream& out, const std::vector<BenchEmbedRow>& rows) {
  out << "kind,m,n,l,seconds\n";
  for (const auto& r : rows)
    out << to_string(r.kind) << ',' << r.m << ',' << r.n << ',' << r.l << ',' << num(r.seconds) << '\n';
}

std::string to_string(BenchPivotKind kind) {
  switch (kind) {
  case BenchPivotKind::lupp: return "lupp";
  case BenchPivotKind::cpqr: return "cpqr";
  case BenchPivotKind::deim: return "deim";
  }
  return "unknown";
}

BenchPivotKind parse_bench_pivot_kind(const std::string& text) {
  if (text == "lupp") return BenchPivotKind::lupp;
  if (text == "cpqr") return BenchPivotKind::cpqr;
  if (text == "deim") return BenchPivotKind::deim;
  throw ParameterError("kinds: expected lupp, cpqr or deim, got '" + text + "'");
}

void BenchPivotConfig::validate() const {
  if (kinds.empty()) throw ParameterError("kinds: list is empty");
  if (ls.empty()) throw ParameterError("l: size grid must not be empty");
  if (n_factor < 1) throw ParameterError("n_factor: must be >= 1");
  if (trials < 1) throw ParameterError("trials: must be >= 1");
  for (Index l : ls)
    if (l < 1) throw ParameterError("l: sizes must be positive");
}

IndexList bench_pivot_run(BenchPivotKind kind, const Matrix& sketch) {
  switch (kind) {
  case BenchPivotKind::lupp: return lupp_columns(sketch).pivots;
  case BenchPivotKind::cpqr: return cpqr_columns(sketch).pivots;
  case BenchPivotKind::deim: {
    const Matrix q = thin_qr(sketch.transpose(), "deim orthogonalization").q;
    return lupp_columns(q.transpose()).pivots;
  }
  }
  return {};
}

std::vector<BenchPivotRow> bench_pivot(const BenchPivotConfig& cfg) {
  cfg.validate();
  std::vector<BenchPivotRow> rows;
  for (Index l : cfg.ls) {
    const Index n = cfg.n_factor * l;
    const Matrix x = gaussian_matrix(l, n, derive_seed(cfg.seed, 0x707674, static_cast<std::uint64_t>(l)));
    for (BenchPivotKind kind : cfg.kinds) {
      std::vector<double> times;
      IndexList piv;
      for (int t = 0; t < cfg.trials; ++t) {
        const auto t0 = Clock::now();
        piv = bench_pivot_run(kind, x);
        times.push_back(seconds_since(t0));
      }
      rows.push_back({kind, l, n, median(times), std::move(piv)});
    }
  }
  return rows;
}

void write_bench_pivot_csv(std::ostream& out, const std::vector<BenchPivotRow>& rows) {
  out << "kind,l,n,seconds\n";
  for (const auto& r : rows) out << to_string(r.kind) << ',' << r.l << ',' << r.n << ',' << num(r.seconds) << '\n';
}

FactorKind parse_factor_kind(const std::string& text) {
  if (text == "column_id") return FactorKind::column_id;
  if (text == "row_id") return FactorKind::row_id;
  if (text == "two_sided_id") return FactorKind::two_sided_id;
  if (text == "cur_stable" || text == "cur") return FactorKind::cur_stable;
  if (text == "cur_skeleton_inverse") return FactorKind::cur_skeleton_inverse;
  throw ParameterError("factors: expected column_id, row_id, two_sided_id, cur_stable or cur_skeleton_inverse, got '" +
                       text + "'");
}

void SelectionConfig::validate() const {
  if (!is_algorithm(algorithm)) throw ParameterError("algorithm: unknown algorithm '" + algorithm + "'");
  if (k < 1) throw ParameterError("k: must be positive");
  if (oversample < 0) throw ParameterError("oversample: must be >= 0");
}

SelectionConfig selection_from_config(const KeyValueConfig& cfg) {
  SelectionConfig s;
  s.matrix = matrix_from_config(cfg.section("matrix"));
  s.algorithm = cfg.get_string("algorithm", s.algorithm);
  s.k = static_cast<Index>(cfg.get_int("k", s.k));
  s.oversample = static_cast<Index>(cfg.get_int("oversample", 0));
  s.embedding = parse_embedding_kind(cfg.get_string("embedding", "gaussian"));
  s.seed = cfg.get_uint64("seed", 0);
  s.norm = parse_norm(cfg.get_string("norm", "fro"));
  s.factors = parse_factor_kind(cfg.get_string("factors", "cur_stable"));
  return s;
}

Factors build_factors(FactorKind kind, const MatrixSource& a, const SkeletonSet& set) {
  switch (kind) {
  case FactorKind::column_id: return build_column_id(a, set.Js);
  case FactorKind::row_id: return build_row_id(a, set.Is);
  case FactorKind::two_sided_id: return build_two_sided_id(a, set.Is, set.Js);
  case FactorKind::cur_stable: return build_cur_stable(a, set.Is, set.Js);
  case FactorKind::cur_skeleton_inverse: return build_cur_skeleton_inverse(a, set.Is, set.Js);
  case FactorKind::id_streaming: break;
  }
  throw ParameterError("factors: streaming estimates are not built from a skeleton set");
}

SelectionResult run_selection(const SelectionConfig& cfg, bool with_factors) {
  cfg.validate();
  const MatrixSource a = build_matrix(cfg.matrix);
  const Index l = cfg.k + cfg.oversample;
  if (l > std::min(a.rows(), a.cols())) throw ParameterError("k: k + oversample exceeds min(m, n)");
  SketchOptions sketch;
  sketch.kind = cfg.embedding;
  sketch.seed = cfg.seed;
  SelectionResult r;
  r.set = run_algorithm(cfg.algorithm, a, cfg.k, l, sketch);
  r.set.seed = cfg.seed;
  if (with_factors) {
    r.factors = build_factors(cfg.factors, a, r.set);
    if (static_cast<double>(a.rows()) * static_cast<double>(a.cols()) <= kDenseBudget)
      r.error = evaluate_error(a, *r.factors, cfg.k, cfg.norm);
  }
  return r;
}

void print_selection(std::ostream& out, const SelectionResult& r) {
  out << "algorithm: " << r.set.algorithm << "\nseed: " << r.set.seed << "\nskeletons: " << r.set.Js.size()
      << " columns, " << r.set.Is.size() << " rows\n";
  out << "eta_col: " << (r.set.eta_col ? num(r.set.eta_col->eta_bound) : "n/a") << '\n';
  out << "eta_row: " << (r.set.eta_row ? num(r.set.eta_row->eta_bound) : "n/a") << '\n';
  if (r.factors) {
    out << "factors: " << to_string(r.factors->kind()) << '\n';
    if (auto c = r.factors->skeleton_condition()) out << "cond(S): " << num(*c) << '\n';
  }
  if (r.error)
    out << "err: " << num(r.error->err) << "\nopt_err: " << num(r.error->opt_err) << "\nratio: " << num(r.error->ratio)
        << '\n';
}

} // namespace randskel::cli
