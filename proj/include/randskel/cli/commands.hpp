#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "randskel/cli/experiment.hpp"
#include "randskel/factors.hpp"
#include "randskel/pivot.hpp"

namespace randskel::cli {

struct ErrVsRankRow {
  std::string algorithm;
  Index k = 0;
  int trial = 0;
  double err = 0.0;
  double opt_err = 0.0;
  double ratio = 0.0;
  double wall_seconds = 0.0;
  std::optional<double> eta_col;
  std::optional<double> eta_row;
};

/// Stable CUR error of every (algorithm, k, trial) against the truncated SVD.
std::vector<ErrVsRankRow> err_vs_rank(const ExperimentConfig& cfg);
void write_err_vs_rank_csv(std::ostream& out, const std::vector<ErrVsRankRow>& rows);

struct BenchEmbedConfig {
  std::vector<EmbeddingKind> kinds{EmbeddingKind::gaussian, EmbeddingKind::srtt, EmbeddingKind::sparse_sign};
  std::vector<Index> ms{1000};
  Index n = 100;
  std::vector<Index> ls{50};
  int trials = 3;
  std::uint64_t seed = 0;
  void validate() const;
};

struct BenchEmbedRow {
  EmbeddingKind kind;
  Index m = 0, n = 0, l = 0;
  double seconds = 0.0;  ///< median over trials
};

std::vector<BenchEmbedRow> bench_embed(const BenchEmbedConfig& cfg);
void write_bench_embed_csv(std::ostream& out, const std::vector<BenchEmbedRow>& rows);

/// Pivot timing kinds: lupp, cpqr, and deim (orthogonalize the sketch's row
/// space, then LUPP).
enum class BenchPivotKind { lupp, cpqr, deim };
std::string to_string(BenchPivotKind kind);
BenchPivotKind parse_bench_pivot_kind(const std::string& text);

struct BenchPivotConfig {
  std::vector<BenchPivotKind> kinds{BenchPivotKind::lupp, BenchPivotKind::cpqr, BenchPivotKind::deim};
  std::vector<Index> ls{100};
  Index n_factor = 10;  ///< n = n_factor * l
  int trials = 3;
  std::uint64_t seed = 0;
  void validate() const;
};

struct BenchPivotRow {
  BenchPivotKind kind;
  Index l = 0, n = 0;
  double seconds = 0.0;
  IndexList pivots;  ///< from the last timed run
};

/// Sketches are generated once per size and shared by every kind and trial.
std::vector<BenchPivotRow> bench_pivot(const BenchPivotConfig& cfg);
void write_bench_pivot_csv(std::ostream& out, const std::vector<BenchPivotRow>& rows);
IndexList bench_pivot_run(BenchPivotKind kind, const Matrix& sketch);

/// Single selection run for the skeleton and cur commands. Top-level keys:
/// algorithm, k, oversample, embedding, seed, norm, factors; plus [matrix].
struct SelectionConfig {
  MatrixDescriptor matrix;
  std::string algorithm = "rand-lupp";
  Index k = 10;
  Index oversample = 0;
  EmbeddingKind embedding = EmbeddingKind::gaussian;
  std::uint64_t seed = 0;
  Norm norm = Norm::frobenius;
  FactorKind factors = FactorKind::cur_stable;
  void validate() const;
};

SelectionConfig selection_from_config(const KeyValueConfig& cfg);
FactorKind parse_factor_kind(const std::string& text);

struct SelectionResult {
  SkeletonSet set;
  std::optional<Factors> factors;
  std::optional<ErrorReport> error;  ///< when the matrix fits the dense budget
};

SelectionResult run_selection(const SelectionConfig& cfg, bool build_factors);
Factors build_factors(FactorKind kind, const MatrixSource& a, const SkeletonSet& set);

/// Human-readable summary with the certificates.
void print_selection(std::ostream& out, const SelectionResult& r);

} // namespace randskel::cli
