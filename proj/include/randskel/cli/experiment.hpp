#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randskel/config.hpp"
#include "randskel/embed.hpp"
#include "randskel/matsource.hpp"
#include "randskel/skeleton.hpp"
#include "randskel/snn.hpp"

namespace randskel::cli {

/// Where the test matrix comes from ([matrix] section).
///   source = snn      SNN keys (m, n, r, density, seed, s / s_head ...)
///   source = mtx      path = file.mtx
///   source = lowrank  m, n, rank, seed: exact-rank Gaussian product
///   source = decay    m, n, cond, seed: U diag(logspace(0, -log10 cond)) V^T
struct MatrixDescriptor {
  std::string source = "snn";
  SnnSpec snn;
  std::string path;
  Index m = 0;
  Index n = 0;
  Index rank = 0;
  double cond = 1e12;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  MatrixDescriptor matrix;
  std::vector<std::string> algorithms{"rand-lupp"};
  std::vector<Index> ranks;
  Norm norm = Norm::frobenius;
  int trials = 1;
  std::uint64_t seed = 0;
  Index oversample = 0;  ///< l = k + oversample
  EmbeddingKind embedding = EmbeddingKind::gaussian;
  std::string out;

  /// Throws ParameterError naming the offending field.
  void validate() const;
};

MatrixDescriptor matrix_from_config(const KeyValueConfig& section);
ExperimentConfig experiment_from_config(const KeyValueConfig& cfg);
MatrixSource build_matrix(const MatrixDescriptor& d);

Norm parse_norm(const std::string& text);
std::string to_string(Norm norm);

const std::vector<std::string>& known_algorithms();
/// Accepts the names above plus rand-lupp-<q>piter / rand-cpqr-<q>piter.
bool is_algorithm(const std::string& name);

/// Per-trial seed; a pure function of its arguments.
std::uint64_t trial_seed(std::uint64_t master, const std::string& algorithm, Index k, int trial);

/// Runs one named selector with l columns/rows (k for leverage sampling).
SkeletonSet run_algorithm(const std::string& name, const MatrixSource& a, Index k, Index l,
                          const SketchOptions& sketch);

} // namespace randskel::cli
