#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "randskel/config.hpp"
#include "randskel/matsource.hpp"

namespace randskel {

/// Sparse non-negative test matrix A = sum_i s_i x_i y_i^T. Each x_i (y_i)
/// has ceil(density*m) (ceil(density*n)) nonzeros at distinct uniformly
/// random coordinates with values uniform on (0, 1].
struct SnnSpec {
  std::vector<double> weights;  ///< s_1 >= ... >= s_r > 0
  Index m = 0;
  Index n = 0;
  double density = 0.025;
  std::uint64_t seed = 0;

  Index terms() const noexcept { return static_cast<Index>(weights.size()); }
  void validate() const;
};

/// Weight rule of the form `coef / i^power` (power 0 gives a constant).
struct WeightRule {
  double coef = 1.0;
  double power = 1.0;

  double operator()(Index i) const;  ///< i is 1-based
  static WeightRule parse(const std::string& text);
  std::string to_string() const;
};

/// s_i = head(i) for i <= head_count, tail(i) afterwards.
std::vector<double> snn_weights(Index r, Index head_count, WeightRule head, WeightRule tail);

/// Weight profile of the 1000×1000 benchmark instance (2/i for the first
/// 100 terms, 1/i after) rescaled to r terms: head_count = r/10.
std::vector<double> snn_reference_weights(Index r);

/// Explicitly assembled sparse matrix.
MatrixSource snn_generate(const SnnSpec& spec);

/// The same matrix as snn_generate for the same spec, held in factored form
/// behind an apply oracle: each product costs O(nnz(x) + nnz(y)) per term.
MatrixSource snn_operator(const SnnSpec& spec);

/// Reads keys m, n, r, density, seed and either `s` (explicit list) or
/// `s_head`, `s_head_count`, `s_tail` (rules such as "2/i").
SnnSpec snn_from_config(const KeyValueConfig& cfg);

} // namespace randskel
