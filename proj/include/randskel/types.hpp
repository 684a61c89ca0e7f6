#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace randskel {

using Index = Eigen::Index;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
// Compressed sparse columns.
using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, Index>;
using Triplet = Eigen::Triplet<double, Index>;
// Zero-based row or column indices.
using IndexList = std::vector<Index>;

enum class Norm { frobenius, spectral };

} // namespace randskel
