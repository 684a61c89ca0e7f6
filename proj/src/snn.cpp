#include "randskel/snn.hpp"

#include <cmath>
#include <random>
#include <sstream>
#include <unordered_set>

#include "randskel/errors.hpp"
#include "randskel/random.hpp"

namespace randskel {
namespace {

constexpr std::uint64_t kLeftStream = 0x11;
constexpr std::uint64_t kRightStream = 0x22;

struct SparseFactor {
  std::vector<Index> index;
  std::vector<double> value;
};

// Floyd's sampling of `count` distinct coordinates in [0, dim).
SparseFactor draw_factor(Index dim, Index count, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::unordered_set<Index> chosen;
  SparseFactor f;
  f.index.reserve(static_cast<std::size_t>(count));
  for (Index j = dim - count; j < dim; ++j) {
    std::uniform_int_distribution<Index> pick(0, j);
    Index t = pick(gen);
    if (!chosen.insert(t).second) {
      chosen.insert(j);
      t = j;
    }
    f.index.push_back(t);
  }
  std::sort(f.index.begin(), f.index.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  f.value.reserve(f.index.size());
  for (std::size_t i = 0; i < f.index.size(); ++i)
    f.value.push_back(1.0 - unit(gen));  // (0, 1]
  return f;
}

Index factor_nnz(double density, Index dim) {
  return std::min(dim, std::max<Index>(1, static_cast<Index>(std::ceil(density * static_cast<double>(dim) - 1e-12))));
}

struct SnnFactors {
  SparseMatrix left;   // m×r, column i is x_i
  SparseMatrix right;  // n×r, column i is y_i
};

SnnFactors build_factors(const SnnSpec& spec) {
  spec.validate();
  const Index r = spec.terms();
  const Index kx = factor_nnz(spec.density, spec.m);
  const Index ky = factor_nnz(spec.density, spec.n);
  std::vector<Triplet> xt, yt;
  xt.reserve(static_cast<std::size_t>(r * kx));
  yt.reserve(static_cast<std::size_t>(r * ky));
  for (Index i = 0; i < r; ++i) {
    auto x = draw_factor(spec.m, kx, derive_seed(spec.seed, kLeftStream, static_cast<std::uint64_t>(i)));
    auto y = draw_factor(spec.n, ky, derive_seed(spec.seed, kRightStream, static_cast<std::uint64_t>(i)));
    for (std::size_t t = 0; t < x.index.size(); ++t)
      xt.emplace_back(x.index[t], i, x.value[t]);
    for (std::size_t t = 0; t < y.index.size(); ++t)
      yt.emplace_back(y.index[t], i, y.value[t]);
  }
  SnnFactors f{SparseMatrix(spec.m, r), SparseMatrix(spec.n, r)};
  f.left.setFromTriplets(xt.begin(), xt.end());
  f.right.setFromTriplets(yt.begin(), yt.end());
  return f;
}

} // namespace

void SnnSpec::validate() const {
  if (weights.empty())
    throw ParameterError("snn: weight list is empty");
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (!(weights[i] > 0.0) || !std::isfinite(weights[i]))
      throw ParameterError("snn: weight s_" + std::to_string(i + 1) + " must be positive");
    if (i > 0 && weights[i] > weights[i - 1])
      throw ParameterError("snn: weights must be nonincreasing (s_" + std::to_string(i + 1) + ")");
  }
  if (m < 1 || n < 1)
    throw ParameterError("snn: dimensions must be positive");
  if (!(density > 0.0 && density <= 1.0))
    throw ParameterError("snn: density must lie in (0, 1]");
}

double WeightRule::operator()(Index i) const {
  return coef / std::pow(static_cast<double>(i), power);
}

WeightRule WeightRule::parse(const std::string& text) {
  std::string t;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c)))
      t.push_back(c);
  WeightRule rule;
  auto slash = t.find('/');
  try {
    if (slash == std::string::npos) {
      rule.coef = std::stod(t);
      rule.power = 0.0;
      return rule;
    }
    rule.coef = std::stod(t.substr(0, slash));
    std::string denom = t.substr(slash + 1);
    if (denom == "i") {
      rule.power = 1.0;
    } else if (denom.rfind("i^", 0) == 0) {
      rule.power = std::stod(denom.substr(2));
    } else {
      throw ParameterError("weight rule '" + text + "': denominator must be i or i^p");
    }
  } catch (const std::invalid_argument&) {
    throw ParameterError("weight rule '" + text + "' is not of the form c, c/i or c/i^p");
  }
  return rule;
}

std::string WeightRule::to_string() const {
  std::ostringstream out;
  out << coef;
  if (power == 1.0)
    out << "/i";
  else if (power != 0.0)
    out << "/i^" << power;
  return out.str();
}

std::vector<double> snn_weights(Index r, Index head_count, WeightRule head, WeightRule tail) {
  if (r < 1)
    throw ParameterError("snn: r must be positive");
  std::vector<double> s(static_cast<std::size_t>(r));
  for (Index i = 1; i <= r; ++i)
    s[static_cast<std::size_t>(i - 1)] = i <= head_count ? head(i) : tail(i);
  return s;
}

std::vector<double> snn_reference_weights(Index r) {
  return snn_weights(r, std::max<Index>(1, r / 10), WeightRule{2.0, 1.0}, WeightRule{1.0, 1.0});
}

MatrixSource snn_generate(const SnnSpec& spec) {
  SnnFactors f = build_factors(spec);
  // A = X diag(s) Y^T; sparse product sums duplicate coordinates.
  Vector s = Eigen::Map<const Vector>(spec.weights.data(), spec.terms());
  SparseMatrix xs = f.left * s.asDiagonal();
  SparseMatrix yt = f.right.transpose();
  SparseMatrix a = xs * yt;
  a.prune(0.0);
  return MatrixSource::sparse(std::move(a));
}

MatrixSource snn_operator(const SnnSpec& spec) {
  auto f = std::make_shared<SnnFactors>(build_factors(spec));
  auto s = std::make_shared<Vector>(Eigen::Map<const Vector>(spec.weights.data(), spec.terms()));
  Index nnz_bound = 0;
  for (Index i = 0; i < spec.terms(); ++i)
    nnz_bound += f->left.col(i).nonZeros() * f->right.col(i).nonZeros();
  nnz_bound = std::min(nnz_bound, spec.m * spec.n);
  BlockApply apply = [f, s](const Matrix& x) -> Matrix {
    Matrix t = f->right.transpose() * x;
    return f->left * (s->asDiagonal() * t);
  };
  BlockApply apply_t = [f, s](const Matrix& y) -> Matrix {
    Matrix t = f->left.transpose() * y;
    return f->right * (s->asDiagonal() * t);
  };
  return MatrixSource::oracle(spec.m, spec.n, std::move(apply), std::move(apply_t), nnz_bound);
}

SnnSpec snn_from_config(const KeyValueConfig& cfg) {
  SnnSpec spec;
  spec.m = cfg.get_int("m");
  spec.n = cfg.get_int("n");
  spec.density = cfg.get_double("density", 0.025);
  spec.seed = cfg.get_uint64("seed", 0);
  if (cfg.contains("s")) {
    spec.weights = cfg.get_double_list("s");
  } else {
    const Index r = cfg.get_int("r");
    if (!cfg.contains("s_head") && !cfg.contains("s_tail")) {
      spec.weights = snn_reference_weights(r);
    } else {
      WeightRule head = WeightRule::parse(cfg.get_string("s_head", "1/i"));
      WeightRule tail = WeightRule::parse(cfg.get_string("s_tail", cfg.get_string("s_head", "1/i")));
      Index head_count = cfg.get_int("s_head_count", r);
      spec.weights = snn_weights(r, head_count, head, tail);
    }
  }
  if (cfg.contains("r") && cfg.get_int("r") != spec.terms())
    throw ParameterError("snn config: r does not match the length of s");
  spec.validate();
  return spec;
}

} // namespace randskel
