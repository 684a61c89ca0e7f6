#include "randskel/cli/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <regex>

#include "randskel/errors.hpp"
#include "randskel/linalg.hpp"
#include "randskel/matrix_market.hpp"
#include "randskel/random.hpp"

namespace randskel::cli {

namespace {

const std::regex kPowerName(R"(rand-(lupp|cpqr)-([0-9]+)piter)");

Matrix gaussian_matrix(Index rows, Index cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) g(i, j) = normal(rng);
  return g;
}

template <class F>
auto with_field(const std::string& field, F&& f) {
  try {
    return f();
  } catch (const FormatError&) {
    throw;
  } catch (const ParameterError& e) {
    throw ParameterError(field + ": " + e.what());
  }
}

} // namespace

Norm parse_norm(const std::string& text) {
  if (text == "fro" || text == "frobenius") return Norm::frobenius;
  if (text == "spec" || text == "spectral" || text == "2") return Norm::spectral;
  throw ParameterError("norm: expected fro or spec, got '" + text + "'");
}

std::string to_string(Norm norm) { return norm == Norm::frobenius ? "fro" : "spec"; }

const std::vector<std::string>& known_algorithms() {
  static const std::vector<std::string> names{"rand-lupp",        "rand-lupp-1piter", "rand-cpqr",
                                              "rand-cpqr-1piter", "rsvd-deim",        "rsvd-ls"};
  return names;
}

bool is_algorithm(const std::string& name) {
  const auto& k = known_algorithms();
  return std::find(k.begin(), k.end(), name) != k.end() || std::regex_match(name, kPowerName);
}

std::uint64_t trial_seed(std::uint64_t master, const std::string& algorithm, Index k, int trial) {
  const std::uint64_t s = derive_seed(master, hash_string(algorithm), static_cast<std::uint64_t>(k));
  return derive_seed(s, 0x747269616cULL, static_cast<std::uint64_t>(trial));
}

SkeletonSet run_algorithm(const std::string& name, const MatrixSource& a, Index k, Index l,
                          const SketchOptions& sketch) {
  SkeletonSet s;
  std::smatch m;
  if (name == "rand-lupp")
    s = rand_lupp(a, l, sketch, 0);
  else if (name == "rand-cpqr")
    s = rand_cpqr(a, l, sketch, 0);
  else if (name == "rsvd-deim")
    s = rsvd_deim(a, l, sketch);
  else if (name == "rsvd-ls")
    s = rsvd_leverage_sampling(a, k, l, sketch, derive_seed(sketch.seed, 0x6c73, 0));
  else if (std::regex_match(name, m, kPowerName)) {
    const int q = std::stoi(m[2].str());
    s = m[1].str() == "lupp" ? rand_lupp(a, l, sketch, q) : rand_cpqr(a, l, sketch, q);
  } else
    throw ParameterError("algorithms: unknown algorithm '" + name + "'");
  s.algorithm = name;
  return s;
}

MatrixDescriptor matrix_from_config(const KeyValueConfig& c) {
  MatrixDescriptor d;
  d.source = c.get_string("source", "snn");
  if (d.source == "snn") {
    d.snn = with_field("matrix", [&] { return snn_from_config(c); });
    d.m = d.snn.m;
    d.n = d.snn.n;
    d.seed = d.snn.seed;
  } else if (d.source == "mtx") {
    d.path = with_field("matrix", [&] { return c.get_string("path"); });
  } else if (d.source == "lowrank" || d.source == "decay") {
    with_field("matrix", [&] {
      d.m = c.get_int("m");
      d.n = c.get_int("n");
      d.seed = c.get_uint64("seed", 0);
      if (d.source == "lowrank")
        d.rank = c.get_int("rank");
      else
        d.cond = c.get_double("cond", 1e12);
      return 0;
    });
    if (d.m < 1 || d.n < 1) throw ParameterError("matrix.m, matrix.n: must be positive");
    if (d.source == "lowrank" && (d.rank < 1 || d.rank > std::min(d.m, d.n)))
      throw ParameterError("matrix.rank: must lie in [1, min(m, n)]");
    if (d.source == "decay" && !(d.cond >= 1.0)) throw ParameterError("matrix.cond: must be >= 1");
  } else {
    throw ParameterError("matrix.source: expected snn, mtx, lowrank or decay, got '" + d.source + "'");
  }
  return d;
}

MatrixSource build_matrix(const MatrixDescriptor& d) {
  if (d.source == "snn") return snn_generate(d.snn);
  if (d.source == "mtx") return load_matrix_market(d.path);
  if (d.source == "lowrank") {
    const Matrix g1 = gaussian_matrix(d.m, d.rank, derive_seed(d.seed, 0x6c31, 0));
    const Matrix g2 = gaussian_matrix(d.rank, d.n, derive_seed(d.seed, 0x6c32, 0));
    return MatrixSource::dense(g1 * g2);
  }
  if (d.source == "decay") {
    const Index p = std::min(d.m, d.n);
    const Matrix u = ortho(gaussian_matrix(d.m, p, derive_seed(d.seed, 0x6431, 0)));
    const Matrix v = ortho(gaussian_matrix(d.n, p, derive_seed(d.seed, 0x6432, 0)));
    Vector s(p);
    const double span = std::log10(d.cond);
    for (Index i = 0; i < p; ++i)
      s(i) = p == 1 ? 1.0 : std::pow(10.0, -span * static_cast<double>(i) / static_cast<double>(p - 1));
    return MatrixSource::dense(u * s.asDiagonal() * v.transpose());
  }
  throw ParameterError("matrix.source: unknown source '" + d.source + "'");
}

void ExperimentConfig::validate() const {
  if (trials < 1) throw ParameterError("trials: must be >= 1");
  if (ranks.empty()) throw ParameterError("ranks: rank grid is empty");
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    if (ranks[i] < 1) throw ParameterError("ranks: entries must be positive");
    if (i > 0 && ranks[i] <= ranks[i - 1]) throw ParameterError("ranks: grid must be strictly increasing");
  }
  if (oversample < 0) throw ParameterError("oversample: must be >= 0");
  if (algorithms.empty()) throw ParameterError("algorithms: list is empty");
  for (const auto& a : algorithms)
    if (!is_algorithm(a)) throw ParameterError("algorithms: unknown algorithm '" + a + "'");
  if (matrix.m > 0 && matrix.n > 0 && ranks.back() + oversample > std::min(matrix.m, matrix.n))
    throw ParameterError("ranks: largest k + oversample exceeds min(m, n)");
}

ExperimentConfig experiment_from_config(const KeyValueConfig& cfg) {
  ExperimentConfig e;
  e.matrix = matrix_from_config(cfg.section("matrix"));
  if (cfg.contains("algorithms")) e.algorithms = cfg.get_list("algorithms");
  if (cfg.contains("ranks"))
    for (long long k : cfg.get_int_list("ranks")) e.ranks.push_back(static_cast<Index>(k));
  e.norm = parse_norm(cfg.get_string("norm", "fro"));
  e.trials = static_cast<int>(cfg.get_int("trials", 1));
  e.seed = cfg.get_uint64("seed", 0);
  e.oversample = static_cast<Index>(cfg.get_int("oversample", 0));
  e.embedding = with_field("embedding", [&] { return parse_embedding_kind(cfg.get_string("embedding", "gaussian")); });
  e.out = cfg.get_string("out", "");
  return e;
}

} // namespace randskel::cli
