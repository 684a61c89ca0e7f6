// randskel: experiment harness for randomized skeleton selection.

#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "randskel/cli/commands.hpp"
#include "randskel/errors.hpp"
#include "randskel/matrix_market.hpp"

using namespace randskel;
using namespace randskel::cli;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::optional<int> trials;
  std::string norm;
  std::optional<Index> oversample;
};

void add_common(CLI::App* app, Common& c, bool config_required) {
  auto* opt = app->add_option("--config", c.config, "configuration file");
  if (config_required) opt->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "master seed (overrides the config)");
  app->add_option("--out", c.out, "output path");
  app->add_option("--trials", c.trials, "trials per configuration");
  app->add_option("--norm", c.norm, "error norm: fro or spec")->check(CLI::IsMember({"fro", "spec"}));
  app->add_option("--oversample", c.oversample, "use l = k + oversample");
}

KeyValueConfig load_config(const Common& c) {
  return c.config.empty() ? KeyValueConfig() : KeyValueConfig::load(c.config);
}

template <class Writer>
void emit(const std::string& path, Writer&& w) {
  if (path.empty()) {
    w(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  w(f);
}

int cmd_err_vs_rank(const Common& c) {
  ExperimentConfig e = experiment_from_config(load_config(c));
  if (c.seed) e.seed = *c.seed;
  if (c.trials) e.trials = *c.trials;
  if (!c.norm.empty()) e.norm = parse_norm(c.norm);
  if (c.oversample) e.oversample = *c.oversample;
  const std::string out = c.out.empty() ? e.out : c.out;
  const auto rows = err_vs_rank(e);
  emit(out, [&](std::ostream& os) { write_err_vs_rank_csv(os, rows); });
  return 0;
}

int cmd_bench_embed(const Common& c, const std::vector<std::string>& kinds, const std::vector<Index>& ms,
                    std::optional<Index> n, const std::vector<Index>& ls) {
  const KeyValueConfig cfg = load_config(c);
  BenchEmbedConfig b;
  if (cfg.contains("kinds")) {
    b.kinds.clear();
    for (const auto& k : cfg.get_list("kinds")) b.kinds.push_back(parse_embedding_kind(k));
  }
  if (cfg.contains("m")) { const auto v = cfg.get_int_list("m"); b.ms.assign(v.begin(), v.end()); }
  if (cfg.contains("l")) { const auto v = cfg.get_int_list("l"); b.ls.assign(v.begin(), v.end()); }
  b.n = static_cast<Index>(cfg.get_int("n", b.n));
  b.trials = static_cast<int>(cfg.get_int("trials", b.trials));
  b.seed = cfg.get_uint64("seed", 0);
  if (!kinds.empty()) {
    b.kinds.clear();
    for (const auto& k : kinds) b.kinds.push_back(parse_embedding_kind(k));
  }
  if (!ms.empty()) b.ms = ms;
  if (!ls.empty()) b.ls = ls;
  if (n) b.n = *n;
  if (c.trials) b.trials = *c.trials;
  if (c.seed) b.seed = *c.seed;
  const auto rows = bench_embed(b);
  emit(c.out, [&](std::ostream& os) { write_bench_embed_csv(os, rows); });
  return 0;
}

int cmd_bench_pivot(const Common& c, const std::vector<std::string>& kinds, const std::vector<Index>& ls,
                    std::optional<Index> n_factor) {
  const KeyValueConfig cfg = load_config(c);
  BenchPivotConfig b;
  if (cfg.contains("kinds")) {
    b.kinds.clear();
    for (const auto& k : cfg.get_list("kinds")) b.kinds.push_back(parse_bench_pivot_kind(k));
  }
  if (cfg.contains("l")) { const auto v = cfg.get_int_list("l"); b.ls.assign(v.begin(), v.end()); }
  b.n_factor = static_cast<Index>(cfg.get_int("n_factor", b.n_factor));
  b.trials = static_cast<int>(cfg.get_int("trials", b.trials));
  b.seed = cfg.get_uint64("seed", 0);
  if (!kinds.empty()) {
    b.kinds.clear();
    for (const auto& k : kinds) b.kinds.push_back(parse_bench_pivot_kind(k));
  }
  if (!ls.empty()) b.ls = ls;
  if (n_factor) b.n_factor = *n_factor;
  if (c.trials) b.trials = *c.trials;
  if (c.seed) b.seed = *c.seed;
  const auto rows = bench_pivot(b);
  emit(c.out, [&](std::ostream& os) { write_bench_pivot_csv(os, rows); });
  return 0;
}

SelectionConfig selection(const Common& c) {
  SelectionConfig s = selection_from_config(load_config(c));
  if (c.seed) s.seed = *c.seed;
  if (!c.norm.empty()) s.norm = parse_norm(c.norm);
  if (c.oversample) s.oversample = *c.oversample;
  return s;
}

int cmd_skeleton(const Common& c, const std::string& factors_dir) {
  const SelectionResult r = run_selection(selection(c), true);
  if (c.out.empty()) {
    std::cout << to_json(r.set) << '\n';
    print_selection(std::cerr, r);
  } else {
    emit(c.out, [&](std::ostream& os) { os << to_json(r.set) << '\n'; });
    print_selection(std::cout, r);
  }
  if (!factors_dir.empty()) export_factors(*r.factors, factors_dir);
  return 0;
}

int cmd_cur(const Common& c) {
  const SelectionResult r = run_selection(selection(c), true);
  export_factors(*r.factors, c.out);
  std::ofstream(std::filesystem::path(c.out) / "skeletons.json") << to_json(r.set) << '\n';
  print_selection(std::cout, r);
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Randomized skeleton selection and CUR/ID experiments"};
  app.require_subcommand(1);

  Common err_c, emb_c, piv_c, sk_c, cur_c;
  auto* err = app.add_subcommand("err-vs-rank", "CUR error against the truncated SVD over a rank grid (CSV)");
  add_common(err, err_c, true);

  std::vector<std::string> emb_kinds;
  std::vector<Index> emb_m, emb_l;
  std::optional<Index> emb_n;
  auto* emb = app.add_subcommand("bench-embed", "time embedding application (CSV)");
  add_common(emb, emb_c, false);
  emb->add_option("--kinds", emb_kinds, "gaussian, srtt, sparse_sign")->delimiter(',');
  emb->add_option("--m", emb_m, "ambient dimensions")->delimiter(',');
  emb->add_option("--n", emb_n, "columns of the test matrix");
  emb->add_option("--l", emb_l, "embedding dimensions")->delimiter(',');

  std::vector<std::string> piv_kinds;
  std::vector<Index> piv_l;
  std::optional<Index> piv_nf;
  auto* piv = app.add_subcommand("bench-pivot", "time pivoting on l × n sketches (CSV)");
  add_common(piv, piv_c, false);
  piv->add_option("--kinds", piv_kinds, "lupp, cpqr, deim")->delimiter(',');
  piv->add_option("--l", piv_l, "sketch heights")->delimiter(',');
  piv->add_option("--n-factor", piv_nf, "n = factor * l");

  std::string factors_dir;
  auto* sk = app.add_subcommand("skeleton", "select skeletons and write the skeleton set (JSON)");
  add_common(sk, sk_c, true);
  sk->add_option("--factors", factors_dir, "also export the factors to this directory");

  auto* cur = app.add_subcommand("cur", "select skeletons and export the factors as Matrix Market files");
  add_common(cur, cur_c, true);
  cur->get_option("--out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*err) return cmd_err_vs_rank(err_c);
    if (*emb) return cmd_bench_embed(emb_c, emb_kinds, emb_m, emb_n, emb_l);
    if (*piv) return cmd_bench_pivot(piv_c, piv_kinds, piv_l, piv_nf);
    if (*sk) return cmd_skeleton(sk_c, factors_dir);
    if (*cur) return cmd_cur(cur_c);
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const ParameterError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const FormatError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const BudgetError& e) {
    std::cerr << "budget error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
