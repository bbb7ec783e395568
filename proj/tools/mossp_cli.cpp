// Command-line front end. Talks to the library only through mossp.h.
#include <cstdio>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "mossp/mossp.h"

namespace {

struct SpecFlags {
  std::string config;
  // (key, value) pairs in declaration order; filled only for flags given.
  std::vector<std::pair<std::string, std::string>> values;
  std::vector<std::pair<std::string, CLI::Option*>> options;
  std::vector<std::unique_ptr<std::string>> storage;

  void add(CLI::App* app, const std::string& key, const std::string& help, bool flag_like = false) {
    storage.push_back(std::make_unique<std::string>());
    std::string flag = "--" + key;
    for (auto& ch : flag)
      if (ch == '_') ch = '-';
    CLI::Option* opt = app->add_option(flag, *storage.back(), help);
    if (flag_like) opt->expected(0, 1);
    options.emplace_back(key, opt);
  }

  void collect() {
    for (std::size_t i = 0; i < options.size(); ++i) {
      if (options[i].second->count() == 0) continue;
      std::string v = *storage[i];
      if (v.empty() && options[i].second->get_expected_min() == 0) v = "true";
      values.emplace_back(options[i].first, v);
    }
  }
};

void add_spec_flags(CLI::App* app, SpecFlags& f) {
  app->add_option("--config", f.config, "key = value configuration file (flags override it)");
  f.add(app, "algo", "mossp_p | mossp_r | spdc_p | spdc_r | salm_p | salm_r");
  f.add(app, "dataset", "LIBSVM file or synthetic:N=..,n=..,seed=..");
  f.add(app, "problem", "logistic | quadeq");
  f.add(app, "quadeq", "quadratic-equality instance file");
  f.add(app, "quadeq_seed", "seed for a generated instance when --quadeq is absent");
  f.add(app, "lambda", "regularization weight");
  f.add(app, "lambda_grid", "comma-separated λ values swept by benchmark");
  f.add(app, "K", "iterations (outer iterations for baselines)");
  f.add(app, "batch", "minibatch size (default 32, 16 when N < 1000)");
  f.add(app, "b0", "initial batch for recursive momentum");
  f.add(app, "b0_scale", "factor c in b0 = max(b0, ceil(c K^{1/3})) for thm32");
  f.add(app, "preset", "thm31 | thm32 | cor31 | cor32 | manual");
  f.add(app, "rho0", "base penalty ρ₀ (baselines: penalty ρ)");
  f.add(app, "mu0", "base smoothing μ₀");
  f.add(app, "alpha0", "momentum constant α₀ (manual: α)");
  f.add(app, "gamma", "γ for Polyak presets");
  f.add(app, "beta", "z-update step β");
  f.add(app, "seed", "random seed (benchmark: first seed)");
  f.add(app, "repeats", "number of seeds for benchmark");
  f.add(app, "diag_stride", "iterations between metric records");
  f.add(app, "normalize_rows", "scale samples to unit norm (true/false)", true);
  f.add(app, "feasible_init", "start from a feasible point (true/false)", true);
  f.add(app, "record_time", "store wall-clock seconds in metrics (true/false)", true);
  f.add(app, "out", "metrics file (solve) or output directory (benchmark)");
  f.add(app, "time_budget_from", "baselines: run for the elapsed time in this metrics file");
  f.add(app, "inner_iters", "baseline inner iterations");
  f.add(app, "prox_weight", "baseline proximal weight");
  f.add(app, "inner_step", "baseline inner step size");
  f.add(app, "dual_step", "SALM multiplier step (default ρ)");
}

int report_error(mossp_status st) {
  std::fflush(stdout);
  std::fprintf(stderr, "error: %s\n", mossp_last_error());
  return st == MOSSP_OK ? 0 : 1;
}

struct SpecHandle {
  mossp_spec* p = nullptr;
  ~SpecHandle() { mossp_spec_destroy(p); }
};

int build_spec(SpecFlags& f, SpecHandle& h) {
  f.collect();
  mossp_status st = mossp_spec_create(&h.p);
  if (st != MOSSP_OK) return report_error(st);
  if (!f.config.empty() && (st = mossp_spec_load(h.p, f.config.c_str())) != MOSSP_OK)
    return report_error(st);
  for (const auto& [k, v] : f.values)
    if ((st = mossp_spec_set(h.p, k.c_str(), v.c_str())) != MOSSP_OK) return report_error(st);
  return 0;
}

int cmd_validate(SpecFlags& f) {
  SpecHandle h;
  if (int rc = build_spec(f, h)) return rc;
  mossp_report* rep = nullptr;
  const mossp_status st = mossp_validate(h.p, &rep);
  const std::size_t n = mossp_report_count(rep);
  for (std::size_t i = 0; i < n; ++i) {
    const char* name = nullptr;
    double lhs = 0, rhs = 0;
    int ok = 0;
    mossp_report_check(rep, i, &name, &lhs, &rhs, &ok);
    std::printf("%-4s %s   (%.6g vs %.6g)\n", ok ? "ok" : "FAIL", name, lhs, rhs);
  }
  mossp_report_destroy(rep);
  if (st != MOSSP_OK) return report_error(st);
  std::printf("configuration valid\n");
  return 0;
}

int cmd_solve(SpecFlags& f) {
  SpecHandle h;
  if (int rc = build_spec(f, h)) return rc;
  mossp_result* res = nullptr;
  const mossp_status st = mossp_solve(h.p, &res);
  if (st != MOSSP_OK) return report_error(st);
  double obj = 0, feas = 0, viol = 0;
  mossp_result_final(res, &obj, &feas, &viol);
  mossp_kkt kkt{};
  mossp_result_kkt(res, &kkt);
  std::printf("objective %.10g\nfeas %.6g\nviolation_l1 %.6g\n", obj, feas, viol);
  std::printf("output iterate R = %llu: criticality %.6g, feasibility %.6g\n",
              static_cast<unsigned long long>(kkt.output_index), kkt.criticality, kkt.feasibility);
  for (std::size_t i = 0; i < mossp_result_warning_count(res); ++i)
    std::fprintf(stderr, "warning: %s\n", mossp_result_warning(res, i));
  mossp_result_destroy(res);
  return 0;
}

int cmd_benchmark(SpecFlags& f, unsigned threads) {
  SpecHandle h;
  if (int rc = build_spec(f, h)) return rc;
  mossp_bench* b = nullptr;
  const mossp_status st = mossp_benchmark(h.p, threads, &b);
  if (st != MOSSP_OK) return report_error(st);
  for (std::size_t g = 0; g < mossp_bench_group_count(b); ++g) {
    mossp_summary s{};
    mossp_bench_summary(b, g, &s);
    std::printf("lambda %g: objective %.4f ± %.2e, violation %.2e ± %.2e  (%s)\n", s.lambda,
                s.mean_objective, s.std_objective, s.mean_violation, s.std_violation,
                mossp_bench_summary_path(b, g));
  }
  mossp_bench_destroy(b);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MoSSP single-loop stochastic penalty solver"};
  app.require_subcommand(1);

  SpecFlags solve_f, bench_f, validate_f;
  auto* solve = app.add_subcommand("solve", "run one configuration");
  add_spec_flags(solve, solve_f);

  auto* bench = app.add_subcommand("benchmark", "run repeats seeds and summarize");
  add_spec_flags(bench, bench_f);
  unsigned threads = 0;
  bench->add_option("--threads", threads, "concurrent runs (0 = hardware concurrency)");

  auto* validate = app.add_subcommand("validate-config", "check schedule inequalities");
  add_spec_flags(validate, validate_f);

  auto* gen = app.add_subcommand("gen-quadeq", "write a quadratic-equality instance");
  std::uint64_t gen_n = 0, gen_M = 20, gen_seed = 0;
  std::string gen_out;
  gen->add_option("--n", gen_n, "dimension")->required();
  gen->add_option("--M", gen_M, "number of constraints");
  gen->add_option("--seed", gen_seed, "generator seed");
  gen->add_option("--out", gen_out, "output file")->required();

  auto* check = app.add_subcommand("parse-check", "validate a LIBSVM file");
  std::string check_path;
  check->add_option("--dataset,dataset", check_path, "LIBSVM file")->required();

  CLI11_PARSE(app, argc, argv);

  if (*solve) return cmd_solve(solve_f);
  if (*bench) return cmd_benchmark(bench_f, threads);
  if (*validate) return cmd_validate(validate_f);
  if (*gen) {
    double max_c = 0.0;
    const mossp_status st = mossp_gen_quadeq(gen_n, gen_M, gen_seed, gen_out.c_str(), &max_c);
    if (st != MOSSP_OK) return report_error(st);
    std::printf("wrote %s (n = %llu, M = %llu, max |c(x_star)| = %.3g)\n", gen_out.c_str(),
                static_cast<unsigned long long>(gen_n), static_cast<unsigned long long>(gen_M), max_c);
    return 0;
  }
  if (*check) {
    mossp_dataset_info info{};
    const mossp_status st = mossp_parse_check(check_path.c_str(), &info);
    if (st != MOSSP_OK) return report_error(st);
    std::printf("%s: N = %llu, n = %llu, nonzeros = %llu%s\n", check_path.c_str(),
                static_cast<unsigned long long>(info.rows), static_cast<unsigned long long>(info.cols),
                static_cast<unsigned long long>(info.nonzeros),
                info.labels_remapped ? ", labels remapped to ±1" : "");
    return 0;
  }
  return 1;
}
