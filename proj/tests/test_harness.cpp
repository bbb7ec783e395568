#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "doctest.h"
#include "support.hpp"

using namespace mossp;
using namespace mossp::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mossp_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Random RunSpec for the round-trip property.
RunSpec random_spec(Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto pick = [&](std::size_t n) { return static_cast<std::size_t>(u(rng) * n) % n; };
  RunSpec s;
  s.algo = static_cast<Algorithm>(pick(6));
  s.dataset = pick(2) ? "data/a9a" : "synthetic:N=" + std::to_string(pick(5000) + 1) + ",n=7";
  s.problem = pick(2) ? "logistic" : "quadeq";
  if (s.problem == "quadeq" && pick(2)) s.quadeq = "inst.txt";
  s.quadeq_seed = pick(1000);
  s.lambda = u(rng) * 0.1;
  for (std::size_t i = 0, n = pick(4); i < n; ++i) s.lambda_grid.push_back(u(rng) / 3.0);
  s.K = pick(100000) + 1;
  if (pick(2)) s.batch = pick(64) + 1;
  s.b0 = pick(50) + 1;
  s.b0_scale = u(rng) * 3;
  s.preset = static_cast<Preset>(pick(5));
  s.rho0 = 0.1 + u(rng) * 10;
  s.mu0 = u(rng);
  if (pick(2)) s.alpha0 = u(rng);
  if (pick(2)) s.gamma = 1.0 + u(rng) * 7;
  s.beta = u(rng);
  s.seed = pick(1u << 30);
  s.repeats = pick(9) + 1;
  if (pick(2)) s.diag_stride = pick(100) + 1;
  s.normalize_rows = pick(2);
  s.feasible_init = pick(2);
  s.record_time = pick(2);
  s.out = pick(2) ? "" : "out dir/metrics.csv";
  s.time_budget_from = pick(2) ? "" : "ref.csv";
  s.inner_iters = pick(10) + 1;
  s.prox_weight = u(rng);
  s.inner_step = u(rng) / 10;
  if (pick(2)) s.dual_step = u(rng);
  return s;
}

}  // namespace

TEST_SUITE("harness") {
  TEST_CASE("libsvm_parse examples") {
    std::istringstream one("+1 1:0.5 3:-2\n");
    const Dataset d = libsvm_parse(one);
    CHECK(d.N() == 1);
    CHECK(d.n() == 3);
    CHECK(d.y[0] == 1.0);
    CHECK(d.X.coeff(0, 0) == 0.5);
    CHECK(d.X.coeff(0, 1) == 0.0);
    CHECK(d.X.coeff(0, 2) == -2.0);
    CHECK(d.X.nonZeros() == 2);

    std::istringstream empty_row("-1\n+1 2:1\n");
    const Dataset e = libsvm_parse(empty_row);
    CHECK(e.N() == 2);
    CHECK(e.y[0] == -1.0);
    CHECK(e.X.row(0).norm() == 0.0);
  }

  TEST_CASE("libsvm_parse: comments, CRLF, label remapping, n override") {
    std::istringstream in("# header\n0 1:1 # trailing\r\n\n1\t2:3\r\n");
    const Dataset d = libsvm_parse(in);
    CHECK(d.N() == 2);
    CHECK(d.y[0] == -1.0);
    CHECK(d.y[1] == 1.0);
    CHECK_FALSE(d.label_note.empty());
    std::istringstream in2("+1 1:1\n-1 2:1\n");
    const Dataset w = libsvm_parse(in2, 10);
    CHECK(w.n() == 10);
    CHECK(w.label_note.empty());
    std::istringstream in3("+1 1:1\n-1 12:1\n");
    try {
      libsvm_parse(in3, 10);
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("every malformed fixture is rejected with its line number") {
    const fs::path dir = fs::path(source_dir()) / "tests" / "data" / "malformed";
    std::size_t seen = 0;
    const std::regex expect("# expect-line: ([0-9]+)");
    for (const auto& entry : fs::directory_iterator(dir)) {
      const std::string text = slurp(entry.path());
      std::smatch m;
      REQUIRE_MESSAGE(std::regex_search(text, m, expect), entry.path().string());
      const std::size_t line = std::stoul(m[1]);
      CAPTURE(entry.path().filename().string());
      try {
        read_libsvm(entry.path().string());
        FAIL("fixture was accepted");
      } catch (const ParseError& e) {
        CHECK(e.line() == line);
        const std::string msg = e.what();
        CHECK(msg.find("line " + std::to_string(line)) != std::string::npos);
        CHECK(msg.find(entry.path().filename().string()) != std::string::npos);
      }
      ++seen;
    }
    CHECK(seen >= 12);
  }

  TEST_CASE("metrics files") {
    std::ostringstream empty;
    write_metrics({}, empty);
    CHECK(empty.str() == std::string(kMetricsHeader) + "\n");

    IterationRecord r;
    r.k = 7;
    r.oracle_calls = 224;
    r.objective = 0.1 + 0.2;
    r.feas = 1.0 / 3.0;
    r.infeas_stat = 1e-300;
    r.crit_u = std::nextafter(1.0, 2.0);
    r.crit_gap = 5e-324;
    r.potential = std::numeric_limits<double>::quiet_NaN();
    std::ostringstream one;
    write_metrics({r}, one);
    CHECK(count_lines(one.str()) == 2);

    Rng rng(51);
    std::vector<IterationRecord> recs;
    for (int i = 0; i < 200; ++i) {
      IterationRecord x;
      x.k = static_cast<std::size_t>(i);
      x.oracle_calls = static_cast<std::uint64_t>(i) * 32;
      const Vector v = random_vector(7, rng, 1e3);
      x.elapsed_s = std::abs(v[0]);
      x.objective = v[1];
      x.feas = std::exp(v[2] / 50.0);
      x.infeas_stat = v[3] * 1e-200;
      x.crit_u = v[4];
      x.crit_gap = v[5];
      x.potential = v[6];
      recs.push_back(x);
    }
    recs.push_back(r);
    std::stringstream ss;
    write_metrics(recs, ss);
    const auto back = read_metrics(ss);
    REQUIRE(back.size() == recs.size());
    for (std::size_t i = 0; i < recs.size(); ++i) {
      const double a[] = {recs[i].elapsed_s, recs[i].objective, recs[i].feas, recs[i].infeas_stat,
                          recs[i].crit_u, recs[i].crit_gap};
      const double b[] = {back[i].elapsed_s, back[i].objective, back[i].feas, back[i].infeas_stat,
                          back[i].crit_u, back[i].crit_gap};
      CHECK(std::memcmp(a, b, sizeof a) == 0);
      CHECK(back[i].k == recs[i].k);
      CHECK(back[i].oracle_calls == recs[i].oracle_calls);
    }
    CHECK(std::isnan(back.back().potential));
    CHECK_THROWS_AS(write_metrics(recs, "/nonexistent-dir/x.csv"), IoError);
  }

  TEST_CASE("config round trip (property)") {
    Rng rng(52);
    for (int t = 0; t < 300; ++t) {
      const RunSpec s = random_spec(rng);
      std::istringstream in(serialize(s));
      const RunSpec back = parse_config(in);
      CHECK(back == s);
      CHECK(serialize(back) == serialize(s));
    }
  }

  TEST_CASE("config parsing") {
    std::istringstream in(
        "# experiment\nalgo = mossp_r   # recursive\npreset=thm32\n\nK = 500\nnormalize-rows = false\n"
        "lambda_grid = 0.005, 0.05,0.1\n");
    const RunSpec s = parse_config(in);
    CHECK(s.algo == Algorithm::mossp_r);
    CHECK(s.preset == Preset::thm32);
    CHECK(s.K == 500);
    CHECK_FALSE(s.normalize_rows);
    CHECK(s.lambda_grid == std::vector<double>{0.005, 0.05, 0.1});
    std::istringstream bad("K = 10\nmu0 = fast\n");
    try {
      parse_config(bad);
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
    std::istringstream unknown("colour = red\n");
    CHECK_THROWS_AS(parse_config(unknown), ParseError);
    std::istringstream no_eq("K 10\n");
    CHECK_THROWS_AS(parse_config(no_eq), ParseError);
  }

  TEST_CASE("defaults") {
    const RunSpec s;
    CHECK(s.K == 25000);
    CHECK(effective_batch(s, 32561) == 32);
    CHECK(effective_batch(s, 690) == 16);
    RunSpec m = s;
    m.preset = Preset::manual;
    CHECK(baseline_config(m, 1000).effective_alpha() == 0.905);
    m.algo = Algorithm::mossp_r;
    const SolverConfig c = solver_config(m, 1000);
    const ScheduleParams p = check_schedule(c, default_constants(1.0)).params;
    CHECK(p.alpha == 0.9);
    m.algo = Algorithm::mossp_p;
    CHECK(check_schedule(solver_config(m, 1000), default_constants(1.0)).params.alpha == 0.905);
  }

  TEST_CASE("compatibility checks") {
    RunSpec s;
    s.dataset = "synthetic:N=50,n=4";
    CHECK_NOTHROW(check_compatibility(s));
    s.preset = Preset::thm32;
    CHECK_THROWS_AS(check_compatibility(s), InvalidArgument);
    s.algo = Algorithm::mossp_r;
    CHECK_NOTHROW(check_compatibility(s));
    s.preset = Preset::cor31;
    CHECK_THROWS_AS(check_compatibility(s), InvalidArgument);
    s = RunSpec{};
    s.repeats = 0;
    CHECK_THROWS_AS(check_compatibility(s), InvalidArgument);
    s = RunSpec{};
    s.time_budget_from = "ref.csv";
    CHECK_THROWS_AS(check_compatibility(s), InvalidArgument);
    s.algo = Algorithm::spdc_p;
    CHECK_NOTHROW(check_compatibility(s));
    s = RunSpec{};
    s.problem = "quadeq";
    CHECK_THROWS_AS(check_compatibility(s), InvalidArgument);
    CHECK_THROWS_AS(set_field(s, "algo", "sgd"), InvalidArgument);
  }

  TEST_CASE("validate_config names the violated inequality") {
    RunSpec s;
    s.mu0 = 1.0;
    ValidationReport r = validate_config(s);
    CHECK_FALSE(r.ok());
    REQUIRE(r.schedule.has_value());
    REQUIRE(r.schedule->first_failure() != nullptr);
    CHECK(r.schedule->first_failure()->name == "μ₀ ≤ 1/(4ρ₀)");
    s.mu0 = 0.25;
    CHECK(validate_config(s).ok());
    s.beta = 0.0;
    CHECK(validate_config(s).schedule->first_failure()->name == "0 < β ≤ 1");
    s = RunSpec{};
    s.algo = Algorithm::salm_p;
    s.inner_step = -1.0;
    r = validate_config(s);
    CHECK_FALSE(r.ok());
    CHECK_FALSE(r.error.empty());
  }

  TEST_CASE("quadeq files round trip and restore x_star") {
    const fs::path dir = scratch("quadeq");
    const QuadEqInstance inst = gen_quadeq(9, 4, std::uint64_t{77});
    const std::string path = (dir / "inst.txt").string();
    write_quadeq(inst, path);
    const std::string text = slurp(path);
    CHECK(text.rfind("9 4\n", 0) == 0);
    CHECK(text.find("# generated by gen-quadeq n=9 M=4 seed=77") != std::string::npos);
    const QuadEqInstance back = read_quadeq(path);
    CHECK(back.q == inst.q);
    CHECK(back.a == inst.a);
    CHECK(back.b == inst.b);
    CHECK(back.x_star == inst.x_star);
    CHECK(back.seeded);

    // edited data no longer matches its provenance
    std::string edited = text;
    const std::size_t row = edited.find('\n') + 1;
    edited.replace(row, edited.find(' ', row) - row, "0.0625");
    std::istringstream in(edited);
    const QuadEqInstance ed = read_quadeq(in);
    CHECK(ed.x_star.size() == 0);
    CHECK_FALSE(ed.seeded);

    std::istringstream short_rows("3 2\n1 2 3 | 4 5 6 | 7\n");
    CHECK_THROWS_AS(read_quadeq(short_rows), ParseError);
    std::istringstream bad_row("2 1\n1 2 | 3 | 4\n");
    try {
      read_quadeq(bad_row);
      FAIL("expected parse error");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }

  TEST_CASE("load_dataset handles generator specs") {
    const Dataset d = load_dataset("synthetic:N=120,n=5,seed=4", true);
    CHECK(d.N() == 120);
    CHECK(d.n() == 5);
    CHECK(d.max_row_norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(load_dataset("synthetic:N=10,q=3", false), InvalidArgument);
    CHECK_THROWS_AS(load_dataset("/nonexistent/file.libsvm", false), IoError);
  }

  TEST_CASE("solve writes metrics; identical configs give identical files") {
    const fs::path dir = scratch("solve");
    RunSpec s;
    s.dataset = "synthetic:N=300,n=8,seed=2";
    s.K = 600;
    s.out = (dir / "a.csv").string();
    solve(s);
    s.out = (dir / "b.csv").string();
    solve(s);
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(read_metrics((dir / "a.csv").string()).size() == 600 / 50 + 1);
  }

  TEST_CASE("benchmark: per-seed files, summary recomputation, lambda sweep") {
    const fs::path dir = scratch("bench");
    RunSpec s;
    s.dataset = "synthetic:N=300,n=8,seed=2";
    s.K = 500;
    s.repeats = 5;
    s.seed = 10;
    s.out = (dir / "run").string();
    const auto outs = benchmark(s, 2);
    REQUIRE(outs.size() == 1);
    CHECK(outs[0].metric_files.size() == 5);
    std::size_t csv = 0;
    for (const auto& e : fs::directory_iterator(dir / "run")) csv += e.path().extension() == ".csv";
    CHECK(csv == 6);

    std::vector<SummaryRow> rows = read_summary_rows(outs[0].summary_file);
    REQUIRE(rows.size() == 5);
    std::vector<SummaryRow> recomputed;
    for (std::size_t i = 0; i < 5; ++i) {
      const auto recs = read_metrics(outs[0].metric_files[i]);
      CHECK(recs.back().objective == rows[i].objective);
      CHECK(recs.back().feas == rows[i].feas);
      recomputed.push_back({rows[i].seed, recs.back().objective, recs.back().feas, rows[i].violation_l1});
    }
    const SummaryStats a = summarize(recomputed), b = outs[0].stats;
    CHECK(std::abs(a.mean_objective - b.mean_objective) <= 1e-12);
    CHECK(std::abs(a.std_objective - b.std_objective) <= 1e-12);
    CHECK(std::abs(a.mean_violation - b.mean_violation) <= 1e-12);
    CHECK(std::abs(a.std_violation - b.std_violation) <= 1e-12);
    // independent mean / sample std
    double m = 0;
    for (const auto& r : rows) m += r.objective;
    m /= 5;
    double v = 0;
    for (const auto& r : rows) v += (r.objective - m) * (r.objective - m);
    CHECK(std::abs(b.std_objective - std::sqrt(v / 4)) <= 1e-12);

    // same configuration, one thread: identical per-seed files
    s.out = (dir / "again").string();
    const auto again = benchmark(s, 1);
    for (std::size_t i = 0; i < 5; ++i)
      CHECK(slurp(outs[0].metric_files[i]) == slurp(again[0].metric_files[i]));

    s.lambda_grid = {0.005, 0.05};
    s.repeats = 2;
    s.out = (dir / "sweep").string();
    const auto sweep = benchmark(s, 0);
    REQUIRE(sweep.size() == 2);
    CHECK(sweep[1].lambda == 0.05);
    CHECK(fs::exists(dir / "sweep" / "lambda_0.005" / "summary.csv"));
  }

  TEST_CASE("time budget mode") {
    const fs::path dir = scratch("budget");
    RunSpec ref;
    ref.dataset = "synthetic:N=300,n=8,seed=2";
    ref.K = 300;
    ref.out = (dir / "ref.csv").string();
    solve(ref);
    CHECK_THROWS_AS(time_budget_from_metrics(ref.out), InvalidArgument);
    ref.record_time = true;
    solve(ref);
    const double t = time_budget_from_metrics(ref.out);
    CHECK(t > 0.0);
    RunSpec b = ref;
    b.algo = Algorithm::spdc_p;
    b.rho0 = 5.0;
    b.time_budget_from = ref.out;
    b.out = (dir / "spdc.csv").string();
    solve(b);
    CHECK(read_metrics(b.out).back().elapsed_s >= t);
  }

  TEST_CASE("quadeq problem through the harness") {
    RunSpec s;
    s.dataset = "synthetic:N=200,n=6,seed=1";
    s.problem = "quadeq";
    s.quadeq_seed = 3;
    s.K = 200;
    const LoadedProblem lp = load_problem(s);
    REQUIRE(lp.quadeq.has_value());
    CHECK(lp.quadeq->M == kDefaultQuadEqM);
    CHECK(lp.problem.constraints.m == kDefaultQuadEqM);
    CHECK(std::isfinite(solve(s).final_objective));
  }
}
