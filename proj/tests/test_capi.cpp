// Exercises the shared library through its C interface only.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "mossp/mossp.h"

namespace fs = std::filesystem;

namespace {

struct Spec {
  mossp_spec* h = nullptr;
  Spec() { REQUIRE(mossp_spec_create(&h) == MOSSP_OK); }
  ~Spec() { mossp_spec_destroy(h); }
  void set(const char* k, const char* v) { REQUIRE_MESSAGE(mossp_spec_set(h, k, v) == MOSSP_OK, mossp_last_error()); }
};

std::string tmp(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mossp_capi_" + name);
  fs::remove_all(p);
  return p.string();
}

}  // namespace

TEST_SUITE("capi") {
  TEST_CASE("spec set, serialize and reject bad fields") {
    Spec s;
    s.set("K", "123");
    s.set("algo", "spdc_r");
    CHECK(mossp_spec_set(s.h, "K", "lots") == MOSSP_ERR_INVALID_ARGUMENT);
    CHECK(std::strlen(mossp_last_error()) > 0);
    CHECK(mossp_spec_set(s.h, "nonsense", "1") == MOSSP_ERR_INVALID_ARGUMENT);
    size_t needed = 0;
    CHECK(mossp_spec_serialize(s.h, nullptr, 0, &needed) == MOSSP_OK);
    REQUIRE(needed > 1);
    std::vector<char> buf(needed);
    CHECK(mossp_spec_serialize(s.h, buf.data(), buf.size(), &needed) == MOSSP_OK);
    const std::string text(buf.data());
    CHECK(text.size() + 1 == needed);
    CHECK(text.find("K = 123") != std::string::npos);
    CHECK(text.find("algo = spdc_r") != std::string::npos);
    CHECK(mossp_spec_set(nullptr, "K", "1") == MOSSP_ERR_INVALID_ARGUMENT);
  }

  TEST_CASE("validation reports the violated inequality") {
    Spec s;
    s.set("mu0", "1");
    mossp_report* r = nullptr;
    CHECK(mossp_validate(s.h, &r) == MOSSP_ERR_SCHEDULE);
    REQUIRE(r != nullptr);
    CHECK(std::string(mossp_last_inequality()) == "μ₀ ≤ 1/(4ρ₀)");
    bool found = false;
    for (size_t i = 0; i < mossp_report_count(r); ++i) {
      const char* name = nullptr;
      double lhs = 0, rhs = 0;
      int ok = 1;
      REQUIRE(mossp_report_check(r, i, &name, &lhs, &rhs, &ok) == MOSSP_OK);
      if (std::string(name) == "μ₀ ≤ 1/(4ρ₀)") {
        found = true;
        CHECK(ok == 0);
        CHECK(lhs == 1.0);
        CHECK(rhs == 0.25);
      }
    }
    CHECK(found);
    CHECK(mossp_report_check(r, 1000, nullptr, nullptr, nullptr, nullptr) == MOSSP_ERR_INVALID_ARGUMENT);
    mossp_report_destroy(r);

    Spec good;
    r = nullptr;
    CHECK(mossp_validate(good.h, &r) == MOSSP_OK);
    CHECK(mossp_report_count(r) > 5);
    mossp_report_destroy(r);
  }

  TEST_CASE("solve through the C interface") {
    Spec s;
    s.set("dataset", "synthetic:N=300,n=8,seed=2");
    s.set("K", "400");
    const std::string out = tmp("solve.csv");
    s.set("out", out.c_str());
    mossp_result* res = nullptr;
    REQUIRE_MESSAGE(mossp_solve(s.h, &res) == MOSSP_OK, mossp_last_error());
    CHECK(fs::exists(out));
    CHECK(mossp_result_record_count(res) == 400 / 50 + 1);
    mossp_record rec{};
    CHECK(mossp_result_record(res, 0, &rec) == MOSSP_OK);
    CHECK(rec.iter == 0);
    CHECK(mossp_result_record(res, 10000, &rec) == MOSSP_ERR_INVALID_ARGUMENT);
    double obj = 0, feas = 0, viol = 0;
    CHECK(mossp_result_final(res, &obj, &feas, &viol) == MOSSP_OK);
    CHECK(std::isfinite(obj));
    mossp_kkt kkt{};
    CHECK(mossp_result_kkt(res, &kkt) == MOSSP_OK);
    CHECK(kkt.output_index < 400);
    CHECK(kkt.criticality >= 0.0);
    size_t n = 0;
    CHECK(mossp_result_vector(res, 0, nullptr, 0, &n) == MOSSP_OK);
    CHECK(n == 8);
    std::vector<double> x(n);
    CHECK(mossp_result_vector(res, 1, x.data(), x.size(), &n) == MOSSP_OK);
    CHECK(mossp_result_vector(res, 7, x.data(), x.size(), &n) == MOSSP_ERR_INVALID_ARGUMENT);
    mossp_result_destroy(res);

    Spec missing;
    missing.set("dataset", "/nonexistent/data.libsvm");
    res = nullptr;
    CHECK(mossp_solve(missing.h, &res) == MOSSP_ERR_IO);
    CHECK(res == nullptr);
  }

  TEST_CASE("benchmark through the C interface") {
    Spec s;
    s.set("dataset", "synthetic:N=300,n=8,seed=2");
    s.set("K", "200");
    s.set("repeats", "3");
    const std::string out = tmp("bench");
    s.set("out", out.c_str());
    mossp_bench* b = nullptr;
    REQUIRE_MESSAGE(mossp_benchmark(s.h, 1, &b) == MOSSP_OK, mossp_last_error());
    CHECK(mossp_bench_group_count(b) == 1);
    mossp_summary sum{};
    CHECK(mossp_bench_summary(b, 0, &sum) == MOSSP_OK);
    CHECK(std::isfinite(sum.mean_objective));
    CHECK(sum.std_objective >= 0.0);
    CHECK(fs::exists(mossp_bench_summary_path(b, 0)));
    mossp_bench_destroy(b);
  }

  TEST_CASE("gen_quadeq and parse_check") {
    const std::string path = tmp("q.txt");
    double maxc = 1.0;
    CHECK(mossp_gen_quadeq(12, 20, 5, path.c_str(), &maxc) == MOSSP_OK);
    CHECK(maxc <= 1e-10);
    CHECK(mossp_gen_quadeq(0, 20, 5, path.c_str(), nullptr) == MOSSP_ERR_INVALID_ARGUMENT);

    const std::string data = tmp("d.libsvm");
    std::FILE* f = std::fopen(data.c_str(), "w");
    REQUIRE(f);
    std::fputs("+1 1:0.5 3:-2\n-1 2:1\n", f);
    std::fclose(f);
    mossp_dataset_info info{};
    CHECK(mossp_parse_check(data.c_str(), &info) == MOSSP_OK);
    CHECK(info.rows == 2);
    CHECK(info.cols == 3);
    CHECK(info.nonzeros == 3);
    CHECK(info.labels_remapped == 0);

    f = std::fopen(data.c_str(), "w");
    std::fputs("+1 1:0.5\n-1 2:x\n", f);
    std::fclose(f);
    CHECK(mossp_parse_check(data.c_str(), &info) == MOSSP_ERR_PARSE);
    CHECK(std::string(mossp_last_error()).find("line 2") != std::string::npos);
  }

  TEST_CASE("version string") { CHECK(std::strlen(mossp_version()) > 0); }
}
