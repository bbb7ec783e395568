#include "mossp/mossp.h"

#include <cstring>
#include <string>
#include <vector>

#include "mossp/harness.hpp"

struct mossp_spec {
  mossp::RunSpec spec;
};

struct mossp_report {
  mossp::ValidationReport report;
};

struct mossp_result {
  mossp::RunResult result;
};

struct mossp_bench {
  std::vector<mossp::BenchmarkOutput> groups;
};

namespace {

thread_local std::string last_error;
thread_local std::string last_inequality;

mossp_status fail(mossp_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

// Maps library exceptions to status codes.
template <class F>
mossp_status guarded(F&& f) {
  last_error.clear();
  last_inequality.clear();
  try {
    f();
    return MOSSP_OK;
  } catch (const mossp::ScheduleError& e) {
    last_inequality = e.inequality();
    return fail(MOSSP_ERR_SCHEDULE, e.what());
  } catch (const mossp::ParseError& e) {
    return fail(MOSSP_ERR_PARSE, e.what());
  } catch (const mossp::IoError& e) {
    return fail(MOSSP_ERR_IO, e.what());
  } catch (const mossp::DivergedError& e) {
    return fail(MOSSP_ERR_DIVERGED, e.what());
  } catch (const mossp::InvalidArgument& e) {
    return fail(MOSSP_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(MOSSP_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(MOSSP_ERR_INTERNAL, "unknown error");
  }
}

#define MOSSP_REQUIRE(cond, what) \
  if (!(cond)) return fail(MOSSP_ERR_INVALID_ARGUMENT, what)

}  // namespace

extern "C" {

const char* mossp_version(void) { return "1.0.0"; }
const char* mossp_last_error(void) { return last_error.c_str(); }
const char* mossp_last_inequality(void) { return last_inequality.c_str(); }

mossp_status mossp_spec_create(mossp_spec** out) {
  MOSSP_REQUIRE(out, "null output pointer");
  return guarded([&] { *out = new mossp_spec{}; });
}

void mossp_spec_destroy(mossp_spec* spec) { delete spec; }

mossp_status mossp_spec_set(mossp_spec* spec, const char* key, const char* value) {
  MOSSP_REQUIRE(spec && key && value, "null argument");
  return guarded([&] { mossp::set_field(spec->spec, key, value); });
}

mossp_status mossp_spec_load(mossp_spec* spec, const char* path) {
  MOSSP_REQUIRE(spec && path, "null argument");
  return guarded([&] { spec->spec = mossp::read_config(path); });
}

mossp_status mossp_spec_serialize(const mossp_spec* spec, char* buf, size_t cap, size_t* needed) {
  MOSSP_REQUIRE(spec, "null spec");
  return guarded([&] {
    const std::string s = mossp::serialize(spec->spec);
    if (needed) *needed = s.size() + 1;
    if (buf && cap > 0) {
      const std::size_t n = std::min(cap - 1, s.size());
      std::memcpy(buf, s.data(), n);
      buf[n] = '\0';
    }
  });
}

mossp_status mossp_validate(const mossp_spec* spec, mossp_report** out) {
  MOSSP_REQUIRE(spec && out, "null argument");
  *out = nullptr;
  mossp_status st = guarded([&] { *out = new mossp_report{mossp::validate_config(spec->spec)}; });
  if (st != MOSSP_OK) return st;
  const auto& rep = (*out)->report;
  if (!rep.error.empty()) return fail(MOSSP_ERR_INVALID_ARGUMENT, rep.error);
  if (rep.schedule) {
    if (const auto* bad = rep.schedule->first_failure()) {
      last_inequality = bad->name;
      return fail(MOSSP_ERR_SCHEDULE, bad->name + " violated: lhs = " + mossp::format_double(bad->lhs) +
                                          ", rhs = " + mossp::format_double(bad->rhs));
    }
  }
  return MOSSP_OK;
}

void mossp_report_destroy(mossp_report* report) { delete report; }

size_t mossp_report_count(const mossp_report* report) {
  if (!report || !report->report.schedule) return 0;
  return report->report.schedule->checks.size();
}

mossp_status mossp_report_check(const mossp_report* report, size_t i, const char** name,
                                double* lhs, double* rhs, int* ok) {
  MOSSP_REQUIRE(report, "null report");
  MOSSP_REQUIRE(i < mossp_report_count(report), "check index out of range");
  const auto& c = report->report.schedule->checks[i];
  if (name) *name = c.name.c_str();
  if (lhs) *lhs = c.lhs;
  if (rhs) *rhs = c.rhs;
  if (ok) *ok = c.ok ? 1 : 0;
  return MOSSP_OK;
}

mossp_status mossp_solve(const mossp_spec* spec, mossp_result** out) {
  MOSSP_REQUIRE(spec && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new mossp_result{mossp::solve(spec->spec)}; });
}

void mossp_result_destroy(mossp_result* result) { delete result; }

size_t mossp_result_record_count(const mossp_result* result) {
  return result ? result->result.records.size() : 0;
}

mossp_status mossp_result_record(const mossp_result* result, size_t i, mossp_record* out) {
  MOSSP_REQUIRE(result && out, "null argument");
  MOSSP_REQUIRE(i < result->result.records.size(), "record index out of range");
  const auto& r = result->result.records[i];
  *out = {r.k, r.oracle_calls, r.elapsed_s, r.objective, r.feas,
          r.infeas_stat, r.crit_u, r.crit_gap, r.potential};
  return MOSSP_OK;
}

mossp_status mossp_result_final(const mossp_result* result, double* objective, double* feas,
                                double* violation_l1) {
  MOSSP_REQUIRE(result, "null result");
  if (objective) *objective = result->result.final_objective;
  if (feas) *feas = result->result.final_feas;
  if (violation_l1) *violation_l1 = result->result.final_violation_l1;
  return MOSSP_OK;
}

mossp_status mossp_result_kkt(const mossp_result* result, mossp_kkt* out) {
  MOSSP_REQUIRE(result && out, "null argument");
  const auto m = mossp::kkt_measures(result->result.certificate);
  *out = {m.criticality, m.feasibility, m.infeasible_stationarity,
          result->result.max_membership_gap, result->result.R};
  return MOSSP_OK;
}

mossp_status mossp_result_vector(const mossp_result* result, int which, double* buf, size_t cap,
                                 size_t* n) {
  MOSSP_REQUIRE(result, "null result");
  const mossp::Vector* v = nullptr;
  switch (which) {
    case 0: v = &result->result.x_out; break;
    case 1: v = &result->result.x_final; break;
    case 2: v = &result->result.z_final; break;
    default: return fail(MOSSP_ERR_INVALID_ARGUMENT, "which must be 0, 1 or 2");
  }
  const auto size = static_cast<std::size_t>(v->size());
  if (n) *n = size;
  if (buf) std::memcpy(buf, v->data(), std::min(cap, size) * sizeof(double));
  return MOSSP_OK;
}

size_t mossp_result_warning_count(const mossp_result* result) {
  return result ? result->result.warnings.size() : 0;
}

const char* mossp_result_warning(const mossp_result* result, size_t i) {
  if (!result || i >= result->result.warnings.size()) return nullptr;
  return result->result.warnings[i].c_str();
}

mossp_status mossp_benchmark(const mossp_spec* spec, unsigned threads, mossp_bench** out) {
  MOSSP_REQUIRE(spec && out, "null argument");
  *out = nullptr;
  return guarded([&] { *out = new mossp_bench{mossp::benchmark(spec->spec, threads)}; });
}

void mossp_bench_destroy(mossp_bench* bench) { delete bench; }

size_t mossp_bench_group_count(const mossp_bench* bench) { return bench ? bench->groups.size() : 0; }

mossp_status mossp_bench_summary(const mossp_bench* bench, size_t group, mossp_summary* out) {
  MOSSP_REQUIRE(bench && out, "null argument");
  MOSSP_REQUIRE(group < bench->groups.size(), "group index out of range");
  const auto& g = bench->groups[group];
  const auto& s = g.stats;
  *out = {g.lambda, s.mean_objective, s.std_objective, s.mean_feas,
          s.std_feas, s.mean_violation, s.std_violation};
  return MOSSP_OK;
}

const char* mossp_bench_summary_path(const mossp_bench* bench, size_t group) {
  if (!bench || group >= bench->groups.size()) return nullptr;
  return bench->groups[group].summary_file.c_str();
}

mossp_status mossp_gen_quadeq(uint64_t n, uint64_t M, uint64_t seed, const char* path,
                              double* max_abs_c) {
  MOSSP_REQUIRE(path, "null path");
  MOSSP_REQUIRE(n > 0 && M > 0, "n and M must be positive");
  return guarded([&] {
    const auto inst = mossp::gen_quadeq(n, M, seed);
    mossp::write_quadeq(inst, std::string(path));
    if (max_abs_c) *max_abs_c = inst.eval(inst.x_star).cwiseAbs().maxCoeff();
  });
}

mossp_status mossp_parse_check(const char* path, mossp_dataset_info* info) {
  MOSSP_REQUIRE(path, "null path");
  return guarded([&] {
    const auto d = mossp::read_libsvm(path);
    if (info) {
      *info = {d.N(), d.n(), static_cast<uint64_t>(d.X.nonZeros()), d.label_note.empty() ? 0 : 1};
    }
  });
}

}  // extern "C"
