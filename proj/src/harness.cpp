#include "mossp/harness.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>
#include <thread>

namespace mossp {

namespace fs = std::filesystem;

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    const std::size_t j = i;
    while (i < s.size() && s[i] != ' ' && s[i] != '\t' && s[i] != '\r') ++i;
    if (i > j) out.push_back(s.substr(j, i - j));
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> to_int(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  Int v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

double require_double(const std::string& key, const std::string& value) {
  const auto v = to_double(trim(value));
  if (!v || !std::isfinite(*v)) throw InvalidArgument(key + ": '" + value + "' is not a finite number");
  return *v;
}

std::size_t require_size(const std::string& key, const std::string& value) {
  const auto v = to_int<std::size_t>(trim(value));
  if (!v) throw InvalidArgument(key + ": '" + value + "' is not a nonnegative integer");
  return *v;
}

bool require_bool(const std::string& key, const std::string& value) {
  const std::string v = trim(value);
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw InvalidArgument(key + ": '" + value + "' is not a boolean");
}

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  return f;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path + "' for reading");
  return f;
}

// Shortest decimal form that parses back to the same double.
std::string shortest(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

void finish_write(std::ofstream& f, const std::string& path) {
  f.flush();
  if (!f) throw IoError("write to '" + path + "' failed");
}

}  // namespace

// ---- LIBSVM ----------------------------------------------------------------

Dataset libsvm_parse(std::istream& in, std::optional<std::size_t> n_override) {
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> entries;
  std::vector<double> labels;
  std::vector<std::size_t> label_lines;
  std::size_t max_index = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
    const auto tokens = split_ws(body);
    if (tokens.empty()) continue;
    const auto label = to_double(tokens[0]);
    if (!label || !std::isfinite(*label))
      throw ParseError(line_no, "non-numeric label '" + std::string(tokens[0]) + "'");
    const auto row = static_cast<int>(labels.size());
    long long prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto tok = tokens[t];
      const auto colon = tok.find(':');
      if (colon == std::string_view::npos)
        throw ParseError(line_no, "expected idx:val, got '" + std::string(tok) + "'");
      const auto idx = to_int<long long>(tok.substr(0, colon));
      if (!idx) throw ParseError(line_no, "non-numeric index in '" + std::string(tok) + "'");
      if (*idx <= 0) throw ParseError(line_no, "nonpositive index " + std::to_string(*idx));
      if (*idx <= prev)
        throw ParseError(line_no, "index " + std::to_string(*idx) + " does not increase past " +
                                      std::to_string(prev));
      if (n_override && static_cast<std::size_t>(*idx) > *n_override)
        throw ParseError(line_no, "index " + std::to_string(*idx) + " exceeds n = " +
                                      std::to_string(*n_override));
      const auto val = to_double(tok.substr(colon + 1));
      if (!val || !std::isfinite(*val))
        throw ParseError(line_no, "non-numeric value in '" + std::string(tok) + "'");
      prev = *idx;
      max_index = std::max(max_index, static_cast<std::size_t>(*idx));
      if (*val != 0.0) entries.emplace_back(row, static_cast<int>(*idx - 1), *val);
    }
    labels.push_back(*label);
    label_lines.push_back(line_no);
  }
  if (in.bad()) throw IoError("read error after line " + std::to_string(line_no));
  if (labels.empty()) throw ParseError(line_no, "no samples");

  Dataset d;
  const std::size_t n = n_override.value_or(max_index);
  d.X.resize(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(n));
  d.X.setFromTriplets(entries.begin(), entries.end());
  d.X.makeCompressed();
  d.y.resize(static_cast<Eigen::Index>(labels.size()));

  std::set<double> distinct(labels.begin(), labels.end());
  const bool pm_one = std::all_of(distinct.begin(), distinct.end(),
                                  [](double v) { return v == 1.0 || v == -1.0; });
  if (pm_one) {
    for (std::size_t i = 0; i < labels.size(); ++i) d.y[static_cast<Eigen::Index>(i)] = labels[i];
  } else if (distinct.size() == 2) {
    const double lo = *distinct.begin(), hi = *distinct.rbegin();
    for (std::size_t i = 0; i < labels.size(); ++i)
      d.y[static_cast<Eigen::Index>(i)] = labels[i] == lo ? -1.0 : 1.0;
    d.label_note = "labels " + format_double(lo) + " -> -1, " + format_double(hi) + " -> +1";
  } else {
    for (std::size_t i = 0; i < labels.size(); ++i)
      if (labels[i] != 1.0 && labels[i] != -1.0)
        throw ParseError(label_lines[i], "label " + format_double(labels[i]) +
                                             " cannot be mapped to a binary class");
  }
  return d;
}

Dataset read_libsvm(const std::string& path, std::optional<std::size_t> n_override) {
  auto f = open_in(path);
  try {
    return libsvm_parse(f, n_override);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), e.detail());
  }
}

Dataset load_dataset(const std::string& spec, bool normalize) {
  Dataset d;
  const std::string prefix = "synthetic:";
  if (spec.rfind(prefix, 0) == 0) {
    std::size_t N = 2000, n = 68;
    std::uint64_t seed = 0;
    std::stringstream ss(spec.substr(prefix.size()));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos) throw InvalidArgument("synthetic dataset: bad item '" + item + "'");
      const std::string k = trim(item.substr(0, eq)), v = item.substr(eq + 1);
      if (k == "N") N = require_size("N", v);
      else if (k == "n") n = require_size("n", v);
      else if (k == "seed") seed = require_size("seed", v);
      else throw InvalidArgument("synthetic dataset: unknown key '" + k + "'");
    }
    d = synthetic_dataset(N, n, seed);
  } else {
    d = read_libsvm(spec);
  }
  return normalize ? normalize_rows(std::move(d)) : d;
}

// ---- metrics ---------------------------------------------------------------

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_metrics(const std::vector<IterationRecord>& records, std::ostream& out) {
  out << kMetricsHeader << '\n';
  for (const auto& r : records) {
    out << r.k << ',' << r.oracle_calls << ',' << format_double(r.elapsed_s) << ','
        << format_double(r.objective) << ',' << format_double(r.feas) << ','
        << format_double(r.infeas_stat) << ',' << format_double(r.crit_u) << ','
        << format_double(r.crit_gap) << ',' << format_double(r.potential) << '\n';
  }
}

void write_metrics(const std::vector<IterationRecord>& records, const std::string& path) {
  auto f = open_out(path);
  write_metrics(records, f);
  finish_write(f, path);
}

std::vector<IterationRecord> read_metrics(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMetricsHeader)
    throw ParseError(1, "missing metrics header");
  std::vector<IterationRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(trim(line));
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw ParseError(line_no, "expected 9 columns");
    auto num = [&](std::size_t i) {
      const std::string& c = cells[i];
      if (c == "nan") return std::numeric_limits<double>::quiet_NaN();
      if (c == "inf") return std::numeric_limits<double>::infinity();
      if (c == "-inf") return -std::numeric_limits<double>::infinity();
      const auto v = to_double(c);
      if (!v) throw ParseError(line_no, "non-numeric cell '" + c + "'");
      return *v;
    };
    IterationRecord r;
    const auto k = to_int<std::size_t>(cells[0]);
    const auto calls = to_int<std::uint64_t>(cells[1]);
    if (!k || !calls) throw ParseError(line_no, "non-integer iteration or oracle count");
    r.k = *k;
    r.oracle_calls = *calls;
    r.elapsed_s = num(2);
    r.objective = num(3);
    r.feas = num(4);
    r.infeas_stat = num(5);
    r.crit_u = num(6);
    r.crit_gap = num(7);
    r.potential = num(8);
    out.push_back(r);
  }
  return out;
}

std::vector<IterationRecord> read_metrics(const std::string& path) {
  auto f = open_in(path);
  return read_metrics(f);
}

// ---- quadeq files ----------------------------------------------------------

void write_quadeq(const QuadEqInstance& inst, std::ostream& out) {
  out << inst.n << ' ' << inst.M << '\n';
  for (std::size_t j = 0; j < inst.M; ++j) {
    const auto r = static_cast<Eigen::Index>(j);
    for (std::size_t l = 0; l < inst.n; ++l) out << format_double(inst.q(r, static_cast<Eigen::Index>(l))) << ' ';
    out << '|';
    for (std::size_t l = 0; l < inst.n; ++l) out << ' ' << format_double(inst.a(r, static_cast<Eigen::Index>(l)));
    out << " | " << format_double(inst.b[r]) << '\n';
  }
  if (inst.seeded)
    out << "# generated by gen-quadeq n=" << inst.n << " M=" << inst.M << " seed=" << inst.seed << '\n';
}

void write_quadeq(const QuadEqInstance& inst, const std::string& path) {
  auto f = open_out(path);
  write_quadeq(inst, f);
  finish_write(f, path);
}

QuadEqInstance read_quadeq(std::istream& in) {
  QuadEqInstance inst;
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t rows = 0;
  std::optional<std::uint64_t> seed;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t[0] == '#') {
      const auto pos = t.find("seed=");
      if (t.find("gen-quadeq") != std::string::npos && pos != std::string::npos) {
        seed = to_int<std::uint64_t>(trim(t.substr(pos + 5)));
        if (!seed) throw ParseError(line_no, "bad seed in provenance line");
      }
      continue;
    }
    if (!have_header) {
      const auto tok = split_ws(t);
      if (tok.size() != 2) throw ParseError(line_no, "expected 'n M'");
      const auto n = to_int<std::size_t>(tok[0]);
      const auto M = to_int<std::size_t>(tok[1]);
      if (!n || !M || *n == 0 || *M == 0) throw ParseError(line_no, "n and M must be positive integers");
      inst.n = *n;
      inst.M = *M;
      inst.q.resize(static_cast<Eigen::Index>(*M), static_cast<Eigen::Index>(*n));
      inst.a.resize(static_cast<Eigen::Index>(*M), static_cast<Eigen::Index>(*n));
      inst.b.resize(static_cast<Eigen::Index>(*M));
      have_header = true;
      continue;
    }
    if (rows == inst.M) throw ParseError(line_no, "more than M constraint rows");
    std::vector<std::string> parts;
    std::stringstream ss(t);
    std::string part;
    while (std::getline(ss, part, '|')) parts.push_back(part);
    if (parts.size() != 3) throw ParseError(line_no, "expected 'q... | a... | b'");
    const auto qs = split_ws(parts[0]), as = split_ws(parts[1]), bs = split_ws(parts[2]);
    if (qs.size() != inst.n || as.size() != inst.n || bs.size() != 1)
      throw ParseError(line_no, "expected " + std::to_string(inst.n) + " q values, " +
                                    std::to_string(inst.n) + " a values and one b");
    const auto r = static_cast<Eigen::Index>(rows);
    auto num = [&](std::string_view s) {
      const auto v = to_double(s);
      if (!v || !std::isfinite(*v)) throw ParseError(line_no, "non-numeric value '" + std::string(s) + "'");
      return *v;
    };
    for (std::size_t l = 0; l < inst.n; ++l) {
      inst.q(r, static_cast<Eigen::Index>(l)) = num(qs[l]);
      inst.a(r, static_cast<Eigen::Index>(l)) = num(as[l]);
    }
    inst.b[r] = num(bs[0]);
    ++rows;
  }
  if (!have_header) throw ParseError(line_no, "missing 'n M' header");
  if (rows != inst.M)
    throw ParseError(line_no, "expected " + std::to_string(inst.M) + " constraint rows, found " +
                                  std::to_string(rows));
  if (seed) {
    const QuadEqInstance regen = gen_quadeq(inst.n, inst.M, *seed);
    if (regen.q == inst.q && regen.a == inst.a && regen.b == inst.b) {
      inst.x_star = regen.x_star;
      inst.seed = *seed;
      inst.seeded = true;
    }
  }
  return inst;
}

QuadEqInstance read_quadeq(const std::string& path) {
  auto f = open_in(path);
  try {
    return read_quadeq(f);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), e.detail());
  }
}

// ---- run specification -----------------------------------------------------

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::mossp_p: return "mossp_p";
    case Algorithm::mossp_r: return "mossp_r";
    case Algorithm::spdc_p: return "spdc_p";
    case Algorithm::spdc_r: return "spdc_r";
    case Algorithm::salm_p: return "salm_p";
    case Algorithm::salm_r: return "salm_r";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& s) {
  for (auto a : {Algorithm::mossp_p, Algorithm::mossp_r, Algorithm::spdc_p, Algorithm::spdc_r,
                 Algorithm::salm_p, Algorithm::salm_r})
    if (s == to_string(a)) return a;
  throw InvalidArgument("unknown algorithm '" + s + "'");
}

bool is_mossp(Algorithm a) { return a == Algorithm::mossp_p || a == Algorithm::mossp_r; }

bool uses_recursive_momentum(Algorithm a) {
  return a == Algorithm::mossp_r || a == Algorithm::spdc_r || a == Algorithm::salm_r;
}

void set_field(RunSpec& s, const std::string& raw_key, const std::string& raw_value) {
  std::string key = trim(raw_key);
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string value = trim(raw_value);
  if (key == "algo") s.algo = parse_algorithm(value);
  else if (key == "dataset") s.dataset = value;
  else if (key == "problem") {
    if (value != "logistic" && value != "quadeq")
      throw InvalidArgument("problem: expected logistic or quadeq, got '" + value + "'");
    s.problem = value;
  } else if (key == "quadeq") s.quadeq = value;
  else if (key == "quadeq_seed") s.quadeq_seed = require_size(key, value);
  else if (key == "lambda") s.lambda = require_double(key, value);
  else if (key == "lambda_grid") {
    s.lambda_grid.clear();
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!trim(item).empty()) s.lambda_grid.push_back(require_double(key, item));
  } else if (key == "K") s.K = require_size(key, value);
  else if (key == "batch") {
    if (value.empty() || value == "auto") s.batch.reset();
    else s.batch = require_size(key, value);
  } else if (key == "b0") s.b0 = require_size(key, value);
  else if (key == "b0_scale") s.b0_scale = require_double(key, value);
  else if (key == "preset") s.preset = parse_preset(value);
  else if (key == "rho0") s.rho0 = require_double(key, value);
  else if (key == "mu0") s.mu0 = require_double(key, value);
  else if (key == "alpha0") {
    if (value.empty()) s.alpha0.reset();
    else s.alpha0 = require_double(key, value);
  } else if (key == "gamma") {
    if (value.empty()) s.gamma.reset();
    else s.gamma = require_double(key, value);
  } else if (key == "beta") s.beta = require_double(key, value);
  else if (key == "seed") s.seed = require_size(key, value);
  else if (key == "repeats") s.repeats = require_size(key, value);
  else if (key == "diag_stride") {
    if (value.empty() || value == "auto") s.diag_stride.reset();
    else s.diag_stride = require_size(key, value);
  } else if (key == "normalize_rows") s.normalize_rows = require_bool(key, value);
  else if (key == "feasible_init") s.feasible_init = require_bool(key, value);
  else if (key == "record_time") s.record_time = require_bool(key, value);
  else if (key == "out") s.out = value;
  else if (key == "time_budget_from") s.time_budget_from = value;
  else if (key == "inner_iters") s.inner_iters = require_size(key, value);
  else if (key == "prox_weight") s.prox_weight = require_double(key, value);
  else if (key == "inner_step") s.inner_step = require_double(key, value);
  else if (key == "dual_step") {
    if (value.empty()) s.dual_step.reset();
    else s.dual_step = require_double(key, value);
  } else throw InvalidArgument("unknown configuration key '" + key + "'");
}

RunSpec parse_config(std::istream& in) {
  RunSpec s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(line_no, "expected 'key = value'");
    try {
      set_field(s, line.substr(0, eq), line.substr(eq + 1));
    } catch (const InvalidArgument& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return s;
}

RunSpec read_config(const std::string& path) {
  auto f = open_in(path);
  try {
    return parse_config(f);
  } catch (const ParseError& e) {
    throw ParseError(path, e.line(), e.detail());
  }
}

std::string serialize(const RunSpec& s) {
  std::ostringstream o;
  auto opt = [](const auto& v) -> std::string {
    if (!v) return "";
    if constexpr (std::is_floating_point_v<std::decay_t<decltype(*v)>>) return shortest(*v);
    else return std::to_string(*v);
  };
  auto b = [](bool v) { return v ? "true" : "false"; };
  std::string grid;
  for (std::size_t i = 0; i < s.lambda_grid.size(); ++i)
    grid += (i ? "," : "") + shortest(s.lambda_grid[i]);
  o << "algo = " << to_string(s.algo) << '\n'
    << "dataset = " << s.dataset << '\n'
    << "problem = " << s.problem << '\n'
    << "quadeq = " << s.quadeq << '\n'
    << "quadeq_seed = " << s.quadeq_seed << '\n'
    << "lambda = " << shortest(s.lambda) << '\n'
    << "lambda_grid = " << grid << '\n'
    << "K = " << s.K << '\n'
    << "batch = " << (s.batch ? std::to_string(*s.batch) : "auto") << '\n'
    << "b0 = " << s.b0 << '\n'
    << "b0_scale = " << shortest(s.b0_scale) << '\n'
    << "preset = " << to_string(s.preset) << '\n'
    << "rho0 = " << shortest(s.rho0) << '\n'
    << "mu0 = " << shortest(s.mu0) << '\n'
    << "alpha0 = " << opt(s.alpha0) << '\n'
    << "gamma = " << opt(s.gamma) << '\n'
    << "beta = " << shortest(s.beta) << '\n'
    << "seed = " << s.seed << '\n'
    << "repeats = " << s.repeats << '\n'
    << "diag_stride = " << (s.diag_stride ? std::to_string(*s.diag_stride) : "auto") << '\n'
    << "normalize_rows = " << b(s.normalize_rows) << '\n'
    << "feasible_init = " << b(s.feasible_init) << '\n'
    << "record_time = " << b(s.record_time) << '\n'
    << "out = " << s.out << '\n'
    << "time_budget_from = " << s.time_budget_from << '\n'
    << "inner_iters = " << s.inner_iters << '\n'
    << "prox_weight = " << shortest(s.prox_weight) << '\n'
    << "inner_step = " << shortest(s.inner_step) << '\n'
    << "dual_step = " << opt(s.dual_step) << '\n';
  return o.str();
}

bool operator==(const RunSpec& a, const RunSpec& b) {
  auto tie = [](const RunSpec& s) {
    return std::tie(s.algo, s.dataset, s.problem, s.quadeq, s.quadeq_seed, s.lambda, s.lambda_grid,
                    s.K, s.batch, s.b0, s.b0_scale, s.preset, s.rho0, s.mu0, s.alpha0, s.gamma,
                    s.beta, s.seed, s.repeats, s.diag_stride, s.normalize_rows, s.feasible_init,
                    s.record_time, s.out, s.time_budget_from, s.inner_iters, s.prox_weight,
                    s.inner_step, s.dual_step);
  };
  return tie(a) == tie(b);
}

void check_compatibility(const RunSpec& s) {
  if (s.repeats == 0) throw InvalidArgument("repeats must be positive");
  if (s.K == 0 && s.time_budget_from.empty()) throw InvalidArgument("K must be positive");
  if (s.batch && *s.batch == 0) throw InvalidArgument("batch must be positive");
  if (s.b0 == 0) throw InvalidArgument("b0 must be positive");
  if (!(s.lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
  for (double l : s.lambda_grid)
    if (!(l >= 0.0)) throw InvalidArgument("lambda_grid values must be nonnegative");
  if (is_mossp(s.algo)) {
    const bool polyak_preset = s.preset == Preset::thm31 || s.preset == Preset::cor31;
    const bool storm_preset = s.preset == Preset::thm32 || s.preset == Preset::cor32;
    if (s.algo == Algorithm::mossp_p && storm_preset)
      throw InvalidArgument(std::string("preset ") + to_string(s.preset) +
                            " is a recursive-momentum schedule; use it with mossp_r");
    if (s.algo == Algorithm::mossp_r && polyak_preset)
      throw InvalidArgument(std::string("preset ") + to_string(s.preset) +
                            " is a Polyak-momentum schedule; use it with mossp_p");
    if (!s.time_budget_from.empty())
      throw InvalidArgument("time_budget_from applies to baseline algorithms only");
  } else {
    if (s.gamma) throw InvalidArgument("gamma applies to MoSSP Polyak presets only");
  }
  if (s.problem == "quadeq" && s.dataset.empty())
    throw InvalidArgument("the quadeq problem needs a dataset");
  if (s.problem == "logistic" && !s.quadeq.empty())
    throw InvalidArgument("a quadeq instance file was given for the logistic problem");
}

std::size_t effective_batch(const RunSpec& s, std::size_t N) {
  if (s.batch) return *s.batch;
  return N < 1000 ? 16 : 32;
}

SolverConfig solver_config(const RunSpec& s, std::size_t N) {
  SolverConfig c;
  c.variant = s.algo == Algorithm::mossp_r ? Variant::mossp_r : Variant::mossp_p;
  c.K = s.K;
  c.preset = s.preset;
  c.rho0 = s.rho0;
  c.mu0 = s.mu0;
  c.alpha0 = s.alpha0;
  c.gamma = s.gamma;
  c.beta = s.beta;
  c.batch = effective_batch(s, N);
  c.b0 = s.b0;
  c.b0_scale = s.b0_scale;
  c.seed = s.seed;
  c.diag_stride = s.diag_stride.value_or(50);
  c.feasible_init = s.feasible_init;
  c.record_time = s.record_time;
  return c;
}

BaselineConfig baseline_config(const RunSpec& s, std::size_t N) {
  BaselineConfig c;
  c.outer_K = s.K;
  c.inner_iters = s.inner_iters;
  c.rho = s.rho0;
  c.prox_weight = s.prox_weight;
  c.inner_step = s.inner_step;
  c.dual_step = s.dual_step;
  c.momentum = uses_recursive_momentum(s.algo) ? MomentumVariant::storm : MomentumVariant::polyak;
  c.alpha = s.alpha0;
  c.batch = effective_batch(s, N);
  c.b0 = s.b0;
  c.seed = s.seed;
  c.diag_stride = s.diag_stride.value_or(1);
  c.feasible_init = s.feasible_init;
  c.record_time = s.record_time;
  return c;
}

PenaltyConstants default_constants(double rho0) {
  // L_f = 1/4, G = ‖2x‖ bound 4 on ‖x‖ ≤ 2, C = 3, L_c = 2
  return PenaltyConstants::make(4.0, 3.0, 0.25, 2.0, rho0);
}

LoadedProblem load_problem(const RunSpec& s) {
  if (s.dataset.empty()) throw InvalidArgument("no dataset given");
  LoadedProblem lp;
  lp.data = load_dataset(s.dataset, s.normalize_rows);
  const std::size_t batch = effective_batch(s, lp.data.N());
  if (s.problem == "quadeq") {
    lp.quadeq = s.quadeq.empty() ? gen_quadeq(lp.data.n(), kDefaultQuadEqM, s.quadeq_seed)
                                 : read_quadeq(s.quadeq);
    lp.problem = quadeq_problem(lp.data, *lp.quadeq, s.lambda, batch, s.rho0, s.feasible_init);
  } else {
    lp.problem = logistic_problem(lp.data, s.lambda, batch, s.rho0);
  }
  return lp;
}

// ---- execution ---------------------------------------------------------------

bool ValidationReport::ok() const { return error.empty() && (!schedule || schedule->ok()); }

ValidationReport validate_config(const RunSpec& s) {
  ValidationReport rep;
  try {
    check_compatibility(s);
    if (is_mossp(s.algo)) {
      if (s.dataset.empty()) {
        rep.schedule = check_schedule(solver_config(s, 1000), default_constants(s.rho0));
      } else {
        const LoadedProblem lp = load_problem(s);
        rep.schedule = check_schedule(solver_config(s, lp.data.N()), lp.problem.constants);
      }
    } else {
      check_baseline_config(baseline_config(s, 1000));
    }
  } catch (const Error& e) {
    rep.error = e.what();
  }
  return rep;
}

double time_budget_from_metrics(const std::string& path) {
  const auto recs = read_metrics(path);
  if (recs.empty()) throw InvalidArgument("reference metrics file '" + path + "' has no records");
  const double t = recs.back().elapsed_s;
  if (!(t > 0.0))
    throw InvalidArgument("reference metrics file '" + path +
                          "' has no timing; produce it with record_time = true");
  return t;
}

RunResult execute(const RunSpec& s, const ProblemInstance& problem, std::uint64_t seed,
                  double time_budget_s) {
  if (is_mossp(s.algo)) {
    SolverConfig c = solver_config(s, 0);
    c.batch = problem.oracle.batch_size;
    c.seed = seed;
    return run(problem, c);
  }
  BaselineConfig c = baseline_config(s, 0);
  c.batch = problem.oracle.batch_size;
  c.seed = seed;
  c.time_budget_s = time_budget_s;
  if (time_budget_s > 0.0) c.record_time = true;
  if (s.algo == Algorithm::spdc_p || s.algo == Algorithm::spdc_r) return run_spdc(problem, c);
  return run_salm(problem, c);
}

RunResult solve(const RunSpec& s) {
  check_compatibility(s);
  const LoadedProblem lp = load_problem(s);
  const double budget = s.time_budget_from.empty() ? 0.0 : time_budget_from_metrics(s.time_budget_from);
  RunResult r = execute(s, lp.problem, s.seed, budget);
  if (!s.out.empty()) write_metrics(r.records, s.out);
  return r;
}

SummaryStats summarize(const std::vector<SummaryRow>& rows) {
  SummaryStats st;
  if (rows.empty()) return st;
  const double n = static_cast<double>(rows.size());
  auto stats = [&](auto get, double& mean, double& sd) {
    double sum = 0.0;
    for (const auto& r : rows) sum += get(r);
    mean = sum / n;
    double ss = 0.0;
    for (const auto& r : rows) ss += (get(r) - mean) * (get(r) - mean);
    sd = rows.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
  };
  stats([](const SummaryRow& r) { return r.objective; }, st.mean_objective, st.std_objective);
  stats([](const SummaryRow& r) { return r.feas; }, st.mean_feas, st.std_feas);
  stats([](const SummaryRow& r) { return r.violation_l1; }, st.mean_violation, st.std_violation);
  return st;
}

void write_summary(const std::vector<SummaryRow>& rows, const std::string& path) {
  auto f = open_out(path);
  f << "seed,objective,feas,violation_l1\n";
  for (const auto& r : rows)
    f << r.seed << ',' << format_double(r.objective) << ',' << format_double(r.feas) << ','
      << format_double(r.violation_l1) << '\n';
  const SummaryStats st = summarize(rows);
  f << "mean," << format_double(st.mean_objective) << ',' << format_double(st.mean_feas) << ','
    << format_double(st.mean_violation) << '\n';
  f << "std," << format_double(st.std_objective) << ',' << format_double(st.std_feas) << ','
    << format_double(st.std_violation) << '\n';
  finish_write(f, path);
}

std::vector<SummaryRow> read_summary_rows(const std::string& path) {
  auto f = open_in(path);
  std::string line;
  std::getline(f, line);
  if (trim(line) != "seed,objective,feas,violation_l1") throw ParseError(1, "missing summary header");
  std::vector<SummaryRow> rows;
  std::size_t line_no = 1;
  while (std::getline(f, line)) {
    ++line_no;
    std::vector<std::string> c;
    std::stringstream ss(trim(line));
    std::string cell;
    while (std::getline(ss, cell, ',')) c.push_back(cell);
    if (c.empty()) continue;
    if (c[0] == "mean" || c[0] == "std") continue;
    if (c.size() != 4) throw ParseError(line_no, "expected 4 columns");
    const auto seed = to_int<std::uint64_t>(c[0]);
    const auto o = to_double(c[1]), fe = to_double(c[2]), v = to_double(c[3]);
    if (!seed || !o || !fe || !v) throw ParseError(line_no, "non-numeric summary cell");
    rows.push_back({*seed, *o, *fe, *v});
  }
  return rows;
}

namespace {

BenchmarkOutput benchmark_one(const RunSpec& s, const ProblemInstance& problem, double budget,
                              const std::string& dir, unsigned threads) {
  fs::create_directories(dir);
  BenchmarkOutput out;
  out.lambda = problem.lambda;
  out.rows.resize(s.repeats);
  out.metric_files.resize(s.repeats);
  std::vector<std::exception_ptr> errors(s.repeats);
  std::size_t next = 0;
  std::mutex m;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(m);
        if (next == s.repeats) return;
        i = next++;
      }
      try {
        const std::uint64_t seed = s.seed + i;
        const RunResult r = execute(s, problem, seed, budget);
        const std::string path = (fs::path(dir) / ("seed_" + std::to_string(seed) + ".csv")).string();
        write_metrics(r.records, path);
        out.metric_files[i] = path;
        out.rows[i] = {seed, r.final_objective, r.final_feas, r.final_violation_l1};
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(threads ? threads : hw, s.repeats);
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  out.summary_file = (fs::path(dir) / "summary.csv").string();
  write_summary(out.rows, out.summary_file);
  out.stats = summarize(out.rows);
  return out;
}

}  // namespace

std::vector<BenchmarkOutput> benchmark(const RunSpec& s, unsigned threads) {
  check_compatibility(s);
  if (s.out.empty()) throw InvalidArgument("benchmark needs an output directory (--out)");
  const double budget = s.time_budget_from.empty() ? 0.0 : time_budget_from_metrics(s.time_budget_from);
  std::vector<BenchmarkOutput> outs;
  if (s.lambda_grid.empty()) {
    const LoadedProblem lp = load_problem(s);
    outs.push_back(benchmark_one(s, lp.problem, budget, s.out, threads));
    return outs;
  }
  for (double lambda : s.lambda_grid) {
    RunSpec one = s;
    one.lambda = lambda;
    const LoadedProblem lp = load_problem(one);
    const std::string dir = (fs::path(s.out) / ("lambda_" + shortest(lambda))).string();
    outs.push_back(benchmark_one(one, lp.problem, budget, dir, threads));
  }
  return outs;
}

}  // namespace mossp
