#include "gmfr/io.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <sstream>

#include "gmfr/errors.hpp"
#include "gmfr/rng.hpp"

namespace gmfr::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  return out;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput("cannot read " + path.string());
  return in;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void parse_error(const fs::path& path, std::size_t line, const std::string& what) {
  throw InvalidInput(path.string() + ":" + std::to_string(line) + ": " + what);
}

double to_double(std::string_view s, const fs::path& path, std::size_t line) {
  double v = 0.0;
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) parse_error(path, line, "expected a number, got '" + std::string(s) + "'");
  if (!std::isfinite(v)) parse_error(path, line, "non-finite value");
  return v;
}

std::size_t to_id(std::string_view s, const fs::path& path, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v == 0)
    parse_error(path, line, "expected a positive integer id, got '" + std::string(s) + "'");
  return v;
}

// Calls row(fields, line_number) for each data line; skips blanks and a header
// whose first field is not numeric.
template <class F>
void for_each_row(const fs::path& path, std::size_t expected_fields, F&& row) {
  std::ifstream in = open_in(path);
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    auto fields = split(t, ',');
    if (first) {
      first = false;
      const auto f0 = fields[0];
      if (!f0.empty() && !(f0.front() >= '0' && f0.front() <= '9')) continue;
    }
    if (fields.size() != expected_fields)
      parse_error(path, lineno, "expected " + std::to_string(expected_fields) + " fields, got " + std::to_string(fields.size()));
    row(fields, lineno);
  }
}

}  // namespace

void write_curves_csv(const fs::path& path, const CurveSet& curves) {
  std::ofstream out = open_out(path);
  out << "sample_id,covariate_id,t,value\n";
  const auto& grid = curves.grid();
  for (std::size_t n = 0; n < curves.num_samples(); ++n)
    for (std::size_t j = 0; j < curves.num_covariates(); ++j) {
      const auto c = curves.curve(n, j);
      for (Eigen::Index i = 0; i < grid.size(); ++i)
        out << n + 1 << ',' << j + 1 << ',' << format_double(grid[i]) << ',' << format_double(c[i]) << '\n';
    }
  if (!out) throw InvalidInput("failed writing " + path.string());
}

CurveTable read_curves_csv(const fs::path& path) {
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::pair<double, double>>> curves;
  std::size_t n_max = 0, p_max = 0;
  for_each_row(path, 4, [&](const auto& f, std::size_t line) {
    const std::size_t n = to_id(f[0], path, line);
    const std::size_t j = to_id(f[1], path, line);
    curves[{n, j}].emplace_back(to_double(f[2], path, line), to_double(f[3], path, line));
    n_max = std::max(n_max, n);
    p_max = std::max(p_max, j);
  });
  if (curves.empty()) throw InvalidInput(path.string() + ": no curve rows");
  if (curves.size() != n_max * p_max)
    throw InvalidInput(path.string() + ": expected every (sample, covariate) pair up to " + std::to_string(n_max) + " x " +
                       std::to_string(p_max));
  CurveTable table;
  table.num_samples = n_max;
  table.num_covariates = p_max;
  bool have_grid = false;
  for (auto& [key, pts] : curves) {
    std::sort(pts.begin(), pts.end());
    const auto t = static_cast<Eigen::Index>(pts.size());
    if (!have_grid) {
      table.grid.resize(t);
      for (Eigen::Index i = 0; i < t; ++i) table.grid[i] = pts[static_cast<std::size_t>(i)].first;
      validate_grid(table.grid);
      table.values.resize(static_cast<Eigen::Index>(n_max * p_max), t);
      have_grid = true;
    }
    if (t != table.grid.size()) throw InvalidInput(path.string() + ": curves are not on a shared grid");
    const auto row = static_cast<Eigen::Index>((key.first - 1) * p_max + (key.second - 1));
    for (Eigen::Index i = 0; i < t; ++i) {
      if (pts[static_cast<std::size_t>(i)].first != table.grid[i]) throw InvalidInput(path.string() + ": curves are not on a shared grid");
      table.values(row, i) = pts[static_cast<std::size_t>(i)].second;
    }
  }
  return table;
}

CurveSet make_curve_set(CurveTable table, Eigen::VectorXd responses) {
  return CurveSet(std::move(table.grid), table.num_samples, table.num_covariates, std::move(table.values),
                  std::move(responses));
}

void write_scores_csv(const fs::path& path, const ScoreMatrix& scores) {
  std::ofstream out = open_out(path);
  out << "sample_id,covariate_id,d,score\n";
  for (std::size_t n = 0; n < scores.num_samples(); ++n)
    for (std::size_t j = 0; j < scores.num_covariates(); ++j)
      for (std::size_t d = 0; d < scores.dimension(); ++d)
        out << n + 1 << ',' << j + 1 << ',' << d + 1 << ',' << format_double(scores(n, j, d)) << '\n';
  if (!out) throw InvalidInput("failed writing " + path.string());
}

ScoreMatrix read_scores_csv(const fs::path& path) {
  struct Entry {
    std::size_t n, j, d;
    double v;
  };
  std::vector<Entry> entries;
  std::size_t n_max = 0, p_max = 0, d_max = 0;
  for_each_row(path, 4, [&](const auto& f, std::size_t line) {
    Entry e{to_id(f[0], path, line), to_id(f[1], path, line), to_id(f[2], path, line), to_double(f[3], path, line)};
    n_max = std::max(n_max, e.n);
    p_max = std::max(p_max, e.j);
    d_max = std::max(d_max, e.d);
    entries.push_back(e);
  });
  if (entries.empty()) throw InvalidInput(path.string() + ": no score rows");
  Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(n_max), static_cast<Eigen::Index>(p_max * d_max),
                                                   std::numeric_limits<double>::quiet_NaN());
  for (const auto& e : entries) {
    double& slot = flat(static_cast<Eigen::Index>(e.n - 1), static_cast<Eigen::Index>((e.j - 1) * d_max + (e.d - 1)));
    if (!std::isnan(slot)) throw InvalidInput(path.string() + ": duplicate score entry");
    slot = e.v;
  }
  if (!flat.allFinite()) throw InvalidInput(path.string() + ": missing score entries");
  return ScoreMatrix(p_max, d_max, std::move(flat));
}

void write_responses_csv(const fs::path& path, const Eigen::VectorXd& y) {
  std::ofstream out = open_out(path);
  out << "sample_id,y\n";
  for (Eigen::Index n = 0; n < y.size(); ++n) out << n + 1 << ',' << format_double(y[n]) << '\n';
  if (!out) throw InvalidInput("failed writing " + path.string());
}

Eigen::VectorXd read_responses_csv(const fs::path& path) {
  std::map<std::size_t, double> vals;
  for_each_row(path, 2, [&](const auto& f, std::size_t line) {
    const std::size_t n = to_id(f[0], path, line);
    if (!vals.emplace(n, to_double(f[1], path, line)).second) parse_error(path, line, "duplicate sample id");
  });
  if (vals.empty()) throw InvalidInput(path.string() + ": no response rows");
  if (vals.rbegin()->first != vals.size()) throw InvalidInput(path.string() + ": sample ids must be 1..N without gaps");
  Eigen::VectorXd y(static_cast<Eigen::Index>(vals.size()));
  for (const auto& [n, v] : vals) y[static_cast<Eigen::Index>(n - 1)] = v;
  return y;
}

void write_partition(const fs::path& path, const GroupingStructure& g) {
  std::ofstream out = open_out(path);
  for (const auto& b : g.blocks()) {
    for (std::size_t i = 0; i < b.size(); ++i) out << (i ? "," : "") << b[i] + 1;
    out << '\n';
  }
  if (!out) throw InvalidInput("failed writing " + path.string());
}

GroupingStructure parse_partition(std::string_view text, std::size_t p) {
  std::vector<std::vector<std::size_t>> blocks;
  std::size_t start = 0;
  std::size_t lineno = 0;
  while (start <= text.size()) {
    std::size_t pos = text.find_first_of(";\n", start);
    const std::string_view part = trim(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    ++lineno;
    if (!part.empty()) {
      std::vector<std::size_t> block;
      for (auto f : split(part, ',')) block.push_back(to_id(f, "partition", lineno) - 1);
      blocks.push_back(std::move(block));
    }
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  if (blocks.empty()) throw InvalidInput("partition is empty");
  return GroupingStructure(std::move(blocks), p);
}

GroupingStructure read_partition(const fs::path& path, std::size_t p) {
  std::ifstream in = open_in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_partition(ss.str(), p);
}

std::string file_checksum(const fs::path& path) {
  std::ifstream in = open_in(path);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  char buf[1 << 14];
  while (in.read(buf, sizeof buf) || in.gcount() > 0) {
    for (std::streamsize i = 0; i < in.gcount(); ++i) {
      h ^= static_cast<unsigned char>(buf[i]);
      h *= 0x100000001b3ULL;
    }
  }
  char out[17];
  std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
  return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
  if (!j.is_array()) throw InvalidInput("expected a matrix (array of rows)");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(r)].size()) != cols) throw InvalidInput("ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)].get<double>();
  }
  return m;
}

json grouping_to_json(const GroupingStructure& g) {
  json blocks = json::array();
  for (const auto& b : g.blocks()) {
    json block = json::array();
    for (std::size_t j : b) block.push_back(j + 1);
    blocks.push_back(std::move(block));
  }
  return blocks;
}

GroupingStructure grouping_from_json(const json& j, std::size_t p) {
  std::vector<std::vector<std::size_t>> blocks;
  for (const auto& b : j) {
    std::vector<std::size_t> block;
    for (const auto& v : b) {
      const auto id = v.get<long long>();
      if (id < 1) throw InvalidInput("partition ids are 1-based");
      block.push_back(static_cast<std::size_t>(id - 1));
    }
    blocks.push_back(std::move(block));
  }
  return GroupingStructure(std::move(blocks), p);
}

namespace {

json vector_to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const json& j) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = j[i].get<double>();
  return v;
}

}  // namespace

json to_json(const GroupedModel& model) {
  return json{{"groups", grouping_to_json(model.delta)},
              {"num_groups", model.delta.num_groups()},
              {"intercept", model.beta0},
              {"scale_coefficients", vector_to_json(model.f)},
              {"templates", matrix_to_json(model.A)},
              {"normalization_constants", vector_to_json(model.c)},
              {"coefficient_rows", matrix_to_json(model.coefficient_rows())},
              {"converged", model.converged},
              {"iterations", model.iterations},
              {"objective_trace", model.objective_trace},
              {"max_jitter", model.max_jitter},
              {"warnings", model.warnings}};
}

GroupedModel grouped_model_from_json(const json& j) {
  GroupedModel m;
  m.f = vector_from_json(j.at("scale_coefficients"));
  m.delta = grouping_from_json(j.at("groups"), static_cast<std::size_t>(m.f.size()));
  m.beta0 = j.at("intercept").get<double>();
  m.A = matrix_from_json(j.at("templates"));
  m.c = vector_from_json(j.at("normalization_constants"));
  m.converged = j.value("converged", false);
  m.iterations = j.value("iterations", 0);
  m.objective_trace = j.value("objective_trace", std::vector<double>{});
  m.max_jitter = j.value("max_jitter", 0.0);
  m.warnings = j.value("warnings", std::vector<std::string>{});
  return m;
}

json to_json(const PathPoint& pt) {
  json j{{"lambda", pt.lambda}, {"ok", pt.ok}};
  if (!pt.ok) {
    j["error"] = pt.error;
    return j;
  }
  j["groups"] = grouping_to_json(pt.grouping);
  j["num_groups"] = pt.grouping.num_groups();
  j["iterations"] = pt.iterations;
  j["converged"] = pt.converged;
  j["primal_residual"] = pt.primal_residual;
  j["change"] = pt.change;
  j["coefficients"] = matrix_to_json(pt.B);
  j["normalized_misalignment"] = matrix_to_json(pt.normalized);
  return j;
}

json to_json(const MccvResult& r) {
  return json{{"mean_rmse", r.mean},
              {"sd_rmse", r.sd},
              {"skipped", r.skipped},
              {"replicate_rmse", r.replicate_rmse},
              {"warnings", r.warnings}};
}

json to_json(const CVReport& report) {
  json cands = json::array();
  for (const auto& c : report.candidates) {
    json sources = json::array();
    for (const auto& [l, t] : c.sources) sources.push_back(json::array({l, t}));
    json jc{{"groups", grouping_to_json(c.delta)},
            {"num_groups", c.delta.num_groups()},
            {"lambda", c.lambda},
            {"tilde_lambda", c.tilde_lambda},
            {"sources", sources},
            {"failed", c.failed}};
    if (c.failed) {
      jc["error"] = c.error;
    } else {
      jc["mccv"] = to_json(c.cv);
    }
    cands.push_back(std::move(jc));
  }
  const auto& best = report.best();
  return json{{"reps", report.reps},
              {"seed", report.seed},
              {"rng", std::string(Rng::kName)},
              {"train_size", report.train_size},
              {"test_size", report.test_size},
              {"selected",
               {{"index", report.selected},
                {"groups", grouping_to_json(best.delta)},
                {"lambda", best.lambda},
                {"tilde_lambda", best.tilde_lambda},
                {"mean_rmse", best.cv.mean}}},
              {"candidates", cands},
              {"warnings", report.warnings}};
}

json to_json(const BaselineReport& report) {
  json methods = json::array();
  for (const auto& m : report.methods) {
    json jm{{"method", m.name}, {"mccv", to_json(m.cv)}};
    jm["groups"] = m.delta ? grouping_to_json(*m.delta) : json(nullptr);
    methods.push_back(std::move(jm));
  }
  return json{{"evaluation_seed", report.evaluation_seed},
              {"nested_selection", report.nested},
              {"methods", methods}, {"selection", to_json(report.selection)}};
}

json Manifest::to_json() const {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char stamp[32];
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  json in = json::array();
  for (const auto& [p, c] : inputs) in.push_back({{"path", p}, {"fnv1a64", c}});
  json j{{"command", command}, {"version", std::string(kVersion)}, {"created", stamp}, {"config", config}, {"inputs", in}};
  if (has_seed) {
    j["seed"] = seed;
    j["rng"] = std::string(Rng::kName);
  }
  return j;
}

void write_result(const fs::path& path, const Manifest& manifest, const json& body) {
  json doc{{"schema_version", kSchemaVersion}, {"manifest", manifest.to_json()}};
  for (auto it = body.begin(); it != body.end(); ++it) doc[it.key()] = it.value();
  std::ofstream out = open_out(path);
  out << doc.dump(2) << '\n';
  if (!out) throw InvalidInput("failed writing " + path.string());
}

json read_json(const fs::path& path) {
  std::ifstream in = open_in(path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidInput(path.string() + ": " + e.what());
  }
}

}  // namespace gmfr::io
