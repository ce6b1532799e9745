#include "mracrl/export.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace mracrl {

using nlohmann::json;

namespace {

const char* const kRecordColumns[] = {"t",           "theta", "theta_dot", "theta_r",
                                      "theta_dot_r", "e_theta", "e_theta_dot", "u",
                                      "u_r",         "theta_set", "cost"};

const char* const kTableColumns[] = {
    "variant",         "n_envs",      "n_ok",
    "n_diverged",      "mean_avg_cost", "se_avg_cost",
    "mean_total_cost", "mean_avg_e_theta_sq_deg2", "se_avg_e_theta_sq_deg2"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!line.empty()) out.push_back(line);
    start = end + 1;
  }
  return out;
}

double parse_double(const std::string& s, std::size_t offset) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ParseError("bad number '" + s + "'", offset);
  return v;
}

std::size_t parse_count(const std::string& s, std::size_t offset) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("bad count '" + s + "'", offset);
  }
  return v;
}

json vectors_to_json(const std::vector<Vector>& vs) {
  json arr = json::array();
  for (const auto& v : vs) arr.push_back(std::vector<double>(v.data(), v.data() + v.size()));
  return arr;
}

std::vector<Vector> vectors_from_json(const json& arr) {
  std::vector<Vector> out;
  for (const auto& item : arr) {
    const auto v = item.get<std::vector<double>>();
    out.push_back(Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())));
  }
  return out;
}

json summary_to_json(const MetricsSummary& s) {
  return {{"avg_cost", s.avg_cost},
          {"total_cost", s.total_cost},
          {"avg_e_theta_sq_deg2", s.avg_e_theta_sq_deg},
          {"peak_abs_e_theta_rad", s.peak_abs_e_theta}};
}

MetricsSummary summary_from_json(const json& j) {
  return {j.at("avg_cost").get<double>(), j.at("total_cost").get<double>(),
          j.at("avg_e_theta_sq_deg2").get<double>(), j.at("peak_abs_e_theta_rad").get<double>()};
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), e.byte);
  }
}

void check_header(const json& j, const char* kind) {
  if (!j.is_object() || !j.contains("schema_version")) {
    throw SchemaError("missing schema_version");
  }
  if (j.at("schema_version").get<int>() != kSchemaVersion) {
    throw SchemaError("unsupported schema_version " + j.at("schema_version").dump());
  }
  if (j.value("kind", std::string()) != kind) {
    throw SchemaError(std::string("expected a document of kind '") + kind + "'");
  }
}

}  // namespace

ExportFormat format_from_string(std::string_view s) {
  if (s == "csv") return ExportFormat::kCsv;
  if (s == "json") return ExportFormat::kJson;
  throw ArgumentError("unknown export format '" + std::string(s) + "' (expected csv|json)");
}

ExportFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  if (ext.empty()) throw ArgumentError("cannot infer export format from '" + path.string() + "'");
  return format_from_string(ext.substr(1));
}

std::string record_to_csv(const EpisodeRecord& r) {
  std::ostringstream out;
  for (std::size_t c = 0; c < std::size(kRecordColumns); ++c) {
    out << (c ? "," : "") << kRecordColumns[c];
  }
  const bool has_v = !r.V.empty();
  const bool has_gains = !r.K_hat.empty();
  if (has_v) out << ",V";
  if (has_gains) out << ",K_hat_0,K_hat_1,k_u_hat";
  out << '\n';

  const std::size_t n = r.size();
  const std::size_t stride = r.costs.empty() ? 0 : n / r.costs.size();
  for (std::size_t k = 0; k < n; ++k) {
    out << fmt(r.times[k]) << ',' << fmt(r.x[k](0)) << ',' << fmt(r.x[k](1)) << ','
        << fmt(r.x_r[k](0)) << ',' << fmt(r.x_r[k](1)) << ',' << fmt(r.e[k](0)) << ','
        << fmt(r.e[k](1)) << ',' << fmt(r.u[k]) << ',' << fmt(r.u_r[k]) << ','
        << fmt(r.theta_set[k]) << ',';
    if (stride > 0 && k % stride == 0 && k / stride < r.costs.size()) {
      out << fmt(r.costs[k / stride]);
    }
    if (has_v) out << ',' << fmt(r.V[k]);
    if (has_gains) {
      out << ',' << fmt(r.K_hat[k](0)) << ',' << fmt(r.K_hat[k](1)) << ',' << fmt(r.k_u_hat[k]);
    }
    out << '\n';
  }
  return out.str();
}

EpisodeRecord record_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("episode CSV: empty document", 0);
  const auto header = split(lines[0]);
  if (header.size() < std::size(kRecordColumns)) {
    throw SchemaError("episode CSV: header has too few columns");
  }
  for (std::size_t c = 0; c < std::size(kRecordColumns); ++c) {
    if (header[c] != kRecordColumns[c]) {
      throw SchemaError("episode CSV: expected column '" + std::string(kRecordColumns[c]) +
                        "', got '" + header[c] + "'");
    }
  }
  std::size_t col = std::size(kRecordColumns);
  const bool has_v = header.size() > col && header[col] == "V";
  if (has_v) ++col;
  const bool has_gains = header.size() > col && header[col] == "K_hat_0";
  if (has_gains) col += 3;
  if (header.size() != col) throw SchemaError("episode CSV: unexpected trailing columns");

  EpisodeRecord r;
  std::size_t offset = lines[0].size() + 1;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li]);
    if (f.size() != header.size()) throw ParseError("episode CSV: ragged row", offset);
    const auto d = [&](std::size_t i) { return parse_double(f[i], offset); };
    Vector x(2), xr(2), e(2);
    x << d(1), d(2);
    xr << d(3), d(4);
    e << d(5), d(6);
    r.times.push_back(d(0));
    r.x.push_back(x);
    r.x_r.push_back(xr);
    r.e.push_back(e);
    r.u.push_back(d(7));
    r.u_r.push_back(d(8));
    r.theta_set.push_back(d(9));
    if (!f[10].empty()) r.costs.push_back(d(10));
    std::size_t next = 11;
    if (has_v) r.V.push_back(d(next++));
    if (has_gains) {
      Vector K(2);
      K << d(next), d(next + 1);
      r.K_hat.push_back(K);
      r.k_u_hat.push_back(d(next + 2));
    }
    offset += lines[li].size() + 1;
  }
  r.summary = compute_metrics(r);
  return r;
}

std::string record_to_json(const EpisodeRecord& r) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "episode";
  j["times"] = r.times;
  j["x"] = vectors_to_json(r.x);
  j["x_r"] = vectors_to_json(r.x_r);
  j["u"] = r.u;
  j["u_r"] = r.u_r;
  j["e"] = vectors_to_json(r.e);
  j["theta_set"] = r.theta_set;
  j["costs"] = r.costs;
  if (!r.V.empty()) j["V"] = r.V;
  if (!r.K_hat.empty()) {
    j["K_hat"] = vectors_to_json(r.K_hat);
    j["k_u_hat"] = r.k_u_hat;
  }
  j["summary"] = summary_to_json(r.summary);
  return j.dump(1);
}

EpisodeRecord record_from_json(std::string_view text) {
  const json j = parse_json(text);
  check_header(j, "episode");
  try {
    EpisodeRecord r;
    r.times = j.at("times").get<std::vector<double>>();
    r.x = vectors_from_json(j.at("x"));
    r.x_r = vectors_from_json(j.at("x_r"));
    r.u = j.at("u").get<std::vector<double>>();
    r.u_r = j.at("u_r").get<std::vector<double>>();
    r.e = vectors_from_json(j.at("e"));
    r.theta_set = j.at("theta_set").get<std::vector<double>>();
    r.costs = j.at("costs").get<std::vector<double>>();
    if (j.contains("V")) r.V = j.at("V").get<std::vector<double>>();
    if (j.contains("K_hat")) {
      r.K_hat = vectors_from_json(j.at("K_hat"));
      r.k_u_hat = j.at("k_u_hat").get<std::vector<double>>();
    }
    r.summary = summary_from_json(j.at("summary"));
    return r;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("episode JSON: ") + e.what());
  }
}

std::string table_to_csv(const BenchmarkTable& table) {
  std::ostringstream out;
  for (std::size_t c = 0; c < std::size(kTableColumns); ++c) {
    out << (c ? "," : "") << kTableColumns[c];
  }
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.name << ',' << row.n_envs << ',' << row.n_ok << ',' << row.n_diverged << ','
        << fmt(row.mean_avg_cost) << ',' << fmt(row.se_avg_cost) << ','
        << fmt(row.mean_total_cost) << ',' << fmt(row.mean_avg_e_theta_sq_deg) << ','
        << fmt(row.se_avg_e_theta_sq_deg) << '\n';
  }
  return out.str();
}

std::vector<VariantSummary> table_rows_from_csv(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty()) throw ParseError("benchmark CSV: empty document", 0);
  const auto header = split(lines[0]);
  if (header.size() != std::size(kTableColumns)) {
    throw SchemaError("benchmark CSV: wrong column count");
  }
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (header[c] != kTableColumns[c]) throw SchemaError("benchmark CSV: bad header " + header[c]);
  }
  std::vector<VariantSummary> rows;
  std::size_t offset = lines[0].size() + 1;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const auto f = split(lines[li]);
    if (f.size() != header.size()) throw ParseError("benchmark CSV: ragged row", offset);
    VariantSummary s;
    s.name = f[0];
    s.n_envs = parse_count(f[1], offset);
    s.n_ok = parse_count(f[2], offset);
    s.n_diverged = parse_count(f[3], offset);
    s.mean_avg_cost = parse_double(f[4], offset);
    s.se_avg_cost = parse_double(f[5], offset);
    s.mean_total_cost = parse_double(f[6], offset);
    s.mean_avg_e_theta_sq_deg = parse_double(f[7], offset);
    s.se_avg_e_theta_sq_deg = parse_double(f[8], offset);
    rows.push_back(std::move(s));
    offset += lines[li].size() + 1;
  }
  return rows;
}

std::string table_to_json(const BenchmarkTable& table) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["kind"] = "benchmark";
  j["form"] = std::string(to_string(table.form));
  j["master_seed"] = table.master_seed;
  j["e_theta_sq_units"] = "deg^2";
  json envs = json::array();
  for (const auto& env : table.envs) envs.push_back(json::parse(env_to_jsonl(env)));
  j["envs"] = envs;
  json rows = json::array();
  for (std::size_t v = 0; v < table.rows.size(); ++v) {
    const auto& r = table.rows[v];
    json cells = json::array();
    if (v < table.cells.size()) {
      for (const auto& c : table.cells[v]) {
        json cj = {{"env_index", c.env_index}, {"diverged", c.diverged}};
        if (c.diverged) {
          cj["error"] = c.error;
        } else {
          cj["metrics"] = summary_to_json(c.metrics);
        }
        cells.push_back(cj);
      }
    }
    rows.push_back({{"variant", r.name},
                    {"n_envs", r.n_envs},
                    {"n_ok", r.n_ok},
                    {"n_diverged", r.n_diverged},
                    {"mean_avg_cost", r.mean_avg_cost},
                    {"se_avg_cost", r.se_avg_cost},
                    {"mean_total_cost", r.mean_total_cost},
                    {"mean_avg_e_theta_sq_deg2", r.mean_avg_e_theta_sq_deg},
                    {"se_avg_e_theta_sq_deg2", r.se_avg_e_theta_sq_deg},
                    {"cells", cells}});
  }
  j["variants"] = rows;
  return j.dump(1);
}

BenchmarkTable table_from_json(std::string_view text) {
  const json j = parse_json(text);
  check_header(j, "benchmark");
  try {
    BenchmarkTable t;
    t.form = form_from_string(j.at("form").get<std::string>());
    t.master_seed = j.at("master_seed").get<std::uint64_t>();
    for (const auto& e : j.at("envs")) t.envs.push_back(env_from_jsonl(e.dump()));
    for (const auto& r : j.at("variants")) {
      VariantSummary s;
      s.name = r.at("variant").get<std::string>();
      s.n_envs = r.at("n_envs").get<std::size_t>();
      s.n_ok = r.at("n_ok").get<std::size_t>();
      s.n_diverged = r.at("n_diverged").get<std::size_t>();
      s.mean_avg_cost = r.at("mean_avg_cost").get<double>();
      s.se_avg_cost = r.at("se_avg_cost").get<double>();
      s.mean_total_cost = r.at("mean_total_cost").get<double>();
      s.mean_avg_e_theta_sq_deg = r.at("mean_avg_e_theta_sq_deg2").get<double>();
      s.se_avg_e_theta_sq_deg = r.at("se_avg_e_theta_sq_deg2").get<double>();
      t.rows.push_back(std::move(s));
      std::vector<CellResult> cells;
      for (const auto& cj : r.at("cells")) {
        CellResult c;
        c.env_index = cj.at("env_index").get<std::size_t>();
        c.diverged = cj.at("diverged").get<bool>();
        if (c.diverged) {
          c.error = cj.at("error").get<std::string>();
        } else {
          c.metrics = summary_from_json(cj.at("metrics"));
        }
        cells.push_back(std::move(c));
      }
      t.cells.push_back(std::move(cells));
    }
    return t;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("benchmark JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw IoError("write failed for " + path.string());
}

void export_results(const EpisodeRecord& record, ExportFormat format,
                    const std::filesystem::path& path) {
  write_file(path, format == ExportFormat::kCsv ? record_to_csv(record) : record_to_json(record));
}

void export_results(const BenchmarkTable& table, ExportFormat format,
                    const std::filesystem::path& path) {
  write_file(path, format == ExportFormat::kCsv ? table_to_csv(table) : table_to_json(table));
}

EpisodeRecord import_record(const std::filesystem::path& path, ExportFormat format) {
  const auto text = read_file(path);
  return format == ExportFormat::kCsv ? record_from_csv(text) : record_from_json(text);
}

BenchmarkTable import_table(const std::filesystem::path& path, ExportFormat format) {
  const auto text = read_file(path);
  if (format == ExportFormat::kJson) return table_from_json(text);
  BenchmarkTable t;
  t.rows = table_rows_from_csv(text);
  return t;
}

}  // namespace mracrl
