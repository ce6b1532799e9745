#pragma once

// CSV and JSON export of episode records and benchmark tables, with matching
// importers. CSV is UTF-8, comma separated, one header row, numbers printed
// with 17 significant digits so every double survives a round trip. JSON
// documents carry a top-level "schema_version" and a "kind" of "episode" or
// "benchmark".
//
// Episode CSV columns (one row per inner tick):
//   t, theta, theta_dot, theta_r, theta_dot_r, e_theta, e_theta_dot, u, u_r,
//   theta_set, cost [, V] [, K_hat_0, K_hat_1, k_u_hat]
// `cost` is only filled on agent-grid rows. Angles are in radians.
//
// Benchmark CSV columns (one row per variant):
//   variant, n_envs, n_ok, n_diverged, mean_avg_cost, se_avg_cost,
//   mean_total_cost, mean_avg_e_theta_sq_deg2, se_avg_e_theta_sq_deg2
// The e_theta^2 columns are in squared degrees.

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "mracrl/benchmark.hpp"
#include "mracrl/harness.hpp"

namespace mracrl {

enum class ExportFormat { kCsv, kJson };

inline constexpr int kSchemaVersion = 1;

ExportFormat format_from_string(std::string_view s);
/// From the file extension (.csv / .json).
ExportFormat format_from_path(const std::filesystem::path& path);

std::string record_to_csv(const EpisodeRecord& record);
EpisodeRecord record_from_csv(std::string_view text);
std::string record_to_json(const EpisodeRecord& record);
EpisodeRecord record_from_json(std::string_view text);

std::string table_to_csv(const BenchmarkTable& table);
/// CSV carries only the per-variant summary rows.
std::vector<VariantSummary> table_rows_from_csv(std::string_view text);
std::string table_to_json(const BenchmarkTable& table);
BenchmarkTable table_from_json(std::string_view text);

void export_results(const EpisodeRecord& record, ExportFormat format,
                    const std::filesystem::path& path);
void export_results(const BenchmarkTable& table, ExportFormat format,
                    const std::filesystem::path& path);

EpisodeRecord import_record(const std::filesystem::path& path, ExportFormat format);
/// JSON restores the whole table; CSV restores `rows` only.
BenchmarkTable import_table(const std::filesystem::path& path, ExportFormat format);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace mracrl
