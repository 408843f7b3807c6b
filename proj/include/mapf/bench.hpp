#pragma once

#include "mapf/ct_search.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace mapf::bench {

struct Configuration {
    Variant variant = Variant::Cg;
    bool headon = false;

    std::string label() const;
    friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

struct RunRecord {
    std::string instance;
    std::string map;
    int k = 0;
    Variant variant = Variant::Cg;
    bool headon = false;
    Outcome outcome = Outcome::Unsolvable;
    std::optional<int> cost;
    double runtime_s = 0.0;
    long expanded = 0;
    long generated = 0;
    long low_level_calls = 0;
    std::uint64_t seed = 0;

    Configuration configuration() const { return {variant, headon}; }
};

/// instance,map,k,variant,headon,outcome,cost,runtime_s,expanded,generated,low_level_calls,seed
const std::string& csv_header();
std::string to_csv_row(const RunRecord& record);
RunRecord parse_csv_row(const std::string& line);
/// Rows of a bench CSV; the header and '#' summary lines are skipped.
std::vector<RunRecord> read_csv(std::istream& in);

struct ManifestEntry {
    std::string path;  // relative to the manifest's directory unless absolute
    std::string map;
    std::uint64_t seed = 0;
};

std::vector<ManifestEntry> read_manifest(std::istream& in);
void write_manifest(std::ostream& out, const std::vector<ManifestEntry>& entries);

enum class MapSource : std::uint8_t { Random, File, Warehouse };

struct GenOptions {
    MapSource source = MapSource::Random;
    int width = 20;
    int height = 20;
    double obstacle_ratio = 0.3;
    std::string map_file;  // MovingAI .map when source == File
    int shelf_rows = 5;
    int shelf_cols = 2;
    int shelf_length = 6;
    int side_columns = 5;
    int k = 1;
    int count = 1;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
    std::string prefix = "inst";
};

/// Writes `count` instance files and `manifest.txt` into out_dir; instance i uses seed + i.
std::vector<ManifestEntry> generate(const GenOptions& options);

RunRecord make_record(const Instance& instance, const std::string& instance_id, const std::string& map_name,
                      std::uint64_t seed, const SearchConfig& config, const SearchResult& result);

RunRecord run_one(const Instance& instance, const std::string& instance_id, const std::string& map_name,
                  std::uint64_t seed, const SearchConfig& config);

struct BenchOptions {
    std::vector<Configuration> configurations;
    double time_limit = 10.0;
    bool serial = false;
    std::string base_dir = ".";  // for relative manifest paths
};

/// One record per (instance, configuration), ordered instance-major. Unreadable instances
/// produce an "unsolvable" row with zero counters and the run continues.
std::vector<RunRecord> run_bench(const std::vector<ManifestEntry>& manifest, const BenchOptions& options);

struct Summary {
    Configuration configuration;
    int runs = 0;
    int solved = 0;
    double success_rate = 0.0;
    int common = 0;  // instances solved by every configuration
    std::optional<double> mean_runtime_s;
    std::optional<double> mean_expanded;
};

/// Per-configuration aggregates; means are over the instances every configuration solved.
std::vector<Summary> summarize(const std::vector<RunRecord>& records);

/// Header, rows, then one "# summary ..." line per configuration when there are rows.
void write_bench_csv(std::ostream& out, const std::vector<RunRecord>& records);

struct PlotRow {
    int k = 0;
    Configuration configuration;
    int runs = 0;
    double success_rate = 0.0;
    int common = 0;
    std::optional<double> mean_runtime_common;
};

/// One row per (k, configuration); the common subset is taken within each k.
std::vector<PlotRow> plot_data(const std::vector<RunRecord>& records);
std::string format_plot(const std::vector<PlotRow>& rows);

}  // namespace mapf::bench
