#include "mapf/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

namespace mapf::bench {

namespace fs = std::filesystem;

std::string Configuration::label() const
{
    return std::string(name(variant)) + (headon ? "+h" : "");
}

const std::string& csv_header()
{
    static const std::string header =
        "instance,map,k,variant,headon,outcome,cost,runtime_s,expanded,generated,low_level_calls,seed";
    return header;
}

namespace {

std::string clean_field(std::string s)
{
    std::replace(s.begin(), s.end(), ',', '_');
    return s;
}

std::string format_double(double value)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

std::vector<std::string> split_fields(const std::string& line, char sep)
{
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, sep))
        fields.push_back(field);
    if (!line.empty() && line.back() == sep)
        fields.emplace_back();
    return fields;
}

Outcome parse_outcome(const std::string& s)
{
    for (Outcome o : {Outcome::Solved, Outcome::Timeout, Outcome::Unsolvable})
        if (name(o) == s)
            return o;
    throw ParseError("unknown outcome '" + s + "'");
}

template <typename T>
T parse_number(const std::string& s, const char* what)
{
    try {
        std::size_t used = 0;
        T value;
        if constexpr (std::is_same_v<T, double>)
            value = std::stod(s, &used);
        else if constexpr (std::is_same_v<T, std::uint64_t>)
            value = std::stoull(s, &used);
        else
            value = static_cast<T>(std::stoll(s, &used));
        if (used != s.size())
            throw ParseError("");
        return value;
    } catch (const std::exception&) {
        throw ParseError(std::string("bad ") + what + " field '" + s + "'");
    }
}

std::string strip(std::string line)
{
    while (!line.empty() && (line.back() == '\r' || line.back() == ' '))
        line.pop_back();
    return line;
}

}  // namespace

std::string to_csv_row(const RunRecord& r)
{
    std::ostringstream os;
    os << clean_field(r.instance) << ',' << clean_field(r.map) << ',' << r.k << ',' << name(r.variant) << ','
       << (r.headon ? "on" : "off") << ',' << name(r.outcome) << ',';
    if (r.cost)
        os << *r.cost;
    os << ',' << format_double(r.runtime_s) << ',' << r.expanded << ',' << r.generated << ',' << r.low_level_calls
       << ',' << r.seed;
    return os.str();
}

RunRecord parse_csv_row(const std::string& line)
{
    auto f = split_fields(strip(line), ',');
    if (f.size() != 12)
        throw ParseError("CSV row needs 12 fields, got " + std::to_string(f.size()) + ": " + line);
    RunRecord r;
    r.instance = f[0];
    r.map = f[1];
    r.k = parse_number<int>(f[2], "k");
    auto variant = parse_variant(f[3]);
    if (!variant)
        throw ParseError("unknown variant '" + f[3] + "'");
    r.variant = *variant;
    if (f[4] != "on" && f[4] != "off")
        throw ParseError("headon must be on/off, got '" + f[4] + "'");
    r.headon = f[4] == "on";
    r.outcome = parse_outcome(f[5]);
    if (!f[6].empty())
        r.cost = parse_number<int>(f[6], "cost");
    if (r.outcome == Outcome::Solved && !r.cost)
        throw ParseError("solved row without a cost: " + line);
    r.runtime_s = parse_number<double>(f[7], "runtime_s");
    r.expanded = parse_number<long>(f[8], "expanded");
    r.generated = parse_number<long>(f[9], "generated");
    r.low_level_calls = parse_number<long>(f[10], "low_level_calls");
    r.seed = parse_number<std::uint64_t>(f[11], "seed");
    return r;
}

std::vector<RunRecord> read_csv(std::istream& in)
{
    std::vector<RunRecord> rows;
    bool header_seen = false;
    for (std::string line; std::getline(in, line);) {
        line = strip(line);
        if (line.empty() || line.front() == '#')
            continue;
        if (!header_seen) {
            if (line != csv_header())
                throw ParseError("CSV header mismatch: " + line);
            header_seen = true;
            continue;
        }
        rows.push_back(parse_csv_row(line));
    }
    if (!header_seen)
        throw ParseError("CSV has no header");
    return rows;
}

std::vector<ManifestEntry> read_manifest(std::istream& in)
{
    std::vector<ManifestEntry> entries;
    for (std::string line; std::getline(in, line);) {
        line = strip(line);
        if (line.empty() || line.front() == '#')
            continue;
        auto f = split_fields(line, '\t');
        if (f.empty() || f[0].empty())
            throw ParseError("bad manifest line: " + line);
        ManifestEntry e;
        e.path = f[0];
        e.map = f.size() > 1 ? f[1] : fs::path(f[0]).stem().string();
        e.seed = f.size() > 2 ? parse_number<std::uint64_t>(f[2], "seed") : 0;
        entries.push_back(std::move(e));
    }
    return entries;
}

void write_manifest(std::ostream& out, const std::vector<ManifestEntry>& entries)
{
    for (const auto& e : entries)
        out << e.path << '\t' << e.map << '\t' << e.seed << '\n';
}

std::vector<ManifestEntry> generate(const GenOptions& o)
{
    if (o.count < 0)
        throw InvalidInstance("instance count must be non-negative");
    fs::create_directories(o.out_dir);

    std::optional<GridMap> fixed_map;
    std::string map_name;
    switch (o.source) {
    case MapSource::File: {
        std::ifstream in(o.map_file);
        if (!in)
            throw std::runtime_error("cannot open map file " + o.map_file);
        fixed_map = parse_map(in);
        map_name = fs::path(o.map_file).stem().string();
        break;
    }
    case MapSource::Warehouse:
        fixed_map = generate_warehouse_map(o.shelf_rows, o.shelf_cols, o.shelf_length, o.side_columns);
        map_name = "warehouse-" + std::to_string(fixed_map->width()) + "x" + std::to_string(fixed_map->height());
        break;
    case MapSource::Random: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "random-%dx%d-%.2f", o.width, o.height, o.obstacle_ratio);
        map_name = buf;
        break;
    }
    }

    std::vector<ManifestEntry> entries;
    for (int i = 0; i < o.count; ++i) {
        std::uint64_t seed = o.seed + static_cast<std::uint64_t>(i);
        std::optional<Instance> instance;
        if (o.source == MapSource::Random)
            instance = generate_instance(generate_random_map(o.width, o.height, o.obstacle_ratio, seed), o.k, seed);
        else if (o.source == MapSource::Warehouse)
            instance = generate_warehouse_instance(*fixed_map, o.k, o.side_columns, seed);
        else
            instance = generate_instance(*fixed_map, o.k, seed);

        char name_buf[32];
        std::snprintf(name_buf, sizeof name_buf, "_%04d.txt", i);
        std::string file = o.prefix + name_buf;
        save_instance(*instance, (fs::path(o.out_dir) / file).string());
        entries.push_back({file, map_name, seed});
    }
    std::ofstream manifest(fs::path(o.out_dir) / "manifest.txt", std::ios::binary);
    if (!manifest)
        throw std::runtime_error("cannot write manifest in " + o.out_dir);
    write_manifest(manifest, entries);
    return entries;
}

RunRecord make_record(const Instance& instance, const std::string& instance_id, const std::string& map_name,
                      std::uint64_t seed, const SearchConfig& config, const SearchResult& res)
{
    RunRecord r;
    r.instance = instance_id;
    r.map = map_name;
    r.k = instance.agent_count();
    r.variant = config.variant;
    r.headon = config.headon;
    r.outcome = res.outcome;
    r.cost = res.stats.solution_cost;
    r.runtime_s = res.stats.runtime;
    r.expanded = res.stats.expanded;
    r.generated = res.stats.generated;
    r.low_level_calls = res.stats.low_level_calls;
    r.seed = seed;
    return r;
}

RunRecord run_one(const Instance& instance, const std::string& instance_id, const std::string& map_name,
                  std::uint64_t seed, const SearchConfig& config)
{
    SearchConfig cfg = config;
    cfg.seed = seed;
    return make_record(instance, instance_id, map_name, seed, cfg, search(instance, cfg));
}

std::vector<RunRecord> run_bench(const std::vector<ManifestEntry>& manifest, const BenchOptions& options)
{
    const std::size_t configs = options.configurations.size();
    std::vector<std::optional<Instance>> instances(manifest.size());
    for (std::size_t i = 0; i < manifest.size(); ++i) {
        fs::path p(manifest[i].path);
        if (p.is_relative())
            p = fs::path(options.base_dir) / p;
        try {
            instances[i] = load_instance(p.string());
        } catch (const std::exception&) {
            // recorded as an unsolvable row below
        }
    }

    std::vector<RunRecord> records(manifest.size() * configs);
    auto run_cell = [&](std::size_t cell) {
        const std::size_t i = cell / configs;
        const Configuration& c = options.configurations[cell % configs];
        const std::string id = fs::path(manifest[i].path).stem().string();
        if (!instances[i]) {
            RunRecord r;
            r.instance = id;
            r.map = manifest[i].map;
            r.variant = c.variant;
            r.headon = c.headon;
            r.outcome = Outcome::Unsolvable;
            r.seed = manifest[i].seed;
            records[cell] = r;
            return;
        }
        SearchConfig cfg;
        cfg.variant = c.variant;
        cfg.headon = c.headon;
        cfg.time_limit = options.time_limit;
        records[cell] = run_one(*instances[i], id, manifest[i].map, manifest[i].seed, cfg);
    };

    const std::size_t cells = records.size();
    unsigned workers = options.serial ? 1u : std::max(1u, std::thread::hardware_concurrency());
    if (workers <= 1 || cells <= 1) {
        for (std::size_t c = 0; c < cells; ++c)
            run_cell(c);
        return records;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < std::min<std::size_t>(workers, cells); ++w)
        pool.emplace_back([&] {
            for (std::size_t c; (c = next.fetch_add(1)) < cells;)
                run_cell(c);
        });
    for (auto& t : pool)
        t.join();
    return records;
}

namespace {

std::vector<Configuration> configurations_in_order(const std::vector<RunRecord>& records)
{
    std::vector<Configuration> out;
    for (const auto& r : records)
        if (std::find(out.begin(), out.end(), r.configuration()) == out.end())
            out.push_back(r.configuration());
    return out;
}

// Instance ids solved by every configuration that appears in `records`.
std::set<std::string> common_solved(const std::vector<RunRecord>& records)
{
    auto configs = configurations_in_order(records);
    std::map<std::string, std::set<Configuration>> solved_by;
    for (const auto& r : records)
        if (r.outcome == Outcome::Solved)
            solved_by[r.instance].insert(r.configuration());
    std::set<std::string> common;
    for (const auto& [id, set] : solved_by)
        if (set.size() == configs.size())
            common.insert(id);
    return common;
}

}  // namespace

std::vector<Summary> summarize(const std::vector<RunRecord>& records)
{
    const auto common = common_solved(records);
    std::vector<Summary> out;
    for (const Configuration& c : configurations_in_order(records)) {
        Summary s;
        s.configuration = c;
        double runtime = 0.0;
        double expanded = 0.0;
        for (const auto& r : records) {
            if (r.configuration() != c)
                continue;
            ++s.runs;
            if (r.outcome == Outcome::Solved)
                ++s.solved;
            if (r.outcome == Outcome::Solved && common.contains(r.instance)) {
                ++s.common;
                runtime += r.runtime_s;
                expanded += static_cast<double>(r.expanded);
            }
        }
        s.success_rate = s.runs ? static_cast<double>(s.solved) / s.runs : 0.0;
        if (s.common > 0) {
            s.mean_runtime_s = runtime / s.common;
            s.mean_expanded = expanded / s.common;
        }
        out.push_back(s);
    }
    return out;
}

void write_bench_csv(std::ostream& out, const std::vector<RunRecord>& records)
{
    out << csv_header() << '\n';
    for (const auto& r : records)
        out << to_csv_row(r) << '\n';
    for (const Summary& s : summarize(records)) {
        out << "# summary variant=" << name(s.configuration.variant)
            << " headon=" << (s.configuration.headon ? "on" : "off") << " runs=" << s.runs << " solved=" << s.solved
            << " success_rate=" << format_double(s.success_rate) << " common=" << s.common
            << " mean_runtime_s=" << (s.mean_runtime_s ? format_double(*s.mean_runtime_s) : "NA")
            << " mean_expanded=" << (s.mean_expanded ? format_double(*s.mean_expanded) : "NA") << '\n';
    }
}

std::vector<PlotRow> plot_data(const std::vector<RunRecord>& records)
{
    std::map<int, std::vector<RunRecord>> by_k;
    for (const auto& r : records)
        by_k[r.k].push_back(r);
    const auto configs = configurations_in_order(records);

    std::vector<PlotRow> rows;
    for (const auto& [k, group] : by_k) {
        const auto common = common_solved(group);

        for (const Configuration& c : configs) {
            PlotRow row;
            row.k = k;
            row.configuration = c;
            double runtime = 0.0;
            int solved = 0;
            for (const auto& r : group) {
                if (r.configuration() != c)
                    continue;
                ++row.runs;
                if (r.outcome != Outcome::Solved)
                    continue;
                ++solved;
                if (common.contains(r.instance)) {
                    ++row.common;
                    runtime += r.runtime_s;
                }
            }
            if (row.runs == 0)
                continue;
            row.success_rate = static_cast<double>(solved) / row.runs;
            if (row.common > 0)
                row.mean_runtime_common = runtime / row.common;
            rows.push_back(row);
        }
    }
    return rows;
}

std::string format_plot(const std::vector<PlotRow>& rows)
{
    std::ostringstream os;
    os << "k\tconfiguration\truns\tsuccess_rate\tcommon\tmean_runtime_common\n";
    for (const auto& r : rows) {
        os << r.k << '\t' << r.configuration.label() << '\t' << r.runs << '\t' << format_double(r.success_rate)
           << '\t' << r.common << '\t' << (r.mean_runtime_common ? format_double(*r.mean_runtime_common) : "NA")
           << '\n';
    }
    return os.str();
}

}  // namespace mapf::bench
