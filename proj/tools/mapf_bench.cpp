#include "mapf/bench.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace mapf;

namespace {

constexpr int kExitSolved = 0;
constexpr int kExitError = 1;
constexpr int kExitTimeout = 2;
constexpr int kExitUnsolvable = 3;

std::string data_dir()
{
    const char* env = std::getenv("MAPF_DATA_DIR");
    return env && *env ? env : ".";
}

// Relative paths that do not exist as given are looked up under MAPF_DATA_DIR.
std::string resolve(const std::string& path)
{
    fs::path p(path);
    if (p.is_absolute() || fs::exists(p))
        return path;
    return (fs::path(data_dir()) / p).string();
}

std::vector<std::string> split_list(const std::string& text)
{
    std::vector<std::string> out;
    std::stringstream ss(text);
    for (std::string item; std::getline(ss, item, ',');)
        if (!item.empty())
            out.push_back(item);
    return out;
}

bool parse_on_off(const std::string& s)
{
    if (s == "on")
        return true;
    if (s == "off")
        return false;
    throw CLI::ValidationError("--headon", "expected on or off, got '" + s + "'");
}

Variant parse_variant_or_throw(const std::string& s)
{
    auto v = parse_variant(s);
    if (!v)
        throw CLI::ValidationError("--variant", "expected cbs, icbs or cg, got '" + s + "'");
    return *v;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Optimal multi-agent path finding: conflict-based search with head-on conflict splitting"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "Generate instance files and a manifest");
    bench::GenOptions g;
    g.out_dir = data_dir();
    std::vector<double> random_spec;
    std::string map_file;
    bool warehouse = false;
    gen->add_option("--random", random_spec, "Random maps: WIDTH HEIGHT OBSTACLE_RATIO")->expected(3);
    gen->add_option("--map", map_file, "MovingAI .map file shared by all instances");
    gen->add_flag("--warehouse", warehouse, "Warehouse map with agents crossing between the side bands");
    gen->add_option("--shelf-rows", g.shelf_rows);
    gen->add_option("--shelf-cols", g.shelf_cols);
    gen->add_option("--shelf-length", g.shelf_length);
    gen->add_option("--side-columns", g.side_columns);
    gen->add_option("-k,--agents", g.k, "Agents per instance")->required();
    gen->add_option("--count", g.count, "Number of instances")->default_val(1);
    gen->add_option("--seed", g.seed, "Base seed; instance i uses seed + i")->default_val(0);
    gen->add_option("--out", g.out_dir, "Output directory (default: $MAPF_DATA_DIR or .)");
    gen->add_option("--prefix", g.prefix, "Instance file prefix")->default_val("inst");

    // solve
    auto* solve = app.add_subcommand("solve", "Solve one instance and print the solution and a CSV record");
    std::string instance_file;
    std::string scen_file;
    int scen_agents = 0;
    std::string variant_text = "cg";
    std::string headon_text = "on";
    bool unsafe = false;
    double time_limit = 10.0;
    std::uint64_t seed = 0;
    int horizon = 0;
    std::string trace_file;
    solve->add_option("instance", instance_file, "Instance file (or a MovingAI map with --scen)")->required();
    solve->add_option("--scen", scen_file, "MovingAI scenario; the positional argument is then a .map");
    solve->add_option("--scen-agents", scen_agents, "Use only the first N scenario rows");
    solve->add_option("--variant", variant_text, "cbs, icbs or cg")->default_val("cg");
    solve->add_option("--headon", headon_text, "on or off")->default_val("on");
    solve->add_flag("--unsafe-two-way-vertex", unsafe, "Split head-on vertex conflicts into two children (not optimal)");
    solve->add_option("--time-limit", time_limit, "Seconds")->default_val(10.0);
    solve->add_option("--seed", seed, "Seed for plain CBS conflict choice")->default_val(0);
    solve->add_option("--horizon", horizon, "Maximum path cost (0: free cells x agents)")->default_val(0);
    solve->add_option("--trace", trace_file, "Write the conflict-tree trace log to this file");

    // bench
    auto* benchcmd = app.add_subcommand("bench", "Run configurations over a manifest and write CSV");
    std::string manifest_file;
    std::string variants_text = "cg";
    std::string headons_text = "off,on";
    double bench_limit = 10.0;
    std::string out_csv;
    bool serial = false;
    benchcmd->add_option("manifest", manifest_file, "Manifest written by gen")->required();
    benchcmd->add_option("--variant", variants_text, "Comma-separated variants")->default_val("cg");
    benchcmd->add_option("--headon", headons_text, "Comma-separated on/off settings")->default_val("off,on");
    benchcmd->add_option("--time-limit", bench_limit, "Seconds per run")->default_val(10.0);
    benchcmd->add_option("--out", out_csv, "CSV output file (default: stdout)");
    benchcmd->add_flag("--serial", serial, "Run one search at a time");

    // plotdata
    auto* plot = app.add_subcommand("plotdata", "Success rate and common-subset runtime per k and configuration");
    std::string csv_file;
    plot->add_option("csv", csv_file, "CSV written by bench")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            int sources = int{!random_spec.empty()} + int{!map_file.empty()} + int{warehouse};
            if (sources > 1)
                throw CLI::ValidationError("gen", "choose one of --random, --map, --warehouse");
            if (!map_file.empty()) {
                g.source = bench::MapSource::File;
                g.map_file = resolve(map_file);
            } else if (warehouse) {
                g.source = bench::MapSource::Warehouse;
            } else {
                g.source = bench::MapSource::Random;
                if (random_spec.size() == 3) {
                    g.width = static_cast<int>(random_spec[0]);
                    g.height = static_cast<int>(random_spec[1]);
                    g.obstacle_ratio = random_spec[2];
                }
            }
            auto entries = bench::generate(g);
            std::cout << "wrote " << entries.size() << " instances to " << g.out_dir << '\n';
            return kExitSolved;
        }

        if (solve->parsed()) {
            std::optional<Instance> instance;
            if (!scen_file.empty()) {
                std::ifstream map_in(resolve(instance_file));
                if (!map_in)
                    throw std::runtime_error("cannot open map " + instance_file);
                GridMap map = parse_map(map_in);
                std::ifstream scen_in(resolve(scen_file));
                if (!scen_in)
                    throw std::runtime_error("cannot open scenario " + scen_file);
                auto agents = parse_scen(scen_in, map);
                if (scen_agents > 0 && static_cast<std::size_t>(scen_agents) < agents.size())
                    agents.resize(static_cast<std::size_t>(scen_agents));
                instance.emplace(std::move(map), std::move(agents));
            } else {
                instance = load_instance(resolve(instance_file));
            }

            SearchConfig cfg;
            cfg.variant = parse_variant_or_throw(variant_text);
            cfg.headon = parse_on_off(headon_text);
            cfg.two_way_vertex_unsafe = unsafe;
            cfg.time_limit = time_limit;
            cfg.horizon = horizon;
            std::ofstream trace;
            if (!trace_file.empty()) {
                trace.open(trace_file);
                if (!trace)
                    throw std::runtime_error("cannot open trace file " + trace_file);
                cfg.trace = &trace;
            }
            cfg.seed = seed;
            std::string id = fs::path(instance_file).stem().string();
            auto result = search(*instance, cfg);
            auto rec = bench::make_record(*instance, id, id, seed, cfg, result);
            if (result.solution)
                std::cout << format_solution(*result.solution);
            std::cout << bench::to_csv_row(rec) << '\n';
            switch (rec.outcome) {
            case Outcome::Solved: return kExitSolved;
            case Outcome::Timeout: return kExitTimeout;
            case Outcome::Unsolvable: return kExitUnsolvable;
            }
        }

        if (benchcmd->parsed()) {
            std::string path = resolve(manifest_file);
            std::ifstream in(path);
            if (!in)
                throw std::runtime_error("cannot open manifest " + manifest_file);
            auto manifest = bench::read_manifest(in);
            bench::BenchOptions opts;
            for (const auto& v : split_list(variants_text))
                for (const auto& h : split_list(headons_text))
                    opts.configurations.push_back({parse_variant_or_throw(v), parse_on_off(h)});
            opts.time_limit = bench_limit;
            opts.serial = serial;
            opts.base_dir = fs::path(path).parent_path().string();
            if (opts.base_dir.empty())
                opts.base_dir = ".";
            auto records = bench::run_bench(manifest, opts);
            if (out_csv.empty()) {
                bench::write_bench_csv(std::cout, records);
            } else {
                std::ofstream out(out_csv);
                if (!out)
                    throw std::runtime_error("cannot write " + out_csv);
                bench::write_bench_csv(out, records);
            }
            return kExitSolved;
        }

        if (plot->parsed()) {
            std::ifstream in(resolve(csv_file));
            if (!in)
                throw std::runtime_error("cannot open " + csv_file);
            std::cout << bench::format_plot(bench::plot_data(bench::read_csv(in)));
            return kExitSolved;
        }
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitError;
    }
    return kExitError;
}
