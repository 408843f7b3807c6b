// Acceptance suite. Prints one PASS/FAIL line per criterion and exits non-zero if any fails.

#include "mapf/ct_search.hpp"
#include "mapf/mdd.hpp"
#include "mapf/oracle.hpp"
#include "fixtures.hpp"
#include "split_check.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace mapf;

namespace {

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct SuiteInstance {
    std::string id;
    Instance instance;
    int optimum = 0;
};

constexpr int kSuiteSize = 200;

std::vector<SuiteInstance> random_suite()
{
    static const double ratios[] = {0.0, 0.15, 0.3};
    std::vector<SuiteInstance> suite;
    for (std::uint64_t seed = 0; static_cast<int>(suite.size()) < kSuiteSize; ++seed) {
        int width = 4 + static_cast<int>(seed % 3);
        int height = 4 + static_cast<int>(seed / 3 % 3);
        double ratio = ratios[seed / 9 % 3];
        int k = seed % 4 == 0 ? 2 : 3;
        GridMap map = generate_random_map(width, height, ratio, seed);
        if (static_cast<int>(largest_component(map).size()) < k)
            continue;
        Instance inst = generate_instance(map, k, seed);
        auto opt = oracle::joint_optimal(inst);
        if (!opt)
            continue;
        std::ostringstream id;
        id << "seed" << seed << '-' << width << 'x' << height << "-k" << k;
        suite.push_back({id.str(), std::move(inst), opt->sum_of_costs});
    }
    return suite;
}

std::vector<SearchConfig> all_configs()
{
    std::vector<SearchConfig> out;
    for (Variant v : {Variant::Cbs, Variant::Icbs, Variant::Cg})
        for (bool h : {false, true}) {
            SearchConfig c;
            c.variant = v;
            c.headon = h;
            c.time_limit = 60.0;
            out.push_back(c);
        }
    return out;
}

std::string label(const SearchConfig& c) { return std::string(name(c.variant)) + (c.headon ? "+h" : ""); }

// Counters gathered while running the random suite under every configuration.
struct SuiteTally {
    long runs = 0;
    long optimal = 0;
    std::vector<std::string> mismatches;

    long theorem_checks = 0;
    long theorem_pruned = 0;
    std::vector<std::string> theorem_violations;

    long shortcut_checks = 0;
    std::vector<std::string> shortcut_violations;

    long standard_children = 0;
    long headon_children = 0;
    std::vector<std::string> increase_violations;
    std::map<int, long> edge_increments;  // head-on agent's increase in edge head-on children
};

void theorem_check(CbsSolver& solver, const CTNode& node, SuiteTally& tally, const std::string& where)
{
    for (const ClassifiedConflict& cc : node.conflicts) {
        if (!cc.cls.cardinal())
            continue;
        for (int side = 0; side < 2; ++side) {
            if (!cc.cls.headon_for[static_cast<std::size_t>(side)])
                continue;
            ++tally.theorem_checks;
            SplitPlan single{{standard_split(cc.conflict).sets[static_cast<std::size_t>(side)]}};
            auto kids = solver.split(node, single);
            if (kids.empty()) {
                ++tally.theorem_pruned;
                continue;
            }
            Conflict predicted = predicted_conflict(cc.conflict, side, cc.cls);
            bool present = occurs_in(predicted, kids.front().solution);
            bool cardinal = present && solver.classify_in(kids.front(), predicted).cardinal();
            if (!present || !cardinal)
                tally.theorem_violations.push_back(where + " " + to_string(cc.conflict) + " side " +
                                                   std::to_string(side) + (present ? " not cardinal" : " absent"));
        }
    }
}

void shortcut_check(CbsSolver& solver, const CTNode& node, SuiteTally& tally, const std::string& where)
{
    for (const ClassifiedConflict& cc : node.conflicts) {
        if (!cc.cls.cardinal())
            continue;
        for (int side = 0; side < 2; ++side) {
            if (has_constraints(node.constraints, cc.conflict.agent(side)))
                continue;
            if (!solver.headon().condition2(cc.conflict, side, node.constraints, node.solution))
                continue;
            ++tally.shortcut_checks;
            if (!solver.headon().condition3_replan(cc.conflict, side, node.constraints, node.solution))
                tally.shortcut_violations.push_back(where + " " + to_string(cc.conflict) + " side " +
                                                    std::to_string(side));
        }
    }
}

void increase_check(const SearchResult& result, SuiteTally& tally, const std::string& where)
{
    for (const SplitRecord& rec : result.splits) {
        if (!rec.cls.cardinal())
            continue;
        for (const ChildRecord& child : rec.children) {
            if (child.pruned)
                continue;
            if (rec.kind == SplitKind::Standard) {
                ++tally.standard_children;
                if (child.cost < rec.node_cost + 1)
                    tally.increase_violations.push_back(where + " standard child " + child.label + " of " +
                                                        to_string(rec.conflict));
                continue;
            }
            // The head-on agent's own child: N_i1/N_j1 for vertex conflicts, the delayed N_i/N_j for edges.
            const bool vertex = rec.conflict.is_vertex();
            int side = -1;
            if (child.label == (vertex ? "N_i1" : "N_i"))
                side = 0;
            else if (child.label == (vertex ? "N_j1" : "N_j"))
                side = 1;
            if (side < 0 || !rec.cls.headon_for[static_cast<std::size_t>(side)])
                continue;
            const int agent = rec.conflict.agent(side);
            int before = rec.path_costs[static_cast<std::size_t>(agent)];
            int after = before;
            for (auto [a, c] : child.replanned)
                if (a == agent)
                    after = c;
            if (rec.conflict.is_vertex()) {
                ++tally.headon_children;
                if (after < before + 2)
                    tally.increase_violations.push_back(where + " " + child.label + " of " + to_string(rec.conflict) +
                                                        " raised the head-on agent by " +
                                                        std::to_string(after - before));
            } else {
                ++tally.edge_increments[after - before];
            }
        }
    }
}

SuiteTally run_random_suite(const std::vector<SuiteInstance>& suite)
{
    SuiteTally tally;
    for (const SuiteInstance& item : suite) {
        for (SearchConfig cfg : all_configs()) {
            const std::string where = item.id + " " + label(cfg);
            cfg.record_splits = true;
            cfg.on_expand = [&](CbsSolver& solver, const CTNode& node) {
                if (cfg.headon)
                    theorem_check(solver, node, tally, where);
                shortcut_check(solver, node, tally, where);
            };
            SearchResult r = search(item.instance, cfg);
            ++tally.runs;
            bool ok = r.outcome == Outcome::Solved && r.stats.solution_cost == item.optimum &&
                      detect_conflicts(*r.solution).empty();
            if (ok)
                ++tally.optimal;
            else
                tally.mismatches.push_back(where + " outcome=" + std::string(name(r.outcome)) + " cost=" +
                                           (r.stats.solution_cost ? std::to_string(*r.stats.solution_cost) : "-") +
                                           " optimum=" + std::to_string(item.optimum));
            increase_check(r, tally, where);
        }
    }
    return tally;
}

std::string first_of(const std::vector<std::string>& list)
{
    return list.empty() ? "" : "; first: " + list.front();
}

// --- criterion 2 -------------------------------------------------------------

Instance edge_corridor() { return parse_instance("2 4\n....\n@.@@\n0 0 0 3\n0 3 0 0\n"); }

Verdict split_completeness(const std::vector<SuiteInstance>& suite)
{
    long rules = 0;
    long pairs = 0;
    long conflict_free = 0;
    long counterexamples = 0;
    std::string first;
    auto check = [&](const Instance& inst, const Conflict& c, const ConflictClass& base, const std::string& where) {
        for (int mask = 0; mask < 4; ++mask) {
            ConflictClass cls = base;
            cls.headon_for = {(mask & 1) != 0, (mask & 2) != 0};
            if (c.is_vertex() && mask != 0 && !cls.v_pre)
                continue;
            auto r = testing::check_split(inst, c, {}, constraint_sets_for(c, cls), 3);
            ++rules;
            pairs += r.pairs;
            conflict_free += r.conflict_free;
            counterexamples += r.counterexamples;
            if (r.counterexamples && first.empty())
                first = where + " flags " + std::to_string(mask) + " " + to_string(c);
        }
    };

    ConflictClass cardinal;
    cardinal.cardinality = Cardinality::Cardinal;
    ConflictClass fix_a_cls = cardinal;
    fix_a_cls.v_pre = Location{0, 1};
    fix_a_cls.v_post = Location{0, 3};
    check(fixtures::fix_a(), Conflict::vertex(0, 1, {0, 2}, 2), fix_a_cls, "FIX-A");
    check(edge_corridor(), Conflict::edge(0, 1, {0, 1}, {0, 2}, 2), cardinal, "edge corridor");

    // Cardinal root conflicts of the first suite instances serve as further fixtures.
    int fixtures_used = 2;
    for (const SuiteInstance& item : suite) {
        if (fixtures_used >= 40)
            break;
        SearchConfig cfg;
        CbsSolver solver(item.instance, cfg);
        auto root = solver.make_root();
        solver.evaluate(*root);
        bool used = false;
        for (const ClassifiedConflict& cc : root->conflicts) {
            if (!cc.cls.cardinal())
                continue;
            ConflictClass base = cardinal;
            base.v_pre = cc.cls.v_pre;
            base.v_post = cc.cls.v_post;
            Conflict c = cc.conflict;
            // Only the two conflicting agents matter; renumber them 0 and 1.
            std::vector<AgentSpec> pair{item.instance.agent(c.a1), item.instance.agent(c.a2)};
            pair[0].id = 0;
            pair[1].id = 1;
            Instance two(item.instance.map(), pair);
            c.a1 = 0;
            c.a2 = 1;
            check(two, c, base, item.id);
            used = true;
        }
        fixtures_used += used;
    }

    std::ostringstream d;
    d << rules << " split rules on " << fixtures_used << " fixtures, " << pairs << " path pairs, " << conflict_free
      << " conflict-free, " << counterexamples << " counterexamples" << (first.empty() ? "" : "; first: " + first);
    return {"Split completeness", counterexamples == 0 && rules > 0 && conflict_free > 0, d.str()};
}

// --- criterion 6 -------------------------------------------------------------

struct TrendStats {
    int common = 0;
    int strictly_lower = 0;
    double median_off = 0;
    double median_on = 0;
};

double median(std::vector<long> v)
{
    if (v.empty())
        return 0;
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    return n % 2 ? static_cast<double>(v[n / 2]) : (static_cast<double>(v[n / 2 - 1]) + static_cast<double>(v[n / 2])) / 2.0;
}

TrendStats compare_headon(const std::vector<Instance>& instances)
{
    TrendStats s;
    std::vector<long> off;
    std::vector<long> on;
    for (const Instance& inst : instances) {
        SearchConfig c;
        c.variant = Variant::Cg;
        c.time_limit = 10.0;
        c.headon = false;
        SearchResult r_off = search(inst, c);
        c.headon = true;
        SearchResult r_on = search(inst, c);
        if (r_off.outcome != Outcome::Solved || r_on.outcome != Outcome::Solved)
            continue;
        ++s.common;
        off.push_back(r_off.stats.expanded);
        on.push_back(r_on.stats.expanded);
        s.strictly_lower += r_on.stats.expanded < r_off.stats.expanded;
    }
    s.median_off = median(off);
    s.median_on = median(on);
    return s;
}

Verdict trend()
{
    // Narrow warehouse: three shelf rows give four horizontal aisles that agents share in both directions.
    const int side = 3;
    GridMap warehouse = generate_warehouse_map(3, 2, 6, side);
    std::vector<Instance> corridor;
    for (int i = 0; i < 30; ++i)
        corridor.push_back(generate_warehouse_instance(warehouse, 4 + i % 5, side, 1000 + static_cast<std::uint64_t>(i)));
    TrendStats c = compare_headon(corridor);

    std::vector<Instance> open;
    GridMap empty(20, 20);
    for (int i = 0; i < 30; ++i)
        open.push_back(generate_instance(empty, 10 + i % 11, 1000 + static_cast<std::uint64_t>(i)));
    TrendStats e = compare_headon(open);

    bool corridor_ok = c.common > 0 && c.median_on <= c.median_off && 3 * c.strictly_lower >= c.common;
    double denom = std::max(e.median_off, e.median_on);
    double rel = denom > 0 ? std::abs(e.median_on - e.median_off) / denom : 0.0;
    bool empty_ok = e.common > 0 && rel < 0.10;

    std::ostringstream d;
    d << "warehouse " << warehouse.width() << 'x' << warehouse.height() << ": common=" << c.common
      << " median off=" << c.median_off << " on=" << c.median_on << " strictly lower on " << c.strictly_lower
      << "; empty 20x20: common=" << e.common << " median off=" << e.median_off << " on=" << e.median_on
      << " relative difference=" << rel;
    return {"Trend reproduction", corridor_ok && empty_ok, d.str()};
}

// --- criterion 7 -------------------------------------------------------------

Verdict mdd_exactness()
{
    std::mt19937_64 rng(2024);
    long comparisons = 0;
    long mismatches = 0;
    long nonempty = 0;
    for (std::uint64_t seed = 0; seed < 400; ++seed) {
        int w = 3 + static_cast<int>(rng() % 6);
        int h = 3 + static_cast<int>(rng() % 6);
        GridMap m = generate_random_map(w, h, static_cast<double>(rng() % 4) * 0.1, seed);
        auto cells = largest_component(m);
        Location s = cells[rng() % cells.size()];
        Location g = cells[rng() % cells.size()];
        int agent = static_cast<int>(rng() % 3);
        std::vector<Constraint> cs;
        int n = static_cast<int>(rng() % 9);
        for (int i = 0; i < n; ++i) {
            Location v = cells[rng() % cells.size()];
            int t = static_cast<int>(rng() % 10);
            auto succ = m.successors(v);
            Location u = succ[rng() % succ.size()];
            int who = rng() % 5 == 0 ? (agent + 1) % 3 : agent;
            cs.push_back(u != v && rng() % 2 ? Constraint::edge(who, u, v, std::max(1, t)) : Constraint::vertex(who, v, t));
        }
        ConstraintTable table(cs);
        DistanceMap dist(m, g);
        int d = dist(m, s);
        for (int c = d; c <= std::min(d + 3, oracle::kMaxEnumerationCost); ++c) {
            auto paths = oracle::enumerate_paths(m, s, g, c, table, agent);
            auto mdd = build_mdd(m, {agent, s, g}, c, table, dist);
            ++comparisons;
            if (mdd.has_value() != !paths.empty()) {
                ++mismatches;
                continue;
            }
            if (!mdd)
                continue;
            ++nonempty;
            for (int t = 0; t <= c; ++t) {
                std::vector<Location> level;
                for (const Path& p : paths)
                    level.push_back(p.at(t));
                std::sort(level.begin(), level.end());
                level.erase(std::unique(level.begin(), level.end()), level.end());
                if (level != mdd->locations(t)) {
                    ++mismatches;
                    break;
                }
            }
        }
    }
    std::ostringstream out;
    out << comparisons << " (map, constraints, cost) cases, " << nonempty << " non-empty MDDs, " << mismatches
        << " mismatches";
    return {"MDD exactness", mismatches == 0 && nonempty > 0, out.str()};
}

// --- criterion 8 -------------------------------------------------------------

Verdict cg_admissibility(const std::vector<SuiteInstance>& suite)
{
    long positive = 0;
    std::vector<std::string> violations;
    for (const SuiteInstance& item : suite) {
        SearchConfig cfg;
        cfg.variant = Variant::Cg;
        CbsSolver solver(item.instance, cfg);
        auto root = solver.make_root();
        solver.evaluate(*root);
        positive += root->h > 0;
        if (root->h > item.optimum - root->cost)
            violations.push_back(item.id + " h=" + std::to_string(root->h) + " gap=" +
                                 std::to_string(item.optimum - root->cost));
    }
    std::ostringstream d;
    d << suite.size() << " instances, " << positive << " with h(root) > 0, " << violations.size() << " violations"
      << first_of(violations);
    return {"CG admissibility", violations.empty(), d.str()};
}

}  // namespace

int main()
{
    using Clock = std::chrono::steady_clock;
    const auto started = Clock::now();
    std::vector<Verdict> verdicts;
    auto report = [&](const Verdict& v, int number) {
        std::printf("%s [%d] %s: %s\n", v.pass ? "PASS" : "FAIL", number, v.name.c_str(), v.detail.c_str());
        std::fflush(stdout);
        verdicts.push_back(v);
    };

    const auto suite = random_suite();
    const auto suite_started = Clock::now();
    SuiteTally tally = run_random_suite(suite);
    const double suite_seconds = std::chrono::duration<double>(Clock::now() - suite_started).count();

    {
        std::ostringstream d;
        d << suite.size() << " oracle-solvable instances x 6 configurations, " << tally.optimal << '/' << tally.runs
          << " optimal, " << suite_seconds << " s" << first_of(tally.mismatches);
        report({"Optimality", tally.optimal == tally.runs && static_cast<int>(suite.size()) >= kSuiteSize, d.str()}, 1);
    }
    report(split_completeness(suite), 2);
    {
        std::ostringstream d;
        d << tally.theorem_checks << " head-on identifications, " << tally.theorem_pruned << " with no child path, "
          << tally.theorem_violations.size() << " violations" << first_of(tally.theorem_violations);
        report({"Head-on prediction", tally.theorem_violations.empty() && tally.theorem_checks > 0, d.str()}, 3);
    }
    {
        std::ostringstream d;
        d << tally.shortcut_checks << " unconstrained agents passing condition (2), "
          << tally.shortcut_violations.size() << " disagreements" << first_of(tally.shortcut_violations);
        report({"Shortcut equivalence", tally.shortcut_violations.empty() && tally.shortcut_checks > 0, d.str()}, 4);
    }
    {
        std::ostringstream d;
        d << tally.standard_children << " standard cardinal children, " << tally.headon_children
          << " vertex head-on agent children, " << tally.increase_violations.size() << " violations"
          << first_of(tally.increase_violations) << "; edge head-on increments (logged):";
        for (auto [inc, count] : tally.edge_increments)
            d << " +" << inc << "x" << count;
        report({"Cost-increase guarantees",
                tally.increase_violations.empty() && tally.standard_children > 0 && tally.headon_children > 0, d.str()},
               5);
    }
    report(trend(), 6);
    report(mdd_exactness(), 7);
    report(cg_admissibility(suite), 8);

    int failed = static_cast<int>(std::count_if(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return !v.pass; }));
    std::printf("%d/%zu criteria passed in %.1f s\n", static_cast<int>(verdicts.size()) - failed, verdicts.size(),
                std::chrono::duration<double>(Clock::now() - started).count());
    return failed == 0 ? 0 : 1;
}
