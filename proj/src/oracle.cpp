#include "mapf/oracle.hpp"

#include <algorithm>
#include <queue>
#include <unordered_map>

namespace mapf::oracle {

namespace {

constexpr int kBits = 6;

struct JointState {
    std::vector<int> cells;  // free-cell index per agent
    unsigned finished = 0;
};

std::uint64_t encode(const JointState& s)
{
    std::uint64_t key = s.finished;
    for (int c : s.cells)
        key = (key << kBits) | static_cast<std::uint64_t>(c);
    return key;
}

struct Record {
    std::uint64_t parent;
    int g;
    bool closed;
    JointState state;
};

}  // namespace

std::optional<JointResult> joint_optimal(const Instance& instance)
{
    const GridMap& map = instance.map();
    const int k = instance.agent_count();
    if (k > kMaxAgents)
        throw GuardRailError("joint oracle supports at most " + std::to_string(kMaxAgents) + " agents");
    if (map.free_count() > kMaxFreeCells)
        throw GuardRailError("joint oracle supports at most " + std::to_string(kMaxFreeCells) + " free cells");

    std::vector<int> free_index(static_cast<std::size_t>(map.cell_count()), -1);
    std::vector<Location> cells;
    for (int idx = 0; idx < map.cell_count(); ++idx) {
        if (map.passable(map.location(idx))) {
            free_index[static_cast<std::size_t>(idx)] = static_cast<int>(cells.size());
            cells.push_back(map.location(idx));
        }
    }
    const int n = static_cast<int>(cells.size());
    std::vector<std::vector<int>> moves(static_cast<std::size_t>(n));  // wait first, then moves
    for (int c = 0; c < n; ++c)
        for (const Location& next : map.successors(cells[static_cast<std::size_t>(c)]))
            moves[static_cast<std::size_t>(c)].push_back(free_index[static_cast<std::size_t>(map.index(next))]);

    std::vector<std::vector<int>> dist(static_cast<std::size_t>(k));
    std::vector<int> goal_cell(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
        DistanceMap d(map, instance.agent(a).goal);
        for (const Location& loc : cells)
            dist[static_cast<std::size_t>(a)].push_back(d(map, loc));
        goal_cell[static_cast<std::size_t>(a)] = free_index[static_cast<std::size_t>(map.index(instance.agent(a).goal))];
    }
    auto heuristic = [&](const JointState& s) {
        int h = 0;
        for (int a = 0; a < k; ++a)
            if (!(s.finished >> a & 1u))
                h += dist[static_cast<std::size_t>(a)][static_cast<std::size_t>(s.cells[static_cast<std::size_t>(a)])];
        return h;
    };
    const unsigned all_done = (1u << k) - 1u;

    JointState start;
    for (int a = 0; a < k; ++a)
        start.cells.push_back(free_index[static_cast<std::size_t>(map.index(instance.agent(a).start))]);

    std::unordered_map<std::uint64_t, Record> records;
    using Entry = std::tuple<int, int, std::uint64_t>;  // f, -g, key
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
    const std::uint64_t start_key = encode(start);
    records.emplace(start_key, Record{start_key, 0, false, start});
    open.emplace(heuristic(start), 0, start_key);

    long expanded = 0;
    std::uint64_t goal_key = 0;
    bool found = false;

    // Per-agent options: -1 means "finish at the goal and stay", otherwise the next cell.
    std::vector<std::vector<int>> options(static_cast<std::size_t>(k));
    std::vector<int> choice(static_cast<std::size_t>(k));

    while (!open.empty()) {
        auto [f, neg_g, key] = open.top();
        open.pop();
        Record& rec = records.at(key);
        if (rec.closed || -neg_g != rec.g)
            continue;
        rec.closed = true;
        ++expanded;
        const JointState cur = rec.state;
        const int g = rec.g;
        if (cur.finished == all_done) {
            goal_key = key;
            found = true;
            break;
        }

        for (int a = 0; a < k; ++a) {
            auto& opts = options[static_cast<std::size_t>(a)];
            opts.clear();
            int cell = cur.cells[static_cast<std::size_t>(a)];
            if (cur.finished >> a & 1u) {
                opts.push_back(-1);
                continue;
            }
            if (cell == goal_cell[static_cast<std::size_t>(a)])
                opts.push_back(-1);
            for (int next : moves[static_cast<std::size_t>(cell)])
                opts.push_back(next);
        }

        // Odometer over the joint action product.
        std::fill(choice.begin(), choice.end(), 0);
        for (;;) {
            JointState next{cur.cells, cur.finished};
            int step_cost = 0;
            for (int a = 0; a < k; ++a) {
                int opt = options[static_cast<std::size_t>(a)][static_cast<std::size_t>(choice[static_cast<std::size_t>(a)])];
                if (opt < 0) {
                    next.finished |= 1u << a;
                } else {
                    next.cells[static_cast<std::size_t>(a)] = opt;
                    ++step_cost;
                }
            }
            bool ok = true;
            for (int a = 0; a < k && ok; ++a) {
                for (int b = a + 1; b < k && ok; ++b) {
                    auto ua = static_cast<std::size_t>(a);
                    auto ub = static_cast<std::size_t>(b);
                    if (next.cells[ua] == next.cells[ub])
                        ok = false;
                    else if (next.cells[ua] == cur.cells[ub] && next.cells[ub] == cur.cells[ua])
                        ok = false;
                }
            }
            if (ok) {
                std::uint64_t nk = encode(next);
                int ng = g + step_cost;
                auto [it, fresh] = records.try_emplace(nk, Record{key, ng, false, next});
                if (fresh || (!it->second.closed && ng < it->second.g)) {
                    it->second.parent = key;
                    it->second.g = ng;
                    open.emplace(ng + heuristic(next), -ng, nk);
                }
            }

            int a = 0;
            while (a < k) {
                auto ua = static_cast<std::size_t>(a);
                if (++choice[ua] < static_cast<int>(options[ua].size()))
                    break;
                choice[ua] = 0;
                ++a;
            }
            if (a == k)
                break;
        }
    }
    if (!found)
        return std::nullopt;

    std::vector<JointState> trail;
    for (std::uint64_t key = goal_key;;) {
        const Record& rec = records.at(key);
        trail.push_back(rec.state);
        if (key == start_key)
            break;
        key = rec.parent;
    }
    std::reverse(trail.begin(), trail.end());

    JointResult result;
    result.expanded = expanded;
    result.sum_of_costs = records.at(goal_key).g;
    result.solution.resize(static_cast<std::size_t>(k));
    for (int a = 0; a < k; ++a) {
        auto& path = result.solution[static_cast<std::size_t>(a)].locations;
        // trail[s] is the first state with the agent finished; it stood on its goal at s - 1.
        std::size_t s = 0;
        while (!(trail[s].finished >> a & 1u))
            ++s;
        for (std::size_t step = 0; step < s; ++step)
            path.push_back(cells[static_cast<std::size_t>(trail[step].cells[static_cast<std::size_t>(a)])]);
    }
    return result;
}

std::vector<Path> enumerate_paths(const GridMap& map, const Location& start, const Location& goal, int cost,
                                  const ConstraintTable& table, int agent)
{
    if (cost > kMaxEnumerationCost)
        throw GuardRailError("path enumeration supports costs up to " + std::to_string(kMaxEnumerationCost));
    if (map.width() > kMaxEnumerationSide || map.height() > kMaxEnumerationSide)
        throw GuardRailError("path enumeration supports maps up to 8x8");

    std::vector<Path> out;
    if (cost < 0 || !map.passable(start) || !map.passable(goal))
        return out;
    if (table.vertex_blocked(agent, start, 0) || table.latest_vertex(agent, goal) > cost)
        return out;

    DistanceMap dist(map, goal);
    std::vector<Location> prefix{start};
    auto dfs = [&](auto&& self) -> void {
        int t = static_cast<int>(prefix.size()) - 1;
        const Location cur = prefix.back();
        if (t == cost) {
            if (cur == goal)
                out.push_back(Path{prefix});
            return;
        }
        for (const Location& next : map.successors(cur)) {
            if (dist(map, next) > cost - (t + 1))
                continue;
            if (table.vertex_blocked(agent, next, t + 1) || table.edge_blocked(agent, cur, next, t + 1))
                continue;
            prefix.push_back(next);
            self(self);
            prefix.pop_back();
        }
    };
    if (dist(map, start) <= cost)
        dfs(dfs);
    return out;
}

}  // namespace mapf::oracle
