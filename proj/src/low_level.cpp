#include "mapf/low_level.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <queue>
#include <sstream>

namespace mapf {

std::ostream& operator<<(std::ostream& os, const Constraint& c)
{
    os << "<a" << c.agent << ',';
    if (c.kind == ConstraintKind::Edge)
        os << c.from << "->";
    return os << c.to << ',' << c.t << '>';
}

std::string to_string(const Constraint& c)
{
    std::ostringstream os;
    os << c;
    return os.str();
}

int sum_of_costs(const Solution& solution)
{
    int total = 0;
    for (const Path& p : solution)
        total += p.cost();
    return total;
}

int makespan(const Solution& solution)
{
    int m = 0;
    for (const Path& p : solution)
        m = std::max(m, p.cost());
    return m;
}

// --- ConstraintTable -------------------------------------------------------

namespace {

// 12 bits agent, 12 bits row, 12 bits col, 3 bits direction, 24 bits time.
constexpr std::uint64_t pack(int agent, const Location& v, int dir, int t)
{
    return (static_cast<std::uint64_t>(agent) & 0xFFF) << 51 | (static_cast<std::uint64_t>(v.row) & 0xFFF) << 39 |
           (static_cast<std::uint64_t>(v.col) & 0xFFF) << 27 | (static_cast<std::uint64_t>(dir) & 0x7) << 24 |
           (static_cast<std::uint64_t>(t) & 0xFFFFFF);
}

int direction(const Location& u, const Location& v)
{
    for (Action a : kActionOrder)
        if (apply(a, u) == v)
            return static_cast<int>(a);
    return 7;
}

}  // namespace

std::uint64_t ConstraintTable::vertex_key(int agent, const Location& v, int t) { return pack(agent, v, 0, t); }

std::uint64_t ConstraintTable::edge_key(int agent, const Location& u, const Location& v, int t)
{
    return pack(agent, u, direction(u, v), t);
}

std::uint64_t ConstraintTable::goal_key(int agent, const Location& v) { return pack(agent, v, 0, 0); }

ConstraintTable::ConstraintTable(std::span<const Constraint> constraints)
{
    for (const Constraint& c : constraints)
        add(c);
}

void ConstraintTable::add(const Constraint& c)
{
    bool inserted = c.is_vertex() ? vertex_.insert(vertex_key(c.agent, c.to, c.t)).second
                                  : edge_.insert(edge_key(c.agent, c.from, c.to, c.t)).second;
    if (!inserted)
        return;
    ++count_[c.agent];
    auto& latest = latest_[c.agent];
    latest = std::max(latest, c.t);
    if (c.is_vertex()) {
        auto [it, fresh] = latest_at_.try_emplace(goal_key(c.agent, c.to), c.t);
        if (!fresh)
            it->second = std::max(it->second, c.t);
    }
}

bool ConstraintTable::vertex_blocked(int agent, const Location& v, int t) const
{
    return vertex_.contains(vertex_key(agent, v, t));
}

bool ConstraintTable::edge_blocked(int agent, const Location& u, const Location& v, int t) const
{
    return edge_.contains(edge_key(agent, u, v, t));
}

int ConstraintTable::latest_vertex(int agent, const Location& v) const
{
    auto it = latest_at_.find(goal_key(agent, v));
    return it == latest_at_.end() ? -1 : it->second;
}

int ConstraintTable::latest_timestep(int agent) const
{
    auto it = latest_.find(agent);
    return it == latest_.end() ? 0 : it->second;
}

int ConstraintTable::count(int agent) const
{
    auto it = count_.find(agent);
    return it == count_.end() ? 0 : it->second;
}

// --- distances ------------------------------------------------------------

DistanceMap::DistanceMap(const GridMap& map, const Location& goal)
    : goal_(goal), dist_(static_cast<std::size_t>(map.cell_count()), kUnreachable)
{
    if (!map.passable(goal))
        return;
    std::deque<Location> queue{goal};
    dist_[map.index(goal)] = 0;
    while (!queue.empty()) {
        Location cur = queue.front();
        queue.pop_front();
        int d = dist_[map.index(cur)];
        for (const Location& next : map.successors(cur)) {
            auto& slot = dist_[map.index(next)];
            if (slot == kUnreachable) {
                slot = d + 1;
                queue.push_back(next);
            }
        }
    }
}

DistanceMap distance_table(const GridMap& map, const Location& goal) { return DistanceMap(map, goal); }

int single_agent_horizon(const GridMap& map, const ConstraintTable& table, int agent)
{
    return table.latest_timestep(agent) + map.free_count();
}

// --- planner --------------------------------------------------------------

namespace {

struct SearchNode {
    Location loc;
    int t;
    int parent;
};

struct OpenEntry {
    int f;
    int g;
    long seq;
    int node;

    // std::priority_queue is a max-heap; "greater" means lower priority.
    bool operator<(const OpenEntry& o) const
    {
        if (f != o.f)
            return f > o.f;
        if (g != o.g)
            return g < o.g;
        return seq > o.seq;
    }
};

// Appends the shortest unconstrained route from `from` to the goal, stepping to the
// first successor (in action order) that lowers the distance.
void append_descent(const GridMap& map, const DistanceMap& dist, Location from, std::vector<Location>& out)
{
    while (dist(map, from) > 0) {
        for (const Location& next : map.successors(from)) {
            if (dist(map, next) == dist(map, from) - 1) {
                from = next;
                break;
            }
        }
        out.push_back(from);
    }
}

}  // namespace

std::optional<Path> plan(const GridMap& map, const Location& start, const Location& goal,
                         const ConstraintTable& table, int agent, int horizon, const DistanceMap& heuristic,
                         PlanStats* stats)
{
    if (!map.passable(start) || !map.passable(goal))
        return std::nullopt;
    if (heuristic(map, start) == kUnreachable || table.vertex_blocked(agent, start, 0))
        return std::nullopt;

    horizon = std::min(horizon, single_agent_horizon(map, table, agent));
    const int last_constraint = table.latest_timestep(agent);
    const int goal_free_after = table.latest_vertex(agent, goal);

    std::vector<SearchNode> nodes;
    std::unordered_set<std::uint64_t> seen;
    std::priority_queue<OpenEntry> open;
    long seq = 0;
    auto key = [&](const Location& loc, int t) {
        return static_cast<std::uint64_t>(t) * static_cast<std::uint64_t>(map.cell_count()) +
               static_cast<std::uint64_t>(map.index(loc));
    };

    nodes.push_back({start, 0, -1});
    seen.insert(key(start, 0));
    open.push({heuristic(map, start), 0, seq++, 0});

    while (!open.empty()) {
        OpenEntry top = open.top();
        open.pop();
        const SearchNode cur = nodes[static_cast<std::size_t>(top.node)];
        if (stats)
            ++stats->expanded;

        bool at_goal = cur.loc == goal && cur.t > goal_free_after;
        // Past the last constraint the rest of the route is unconstrained, so the exact
        // distance completes it at cost f.
        bool unconstrained_tail = cur.t >= last_constraint && cur.t > goal_free_after - 1;
        if (at_goal || unconstrained_tail) {
            if (top.f > horizon)
                return std::nullopt;
            std::vector<Location> rev;
            for (int n = top.node; n >= 0; n = nodes[static_cast<std::size_t>(n)].parent)
                rev.push_back(nodes[static_cast<std::size_t>(n)].loc);
            Path path;
            path.locations.assign(rev.rbegin(), rev.rend());
            append_descent(map, heuristic, cur.loc, path.locations);
            return path;
        }

        int t = cur.t + 1;
        for (const Location& next : map.successors(cur.loc)) {
            int h = heuristic(map, next);
            if (h == kUnreachable || t + h > horizon)
                continue;
            if (table.vertex_blocked(agent, next, t) || table.edge_blocked(agent, cur.loc, next, t))
                continue;
            if (!seen.insert(key(next, t)).second)
                continue;
            nodes.push_back({next, t, top.node});
            open.push({t + h, t, seq++, static_cast<int>(nodes.size()) - 1});
            if (stats)
                ++stats->generated;
        }
    }
    return std::nullopt;
}

std::optional<Path> plan(const GridMap& map, const Location& start, const Location& goal,
                         const ConstraintTable& table, int agent)
{
    DistanceMap dist(map, goal);
    return plan(map, start, goal, table, agent, single_agent_horizon(map, table, agent), dist);
}

bool violates(const Path& path, const ConstraintTable& table, int agent)
{
    if (path.empty() || table.count(agent) == 0)
        return false;
    int last = std::max(path.cost(), table.latest_timestep(agent));
    for (int t = 0; t <= last; ++t) {
        if (table.vertex_blocked(agent, path.at(t), t))
            return true;
        if (t > 0 && table.edge_blocked(agent, path.at(t - 1), path.at(t), t))
            return true;
    }
    return false;
}

}  // namespace mapf
