#pragma once

#include "mapf/map_model.hpp"

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace mapf {

enum class ConstraintKind : std::uint8_t { Vertex, Edge };

/// Negative constraint. A vertex constraint forbids `agent` from being at `to` at time `t`;
/// an edge constraint forbids moving `from` -> `to` between `t - 1` and `t`.
struct Constraint {
    int agent = 0;
    ConstraintKind kind = ConstraintKind::Vertex;
    Location from;  // unused for vertex constraints
    Location to;
    int t = 0;

    static Constraint vertex(int agent, Location v, int t) { return {agent, ConstraintKind::Vertex, v, v, t}; }
    static Constraint edge(int agent, Location u, Location v, int t)
    {
        return {agent, ConstraintKind::Edge, u, v, t};
    }

    bool is_vertex() const { return kind == ConstraintKind::Vertex; }
    const Location& location() const { return to; }

    friend auto operator<=>(const Constraint&, const Constraint&) = default;
};

std::ostream& operator<<(std::ostream& os, const Constraint& c);
std::string to_string(const Constraint& c);

/// Timed location sequence; `locations[t]` for t in [0, cost()]. The agent parks at
/// `locations.back()` forever after.
struct Path {
    std::vector<Location> locations;

    int cost() const { return static_cast<int>(locations.size()) - 1; }
    bool empty() const { return locations.empty(); }
    /// Location at any t >= 0, including parked timesteps.
    const Location& at(int t) const
    {
        return t < static_cast<int>(locations.size()) ? locations[static_cast<std::size_t>(t)]
                                                       : locations.back();
    }

    friend bool operator==(const Path&, const Path&) = default;
};

using Solution = std::vector<Path>;

int sum_of_costs(const Solution& solution);
int makespan(const Solution& solution);

/// Exact-match lookup of vertex and edge constraints, indexed per agent.
class ConstraintTable {
public:
    ConstraintTable() = default;
    explicit ConstraintTable(std::span<const Constraint> constraints);

    void add(const Constraint& c);

    bool vertex_blocked(int agent, const Location& v, int t) const;
    bool edge_blocked(int agent, const Location& u, const Location& v, int t) const;
    /// Latest t of a vertex constraint on (agent, v); -1 when there is none.
    int latest_vertex(int agent, const Location& v) const;
    /// Latest t of any constraint of `agent`; 0 when there is none.
    int latest_timestep(int agent) const;
    int count(int agent) const;
    bool empty() const { return vertex_.empty() && edge_.empty(); }

private:
    static std::uint64_t vertex_key(int agent, const Location& v, int t);
    static std::uint64_t edge_key(int agent, const Location& u, const Location& v, int t);
    static std::uint64_t goal_key(int agent, const Location& v);

    std::unordered_set<std::uint64_t> vertex_;
    std::unordered_set<std::uint64_t> edge_;
    std::unordered_map<std::uint64_t, int> latest_at_;
    std::unordered_map<int, int> latest_;
    std::unordered_map<int, int> count_;
};

inline constexpr int kUnreachable = std::numeric_limits<int>::max();

/// Exact 4-neighbour BFS distance from every cell to a goal, indexed by GridMap::index.
class DistanceMap {
public:
    DistanceMap() = default;
    DistanceMap(const GridMap& map, const Location& goal);

    int operator()(const GridMap& map, const Location& loc) const { return dist_[map.index(loc)]; }
    int at_index(int index) const { return dist_[static_cast<std::size_t>(index)]; }
    const Location& goal() const { return goal_; }

private:
    Location goal_;
    std::vector<int> dist_;
};

DistanceMap distance_table(const GridMap& map, const Location& goal);

/// Bound on path cost that loses no solution for one agent: after its latest constraint
/// any free cell reaches the goal within |V| - 1 moves.
int single_agent_horizon(const GridMap& map, const ConstraintTable& table, int agent);

struct PlanStats {
    long expanded = 0;
    long generated = 0;
};

/// Minimum-cost space-time A* path for `agent` under `table`, with cost at most `horizon`.
/// Ties on f prefer larger g, then the wait/up/left/right/down generation order.
std::optional<Path> plan(const GridMap& map, const Location& start, const Location& goal,
                         const ConstraintTable& table, int agent, int horizon, const DistanceMap& heuristic,
                         PlanStats* stats = nullptr);

/// Same as above with the distance table computed on the fly and the default horizon.
std::optional<Path> plan(const GridMap& map, const Location& start, const Location& goal,
                         const ConstraintTable& table, int agent);

/// True iff the path, including the parked tail up to the table's latest timestep for
/// `agent`, hits any of that agent's constraints.
bool violates(const Path& path, const ConstraintTable& table, int agent);

}  // namespace mapf
