#pragma once

#include "mapf/low_level.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

namespace mapf {

/// Layered DAG of every start->goal location sequence of exactly `depth` steps that
/// satisfies one agent's constraints (including its parked tail at the goal).
class Mdd {
public:
    struct Node {
        Location loc;
        std::vector<int> children;  // indices into the next level
        std::vector<int> parents;   // indices into the previous level
    };

    int depth() const { return static_cast<int>(levels_.size()) - 1; }
    const std::vector<Node>& level(int t) const { return levels_.at(static_cast<std::size_t>(t)); }
    std::vector<Location> locations(int t) const;
    int width(int t) const { return static_cast<int>(level(t).size()); }
    const Location& start() const { return levels_.front().front().loc; }
    const Location& goal() const { return levels_.back().front().loc; }

    /// The unique location at t, or nullopt when the level is wider than one. For t past
    /// the depth the agent is parked, so the goal is returned.
    std::optional<Location> singleton_at(int t) const;

    /// One line per level: "t: (r,c) (r,c) ...".
    std::string dump() const;

private:
    friend std::optional<Mdd> build_mdd(const GridMap&, const AgentSpec&, int, const ConstraintTable&,
                                        const DistanceMap&);
    std::vector<std::vector<Node>> levels_;  // each level sorted by location
};

std::optional<Mdd> build_mdd(const GridMap& map, const AgentSpec& agent, int cost, const ConstraintTable& table,
                             const DistanceMap& dist);
std::optional<Mdd> build_mdd(const GridMap& map, const AgentSpec& agent, int cost, const ConstraintTable& table);

/// Memoizes MDDs for one high-level search, keyed by agent, cost and that agent's constraints.
class MddCache {
public:
    MddCache(const Instance& instance, const std::vector<DistanceMap>& distances);

    /// `constraints` may hold any agent's constraints; only `agent`'s are used.
    std::shared_ptr<const Mdd> get(int agent, int cost, std::span<const Constraint> constraints);

    long builds() const { return builds_; }
    long hits() const { return hits_; }
    std::size_t size() const { return cache_.size(); }

private:
    using Key = std::tuple<int, int, std::vector<Constraint>>;

    const Instance& instance_;
    const std::vector<DistanceMap>& distances_;
    std::map<Key, std::shared_ptr<const Mdd>> cache_;
    long builds_ = 0;
    long hits_ = 0;
};

}  // namespace mapf
