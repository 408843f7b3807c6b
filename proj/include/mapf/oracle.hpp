#pragma once

#include "mapf/low_level.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace mapf::oracle {

/// Raised when an input exceeds the oracle's size limits.
class GuardRailError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxAgents = 4;
inline constexpr int kMaxFreeCells = 64;
inline constexpr int kMaxEnumerationCost = 12;
inline constexpr int kMaxEnumerationSide = 8;

struct JointResult {
    int sum_of_costs = 0;
    Solution solution;
    long expanded = 0;
};

/// Optimal sum-of-costs by A* over joint configurations. Each agent pays one per step until
/// it stops at its goal for good; vertex and swap collisions are forbidden. Returns
/// nullopt iff no collision-free solution exists.
std::optional<JointResult> joint_optimal(const Instance& instance);

/// Every location sequence of exactly `cost` steps from start to goal that satisfies
/// `agent`'s constraints, including the parked tail at the goal.
std::vector<Path> enumerate_paths(const GridMap& map, const Location& start, const Location& goal, int cost,
                                  const ConstraintTable& table, int agent);

}  // namespace mapf::oracle
