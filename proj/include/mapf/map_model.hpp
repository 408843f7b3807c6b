#pragma once

#include <compare>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace mapf {

/// Raised for malformed map, scenario and instance text.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when an instance or a generator request violates its preconditions.
class InvalidInstance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Location {
    int row = 0;
    int col = 0;

    friend constexpr auto operator<=>(const Location&, const Location&) = default;
};

std::ostream& operator<<(std::ostream& os, const Location& loc);
std::string to_string(const Location& loc);

inline int manhattan(const Location& a, const Location& b)
{
    return (a.row > b.row ? a.row - b.row : b.row - a.row) +
           (a.col > b.col ? a.col - b.col : b.col - a.col);
}

inline bool adjacent(const Location& a, const Location& b) { return manhattan(a, b) == 1; }

/// Actions in the fixed expansion order used throughout: wait, up, left, right, down.
enum class Action : std::uint8_t { Wait, Up, Left, Right, Down };
inline constexpr Action kActionOrder[] = {Action::Wait, Action::Up, Action::Left, Action::Right,
                                          Action::Down};

constexpr Location apply(Action a, Location loc)
{
    switch (a) {
    case Action::Up: return {loc.row - 1, loc.col};
    case Action::Left: return {loc.row, loc.col - 1};
    case Action::Right: return {loc.row, loc.col + 1};
    case Action::Down: return {loc.row + 1, loc.col};
    case Action::Wait: break;
    }
    return loc;
}

/// 4-connected grid with blocked cells, stored row-major.
class GridMap {
public:
    GridMap(int width, int height);
    GridMap(int width, int height, std::vector<std::uint8_t> blocked);

    int width() const { return width_; }
    int height() const { return height_; }
    int cell_count() const { return width_ * height_; }
    int free_count() const;
    int blocked_count() const { return cell_count() - free_count(); }

    bool in_bounds(const Location& loc) const
    {
        return loc.row >= 0 && loc.col >= 0 && loc.row < height_ && loc.col < width_;
    }
    bool passable(const Location& loc) const { return in_bounds(loc) && !blocked_[index(loc)]; }
    bool blocked(const Location& loc) const { return !passable(loc); }
    void set_blocked(const Location& loc, bool value);

    int index(const Location& loc) const { return loc.row * width_ + loc.col; }
    Location location(int index) const { return {index / width_, index % width_}; }

    /// Passable cells reachable in one step (including staying), in action order.
    std::vector<Location> successors(const Location& loc) const;

    friend bool operator==(const GridMap&, const GridMap&) = default;

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> blocked_;
};

struct AgentSpec {
    int id = 0;
    Location start;
    Location goal;

    friend bool operator==(const AgentSpec&, const AgentSpec&) = default;
};

/// A validated MAPF problem: a map plus agents with distinct starts and distinct goals.
class Instance {
public:
    /// Throws InvalidInstance unless every instance invariant holds.
    Instance(GridMap map, std::vector<AgentSpec> agents);

    const GridMap& map() const { return map_; }
    const std::vector<AgentSpec>& agents() const { return agents_; }
    int agent_count() const { return static_cast<int>(agents_.size()); }
    const AgentSpec& agent(int id) const { return agents_.at(static_cast<std::size_t>(id)); }

    friend bool operator==(const Instance&, const Instance&) = default;

private:
    GridMap map_;
    std::vector<AgentSpec> agents_;
};

/// Checks the instance invariants without constructing; empty string when valid.
std::string validation_error(const GridMap& map, const std::vector<AgentSpec>& agents);

/// BFS reachability on the 4-neighbour graph.
bool reachable(const GridMap& map, const Location& from, const Location& to);

/// Cells of the largest 4-connected component, in row-major order. Ties go to the
/// component containing the lowest-index cell.
std::vector<Location> largest_component(const GridMap& map);

// MovingAI benchmark formats. Passable glyphs are '.', 'G', 'S'; blocked are '@', 'O', 'T', 'W'.
GridMap parse_map(std::istream& in);
GridMap parse_map(std::string_view text);
/// Canonical MovingAI text: "type octile" header, '.' for free and '@' for blocked cells.
std::string serialize_map(const GridMap& map);

/// Scenario rows keep file order; x is the column and y the row. Ids are assigned 0..n-1.
std::vector<AgentSpec> parse_scen(std::istream& in, const GridMap& map);
std::vector<AgentSpec> parse_scen(std::string_view text, const GridMap& map);

// Plain fixture format:
//   H W
//   H rows of '.'/'@'
//   sr sc gr gc      (one line per agent)
// Lines starting with '#' are ignored.
Instance parse_instance(std::istream& in);
Instance parse_instance(std::string_view text);
std::string serialize_instance(const Instance& instance);

Instance load_instance(const std::string& path);
void save_instance(const Instance& instance, const std::string& path);

/// Exactly round(width*height*ratio) blocked cells, sampled without replacement.
GridMap generate_random_map(int width, int height, double obstacle_ratio, std::uint64_t seed);

/// k agents with starts and goals sampled without replacement from the largest component.
Instance generate_instance(const GridMap& map, int k, std::uint64_t seed);

/// Shelf blocks separated by single-width aisles, with open bands of `side_columns`
/// columns on the left and right edges.
GridMap generate_warehouse_map(int shelf_rows, int shelf_cols, int shelf_length, int side_columns);

/// Each agent starts in the left band and goes to the right band, or the reverse.
Instance generate_warehouse_instance(const GridMap& map, int k, int side_columns, std::uint64_t seed);

}  // namespace mapf
