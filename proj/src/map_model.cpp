#include "mapf/map_model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <set>
#include <sstream>

namespace mapf {

std::ostream& operator<<(std::ostream& os, const Location& loc)
{
    return os << '(' << loc.row << ',' << loc.col << ')';
}

std::string to_string(const Location& loc)
{
    std::ostringstream os;
    os << loc;
    return os.str();
}

GridMap::GridMap(int width, int height)
    : GridMap(width, height, std::vector<std::uint8_t>(
                                 width > 0 && height > 0 ? static_cast<std::size_t>(width) * height : 0, 0))
{
}

GridMap::GridMap(int width, int height, std::vector<std::uint8_t> blocked)
    : width_(width), height_(height), blocked_(std::move(blocked))
{
    if (width < 1 || height < 1)
        throw InvalidInstance("map dimensions must be positive");
    if (blocked_.size() != static_cast<std::size_t>(width) * height)
        throw InvalidInstance("blocked grid does not match map dimensions");
}

int GridMap::free_count() const
{
    return static_cast<int>(std::count(blocked_.begin(), blocked_.end(), std::uint8_t{0}));
}

void GridMap::set_blocked(const Location& loc, bool value)
{
    if (!in_bounds(loc))
        throw InvalidInstance("location " + to_string(loc) + " is outside the map");
    blocked_[index(loc)] = value ? 1 : 0;
}

std::vector<Location> GridMap::successors(const Location& loc) const
{
    std::vector<Location> out;
    out.reserve(5);
    for (Action a : kActionOrder) {
        Location next = apply(a, loc);
        if (passable(next))
            out.push_back(next);
    }
    return out;
}

// --- Instance -------------------------------------------------------------

std::string validation_error(const GridMap& map, const std::vector<AgentSpec>& agents)
{
    std::set<Location> starts;
    std::set<Location> goals;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentSpec& a = agents[i];
        std::string who = "agent " + std::to_string(i);
        if (a.id != static_cast<int>(i))
            return who + " has id " + std::to_string(a.id);
        if (!map.passable(a.start))
            return who + " starts on a blocked or out-of-bounds cell " + to_string(a.start);
        if (!map.passable(a.goal))
            return who + " has a blocked or out-of-bounds goal " + to_string(a.goal);
        if (!starts.insert(a.start).second)
            return who + " shares its start " + to_string(a.start);
        if (!goals.insert(a.goal).second)
            return who + " shares its goal " + to_string(a.goal);
        if (!reachable(map, a.start, a.goal))
            return who + " cannot reach its goal";
    }
    return {};
}

Instance::Instance(GridMap map, std::vector<AgentSpec> agents)
    : map_(std::move(map)), agents_(std::move(agents))
{
    if (auto err = validation_error(map_, agents_); !err.empty())
        throw InvalidInstance(err);
}

namespace {

// Component label per cell (-1 for blocked), labels assigned in row-major discovery order.
std::vector<int> label_components(const GridMap& map, std::vector<int>& sizes)
{
    std::vector<int> label(static_cast<std::size_t>(map.cell_count()), -1);
    sizes.clear();
    for (int idx = 0; idx < map.cell_count(); ++idx) {
        Location root = map.location(idx);
        if (!map.passable(root) || label[idx] >= 0)
            continue;
        int id = static_cast<int>(sizes.size());
        sizes.push_back(0);
        std::deque<Location> queue{root};
        label[idx] = id;
        while (!queue.empty()) {
            Location cur = queue.front();
            queue.pop_front();
            ++sizes.back();
            for (Action a : kActionOrder) {
                Location next = apply(a, cur);
                if (a == Action::Wait || !map.passable(next) || label[map.index(next)] >= 0)
                    continue;
                label[map.index(next)] = id;
                queue.push_back(next);
            }
        }
    }
    return label;
}

// First `count` entries of a Fisher-Yates shuffle of `pool`.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t count, std::mt19937_64& rng)
{
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, pool.size() - 1);
        std::swap(pool[i], pool[pick(rng)]);
    }
    pool.resize(count);
    return pool;
}

}  // namespace

bool reachable(const GridMap& map, const Location& from, const Location& to)
{
    if (!map.passable(from) || !map.passable(to))
        return false;
    std::vector<int> sizes;
    auto label = label_components(map, sizes);
    return label[map.index(from)] == label[map.index(to)];
}

std::vector<Location> largest_component(const GridMap& map)
{
    std::vector<int> sizes;
    auto label = label_components(map, sizes);
    if (sizes.empty())
        return {};
    int best = static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
    std::vector<Location> cells;
    for (int idx = 0; idx < map.cell_count(); ++idx)
        if (label[idx] == best)
            cells.push_back(map.location(idx));
    return cells;
}

// --- MovingAI formats -----------------------------------------------------

namespace {

int glyph_blocked(char c)
{
    switch (c) {
    case '.': case 'G': case 'S': return 0;
    case '@': case 'O': case 'T': case 'W': return 1;
    default: return -1;
    }
}

std::string strip_cr(std::string line)
{
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    return line;
}

bool next_line(std::istream& in, std::string& line)
{
    if (!std::getline(in, line))
        return false;
    line = strip_cr(std::move(line));
    return true;
}

}  // namespace

GridMap parse_map(std::istream& in)
{
    std::string line;
    int height = -1;
    int width = -1;
    bool saw_type = false;
    for (;;) {
        if (!next_line(in, line))
            throw ParseError("map header ended before 'map' line");
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "map")
            break;
        if (key == "type") {
            std::string word;
            if (!(ls >> word))
                throw ParseError("'type' line without a value");
            saw_type = true;
        } else if (key == "height" || key == "width") {
            int value = 0;
            if (!(ls >> value) || value < 1)
                throw ParseError("bad '" + key + "' line: " + line);
            (key == "height" ? height : width) = value;
        } else {
            throw ParseError("unexpected map header line: " + line);
        }
    }
    if (!saw_type || height < 1 || width < 1)
        throw ParseError("map header needs type, height and width");

    std::vector<std::uint8_t> blocked;
    blocked.reserve(static_cast<std::size_t>(width) * height);
    for (int r = 0; r < height; ++r) {
        if (!next_line(in, line))
            throw ParseError("expected " + std::to_string(height) + " map rows, got " + std::to_string(r));
        if (static_cast<int>(line.size()) != width)
            throw ParseError("map row " + std::to_string(r) + " has length " + std::to_string(line.size()) +
                             ", expected " + std::to_string(width));
        for (char c : line) {
            int b = glyph_blocked(c);
            if (b < 0)
                throw ParseError(std::string("unknown map glyph '") + c + "' in row " + std::to_string(r));
            blocked.push_back(static_cast<std::uint8_t>(b));
        }
    }
    while (next_line(in, line))
        if (!line.empty())
            throw ParseError("trailing content after map rows");
    return GridMap(width, height, std::move(blocked));
}

GridMap parse_map(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_map(in);
}

std::string serialize_map(const GridMap& map)
{
    std::ostringstream os;
    os << "type octile\nheight " << map.height() << "\nwidth " << map.width() << "\nmap\n";
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < map.width(); ++c)
            os << (map.passable({r, c}) ? '.' : '@');
        os << '\n';
    }
    return os.str();
}

std::vector<AgentSpec> parse_scen(std::istream& in, const GridMap& map)
{
    std::string line;
    if (!next_line(in, line) || line.rfind("version", 0) != 0)
        throw ParseError("scenario must start with a version line");

    std::vector<AgentSpec> agents;
    int line_no = 1;
    while (next_line(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::vector<std::string> fields;
        std::istringstream ls(line);
        for (std::string f; std::getline(ls, f, '\t');)
            fields.push_back(f);
        if (fields.size() < 8)
            throw ParseError("scenario line " + std::to_string(line_no) + " has too few fields");
        int coords[4];
        try {
            for (int i = 0; i < 4; ++i)
                coords[i] = std::stoi(fields[4 + static_cast<std::size_t>(i)]);
        } catch (const std::exception&) {
            throw ParseError("scenario line " + std::to_string(line_no) + " has a non-integer coordinate");
        }
        AgentSpec spec{static_cast<int>(agents.size()), {coords[1], coords[0]}, {coords[3], coords[2]}};
        for (const Location& loc : {spec.start, spec.goal}) {
            if (!map.in_bounds(loc))
                throw ParseError("scenario line " + std::to_string(line_no) + ": " + to_string(loc) +
                                 " is out of bounds");
            if (!map.passable(loc))
                throw ParseError("scenario line " + std::to_string(line_no) + ": " + to_string(loc) +
                                 " is blocked");
        }
        agents.push_back(spec);
    }
    return agents;
}

std::vector<AgentSpec> parse_scen(std::string_view text, const GridMap& map)
{
    std::istringstream in{std::string(text)};
    return parse_scen(in, map);
}

// --- fixture format -------------------------------------------------------

Instance parse_instance(std::istream& in)
{
    std::vector<std::string> lines;
    for (std::string line; next_line(in, line);) {
        auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        lines.push_back(line.substr(first));
    }
    if (lines.empty())
        throw ParseError("instance is empty");

    int height = 0;
    int width = 0;
    {
        std::istringstream ls(lines[0]);
        std::string rest;
        if (!(ls >> height >> width) || (ls >> rest) || height < 1 || width < 1)
            throw ParseError("instance must start with '<rows> <cols>'");
    }
    if (static_cast<int>(lines.size()) < 1 + height)
        throw ParseError("instance has fewer map rows than declared");

    std::vector<std::uint8_t> blocked;
    for (int r = 0; r < height; ++r) {
        std::string row = lines[1 + static_cast<std::size_t>(r)];
        while (!row.empty() && (row.back() == ' ' || row.back() == '\t'))
            row.pop_back();
        if (static_cast<int>(row.size()) != width)
            throw ParseError("instance map row " + std::to_string(r) + " has wrong length");
        for (char c : row) {
            if (c != '.' && c != '@')
                throw ParseError(std::string("unknown instance glyph '") + c + "'");
            blocked.push_back(c == '@' ? 1 : 0);
        }
    }
    GridMap map(width, height, std::move(blocked));

    std::vector<AgentSpec> agents;
    for (std::size_t i = 1 + static_cast<std::size_t>(height); i < lines.size(); ++i) {
        std::istringstream ls(lines[i]);
        int sr, sc, gr, gc;
        std::string rest;
        if (!(ls >> sr >> sc >> gr >> gc) || (ls >> rest))
            throw ParseError("bad agent line: " + lines[i]);
        agents.push_back({static_cast<int>(agents.size()), {sr, sc}, {gr, gc}});
    }
    if (auto err = validation_error(map, agents); !err.empty())
        throw ParseError("invalid instance: " + err);
    return Instance(std::move(map), std::move(agents));
}

Instance parse_instance(std::string_view text)
{
    std::istringstream in{std::string(text)};
    return parse_instance(in);
}

std::string serialize_instance(const Instance& instance)
{
    const GridMap& map = instance.map();
    std::ostringstream os;
    os << map.height() << ' ' << map.width() << '\n';
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < map.width(); ++c)
            os << (map.passable({r, c}) ? '.' : '@');
        os << '\n';
    }
    for (const AgentSpec& a : instance.agents())
        os << a.start.row << ' ' << a.start.col << ' ' << a.goal.row << ' ' << a.goal.col << '\n';
    return os.str();
}

Instance load_instance(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open instance file " + path);
    return parse_instance(in);
}

void save_instance(const Instance& instance, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write instance file " + path);
    out << serialize_instance(instance);
    if (!out)
        throw std::runtime_error("failed writing instance file " + path);
}

// --- generators -----------------------------------------------------------

GridMap generate_random_map(int width, int height, double obstacle_ratio, std::uint64_t seed)
{
    if (!(obstacle_ratio >= 0.0 && obstacle_ratio < 1.0))
        throw InvalidInstance("obstacle ratio must be in [0, 1)");
    GridMap map(width, height);
    auto total = static_cast<std::size_t>(map.cell_count());
    auto blocked = static_cast<std::size_t>(std::llround(static_cast<double>(total) * obstacle_ratio));
    std::vector<int> cells(total);
    for (std::size_t i = 0; i < total; ++i)
        cells[i] = static_cast<int>(i);
    std::mt19937_64 rng(seed);
    for (int idx : sample_without_replacement(std::move(cells), blocked, rng))
        map.set_blocked(map.location(idx), true);
    return map;
}

Instance generate_instance(const GridMap& map, int k, std::uint64_t seed)
{
    if (k <= 0)
        throw InvalidInstance("agent count must be positive");
    auto cells = largest_component(map);
    if (static_cast<int>(cells.size()) < k)
        throw InvalidInstance("largest component has " + std::to_string(cells.size()) + " cells, need " +
                              std::to_string(k));
    std::mt19937_64 rng(seed);
    auto starts = sample_without_replacement(cells, static_cast<std::size_t>(k), rng);
    auto goals = sample_without_replacement(cells, static_cast<std::size_t>(k), rng);
    std::vector<AgentSpec> agents;
    for (int i = 0; i < k; ++i)
        agents.push_back({i, starts[static_cast<std::size_t>(i)], goals[static_cast<std::size_t>(i)]});
    return Instance(map, std::move(agents));
}

GridMap generate_warehouse_map(int shelf_rows, int shelf_cols, int shelf_length, int side_columns)
{
    if (shelf_rows < 1 || shelf_cols < 1 || shelf_length < 1 || side_columns < 1)
        throw InvalidInstance("warehouse parameters must be positive");
    int height = 2 * shelf_rows + 1;
    int width = 2 * side_columns + shelf_cols * shelf_length + (shelf_cols - 1);
    GridMap map(width, height);
    for (int sr = 0; sr < shelf_rows; ++sr) {
        int row = 2 * sr + 1;
        for (int sc = 0; sc < shelf_cols; ++sc) {
            int col0 = side_columns + sc * (shelf_length + 1);
            for (int c = col0; c < col0 + shelf_length; ++c)
                map.set_blocked({row, c}, true);
        }
    }
    return map;
}

Instance generate_warehouse_instance(const GridMap& map, int k, int side_columns, std::uint64_t seed)
{
    if (k <= 0)
        throw InvalidInstance("agent count must be positive");
    std::vector<Location> left;
    std::vector<Location> right;
    for (int r = 0; r < map.height(); ++r) {
        for (int c = 0; c < side_columns; ++c) {
            if (map.passable({r, c}))
                left.push_back({r, c});
            if (map.passable({r, map.width() - 1 - c}))
                right.push_back({r, map.width() - 1 - c});
        }
    }
    std::sort(right.begin(), right.end());
    auto needed = static_cast<std::size_t>(k);
    if (left.size() < needed || right.size() < needed)
        throw InvalidInstance("warehouse side bands are too small for " + std::to_string(k) + " agents");

    std::mt19937_64 rng(seed);
    auto left_cells = sample_without_replacement(left, needed, rng);
    auto right_cells = sample_without_replacement(right, needed, rng);
    std::bernoulli_distribution coin(0.5);
    std::vector<AgentSpec> agents;
    for (std::size_t i = 0; i < needed; ++i) {
        // left_cells[i] and right_cells[i] are each used once, as either start or goal
        if (coin(rng))
            agents.push_back({static_cast<int>(i), left_cells[i], right_cells[i]});
        else
            agents.push_back({static_cast<int>(i), right_cells[i], left_cells[i]});
    }
    return Instance(map, std::move(agents));
}

}  // namespace mapf
