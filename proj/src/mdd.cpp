#include "mapf/mdd.hpp"

#include <algorithm>
#include <sstream>

namespace mapf {

std::vector<Location> Mdd::locations(int t) const
{
    std::vector<Location> out;
    for (const Node& n : level(t))
        out.push_back(n.loc);
    return out;
}

std::optional<Location> Mdd::singleton_at(int t) const
{
    if (t < 0)
        return std::nullopt;
    if (t > depth())
        return goal();
    const auto& lvl = level(t);
    if (lvl.size() != 1)
        return std::nullopt;
    return lvl.front().loc;
}

std::string Mdd::dump() const
{
    std::ostringstream os;
    for (int t = 0; t <= depth(); ++t) {
        os << t << ':';
        for (const Node& n : level(t))
            os << ' ' << n.loc;
        os << '\n';
    }
    return os.str();
}

std::optional<Mdd> build_mdd(const GridMap& map, const AgentSpec& agent, int cost, const ConstraintTable& table,
                             const DistanceMap& dist)
{
    if (cost < 0 || !map.passable(agent.start) || dist(map, agent.start) > cost)
        return std::nullopt;
    // Parking at the goal from `cost` on must not hit a later vertex constraint.
    if (table.latest_vertex(agent.id, agent.goal) >= cost)
        return std::nullopt;
    if (table.vertex_blocked(agent.id, agent.start, 0))
        return std::nullopt;

    // Forward pass: (location, t) pairs that can still reach the goal by `cost`.
    std::vector<std::vector<Mdd::Node>> levels(static_cast<std::size_t>(cost) + 1);
    levels[0].push_back({agent.start, {}, {}});
    for (int t = 0; t < cost; ++t) {
        auto& next_level = levels[static_cast<std::size_t>(t) + 1];
        std::map<Location, int> index_of;
        for (int i = 0; i < static_cast<int>(levels[static_cast<std::size_t>(t)].size()); ++i) {
            const Location from = levels[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)].loc;
            for (const Location& to : map.successors(from)) {
                int d = dist(map, to);
                if (d == kUnreachable || d > cost - (t + 1))
                    continue;
                if (table.vertex_blocked(agent.id, to, t + 1) || table.edge_blocked(agent.id, from, to, t + 1))
                    continue;
                auto [it, fresh] = index_of.try_emplace(to, static_cast<int>(next_level.size()));
                if (fresh)
                    next_level.push_back({to, {}, {}});
                levels[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)].children.push_back(it->second);
            }
        }
        if (next_level.empty())
            return std::nullopt;
    }

    // Backward pass: keep only nodes that lie on a full start->goal sequence.
    std::vector<std::vector<char>> alive(levels.size());
    for (std::size_t t = 0; t < levels.size(); ++t)
        alive[t].assign(levels[t].size(), 0);
    for (std::size_t i = 0; i < levels.back().size(); ++i)
        alive.back()[i] = levels.back()[i].loc == agent.goal;
    for (int t = cost - 1; t >= 0; --t) {
        auto ut = static_cast<std::size_t>(t);
        for (std::size_t i = 0; i < levels[ut].size(); ++i)
            for (int c : levels[ut][i].children)
                if (alive[ut + 1][static_cast<std::size_t>(c)])
                    alive[ut][i] = 1;
    }
    if (!alive[0][0])
        return std::nullopt;

    // Compact each level in sorted location order and rebuild arcs among live nodes.
    Mdd mdd;
    mdd.levels_.resize(levels.size());
    std::vector<std::vector<int>> remap(levels.size());
    for (std::size_t t = 0; t < levels.size(); ++t) {
        std::vector<std::size_t> order;
        for (std::size_t i = 0; i < levels[t].size(); ++i)
            if (alive[t][i])
                order.push_back(i);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return levels[t][a].loc < levels[t][b].loc; });
        remap[t].assign(levels[t].size(), -1);
        for (std::size_t k = 0; k < order.size(); ++k) {
            remap[t][order[k]] = static_cast<int>(k);
            mdd.levels_[t].push_back({levels[t][order[k]].loc, {}, {}});
        }
    }
    for (std::size_t t = 0; t + 1 < levels.size(); ++t) {
        for (std::size_t i = 0; i < levels[t].size(); ++i) {
            int from = remap[t][i];
            if (from < 0)
                continue;
            for (int c : levels[t][i].children) {
                int to = remap[t + 1][static_cast<std::size_t>(c)];
                if (to < 0)
                    continue;
                mdd.levels_[t][static_cast<std::size_t>(from)].children.push_back(to);
                mdd.levels_[t + 1][static_cast<std::size_t>(to)].parents.push_back(from);
            }
        }
        for (auto& n : mdd.levels_[t])
            std::sort(n.children.begin(), n.children.end());
    }
    for (auto& n : mdd.levels_.back())
        std::sort(n.parents.begin(), n.parents.end());
    return mdd;
}

std::optional<Mdd> build_mdd(const GridMap& map, const AgentSpec& agent, int cost, const ConstraintTable& table)
{
    return build_mdd(map, agent, cost, table, DistanceMap(map, agent.goal));
}

MddCache::MddCache(const Instance& instance, const std::vector<DistanceMap>& distances)
    : instance_(instance), distances_(distances)
{
}

std::shared_ptr<const Mdd> MddCache::get(int agent, int cost, std::span<const Constraint> constraints)
{
    std::vector<Constraint> own;
    for (const Constraint& c : constraints)
        if (c.agent == agent)
            own.push_back(c);
    std::sort(own.begin(), own.end());
    own.erase(std::unique(own.begin(), own.end()), own.end());

    Key key{agent, cost, own};
    if (auto it = cache_.find(key); it != cache_.end()) {
        ++hits_;
        return it->second;
    }
    ++builds_;
    ConstraintTable table(own);
    auto built = build_mdd(instance_.map(), instance_.agent(agent), cost, table,
                           distances_.at(static_cast<std::size_t>(agent)));
    std::shared_ptr<const Mdd> result = built ? std::make_shared<const Mdd>(std::move(*built)) : nullptr;
    cache_.emplace(std::move(key), result);
    return result;
}

}  // namespace mapf
