#include "mapf/ct_search.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace mapf {

namespace {

using EdgeList = std::vector<std::pair<int, int>>;

EdgeList without_vertices(const EdgeList& edges, const std::set<int>& removed)
{
    EdgeList out;
    for (const auto& e : edges)
        if (!removed.contains(e.first) && !removed.contains(e.second))
            out.push_back(e);
    return out;
}

// Size of a greedy maximal matching; every cover needs one vertex per matched edge.
int matching_bound(const EdgeList& edges)
{
    std::set<int> used;
    int size = 0;
    for (const auto& [a, b] : edges) {
        if (used.contains(a) || used.contains(b))
            continue;
        used.insert(a);
        used.insert(b);
        ++size;
    }
    return size;
}

void cover(const EdgeList& edges, int taken, int& best)
{
    if (edges.empty()) {
        best = std::min(best, taken);
        return;
    }
    if (taken + matching_bound(edges) >= best)
        return;

    std::map<int, std::vector<int>> neighbours;
    for (const auto& [a, b] : edges) {
        neighbours[a].push_back(b);
        neighbours[b].push_back(a);
    }
    // A degree-one vertex is never needed: its neighbour covers the edge at least as well.
    for (const auto& [vertex, adj] : neighbours) {
        if (adj.size() == 1) {
            cover(without_vertices(edges, {adj.front()}), taken + 1, best);
            return;
        }
    }
    auto widest = std::max_element(neighbours.begin(), neighbours.end(), [](const auto& a, const auto& b) {
        return a.second.size() < b.second.size();
    });
    cover(without_vertices(edges, {widest->first}), taken + 1, best);
    std::set<int> all(widest->second.begin(), widest->second.end());
    cover(without_vertices(edges, all), taken + static_cast<int>(all.size()), best);
}

}  // namespace

int minimum_vertex_cover(int vertex_count, const std::vector<std::pair<int, int>>& edges)
{
    std::set<std::pair<int, int>> unique;
    for (auto [a, b] : edges) {
        if (a == b)
            continue;
        unique.insert({std::min(a, b), std::max(a, b)});
    }
    EdgeList list(unique.begin(), unique.end());
    int best = vertex_count;
    cover(list, 0, best);
    return best;
}

int cg_heuristic(std::span<const ClassifiedConflict> conflicts, int agent_count)
{
    std::vector<std::pair<int, int>> edges;
    for (const auto& cc : conflicts)
        if (cc.cls.cardinal())
            edges.emplace_back(cc.conflict.a1, cc.conflict.a2);
    return minimum_vertex_cover(agent_count, edges);
}

}  // namespace mapf
