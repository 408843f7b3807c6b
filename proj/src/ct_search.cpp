#include "mapf/ct_search.hpp"

#include <algorithm>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>

namespace mapf {

std::string_view name(Variant v)
{
    switch (v) {
    case Variant::Cbs: return "cbs";
    case Variant::Icbs: return "icbs";
    case Variant::Cg: return "cg";
    }
    return "?";
}

std::optional<Variant> parse_variant(std::string_view text)
{
    if (text == "cbs")
        return Variant::Cbs;
    if (text == "icbs")
        return Variant::Icbs;
    if (text == "cg")
        return Variant::Cg;
    return std::nullopt;
}

std::string_view name(Outcome o)
{
    switch (o) {
    case Outcome::Solved: return "solved";
    case Outcome::Timeout: return "timeout";
    case Outcome::Unsolvable: return "unsolvable";
    }
    return "?";
}

int default_horizon(const Instance& instance)
{
    return instance.map().free_count() * std::max(1, instance.agent_count());
}

// --- split rules ----------------------------------------------------------

SplitPlan standard_split(const Conflict& c)
{
    const int i = c.a1;
    const int j = c.a2;
    if (c.is_vertex())
        return {{{"N_i", {Constraint::vertex(i, c.v, c.t)}}, {"N_j", {Constraint::vertex(j, c.v, c.t)}}}};
    return {{{"N_i", {Constraint::edge(i, c.u, c.v, c.t)}}, {"N_j", {Constraint::edge(j, c.v, c.u, c.t)}}}};
}

SplitPlan constraint_sets_for(const Conflict& c, const ConflictClass& cls, bool two_way_vertex_unsafe)
{
    const bool hi = cls.headon_for[0];
    const bool hj = cls.headon_for[1];
    if (!hi && !hj)
        return standard_split(c);
    if (!cls.cardinal())
        throw std::invalid_argument("head-on flags set on a non-cardinal conflict " + to_string(c));

    const int i = c.a1;
    const int j = c.a2;
    const int t = c.t;
    if (!c.is_vertex()) {
        const Location u = c.u;
        const Location v = c.v;
        if (hi && hj)
            return {{{"N_i", {Constraint::edge(i, u, v, t), Constraint::edge(i, u, v, t + 1)}},
                     {"N_j", {Constraint::edge(j, v, u, t), Constraint::edge(j, v, u, t + 1)}}}};
        if (hi)
            return {{{"N_i", {Constraint::edge(i, u, v, t), Constraint::vertex(i, u, t)}},
                     {"N_j", {Constraint::edge(j, v, u, t)}}}};
        return {{{"N_i", {Constraint::edge(i, u, v, t)}},
                 {"N_j", {Constraint::edge(j, v, u, t), Constraint::vertex(j, v, t)}}}};
    }

    const Location v = c.v;
    if ((hi && !cls.v_pre) || (hj && !cls.v_post))
        throw std::invalid_argument("head-on vertex conflict without previous locations " + to_string(c));

    SplitPlan plan;
    if (hi) {
        const Location pre = *cls.v_pre;
        plan.sets.push_back({"N_i1", {Constraint::vertex(i, v, t), Constraint::edge(i, pre, v, t + 1)}});
        if (!two_way_vertex_unsafe)
            plan.sets.push_back({"N_i2",
                                 {Constraint::vertex(i, v, t), Constraint::edge(j, v, pre, t + 1),
                                  Constraint::vertex(j, v, t + 1)}});
    } else {
        plan.sets.push_back({"N_i", {Constraint::vertex(i, v, t)}});
    }
    if (hj) {
        const Location post = *cls.v_post;
        plan.sets.push_back({"N_j1", {Constraint::vertex(j, v, t), Constraint::edge(j, post, v, t + 1)}});
        if (!two_way_vertex_unsafe)
            plan.sets.push_back({"N_j2",
                                 {Constraint::vertex(j, v, t), Constraint::edge(i, v, post, t + 1),
                                  Constraint::vertex(i, v, t + 1)}});
    } else {
        plan.sets.push_back({"N_j", {Constraint::vertex(j, v, t)}});
    }
    return plan;
}

// --- solver ---------------------------------------------------------------

CbsSolver::CbsSolver(const Instance& instance, SearchConfig config)
    : instance_(instance),
      config_(std::move(config)),
      horizon_(config_.horizon > 0 ? config_.horizon : default_horizon(instance)),
      distances_([&] {
          std::vector<DistanceMap> d;
          for (const AgentSpec& a : instance.agents())
              d.emplace_back(instance.map(), a.goal);
          return d;
      }()),
      mdds_(instance_, distances_),
      headon_(instance_, distances_, mdds_, horizon_),
      rng_(config_.seed)
{
}

void CbsSolver::trace_line(const std::string& line)
{
    if (config_.trace)
        *config_.trace << line << '\n';
}

std::optional<Path> CbsSolver::replan(int agent, std::span<const Constraint> constraints)
{
    ++low_level_calls_;
    ConstraintTable table(constraints);
    const AgentSpec& spec = instance_.agent(agent);
    return plan(instance_.map(), spec.start, spec.goal, table, agent, horizon_,
                distances_[static_cast<std::size_t>(agent)]);
}

std::optional<CTNode> CbsSolver::make_root()
{
    CTNode root;
    root.id = next_id_++;
    root.label = "root";
    for (int a = 0; a < instance_.agent_count(); ++a) {
        auto path = replan(a, {});
        if (!path)
            return std::nullopt;
        root.solution.push_back(std::move(*path));
    }
    root.cost = sum_of_costs(root.solution);
    return root;
}

ConflictClass CbsSolver::classify_in(const CTNode& node, const Conflict& conflict)
{
    auto m1 = mdds_.get(conflict.a1, node.solution[static_cast<std::size_t>(conflict.a1)].cost(), node.constraints);
    auto m2 = mdds_.get(conflict.a2, node.solution[static_cast<std::size_t>(conflict.a2)].cost(), node.constraints);
    if (!m1 || !m2)
        throw std::logic_error("no MDD at the current path cost for " + to_string(conflict));
    return classify(conflict, *m1, *m2, node.solution);
}

void CbsSolver::evaluate(CTNode& node, const CTNode* parent)
{
    node.conflicts.clear();
    node.headon_classified = false;
    for (const Conflict& c : detect_conflicts(node.solution)) {
        ClassifiedConflict cc{c, {}};
        if (needs_classification())
            cc.cls = classify_in(node, c);
        node.conflicts.push_back(cc);
    }
    node.h = 0;
    if (config_.variant == Variant::Cg) {
        node.h = cg_heuristic(node.conflicts, instance_.agent_count());
        if (parent)
            node.h = std::max(node.h, parent->f() - node.cost);
    }
}

void CbsSolver::classify_headon(CTNode& node)
{
    if (node.headon_classified)
        return;
    for (auto& cc : node.conflicts)
        if (cc.cls.cardinal())
            headon_.classify_headon(cc.conflict, cc.cls, node.constraints, node.solution);
    node.headon_classified = true;
}

ClassifiedConflict CbsSolver::choose_conflict(const CTNode& node)
{
    if (node.conflicts.empty())
        throw std::logic_error("choose_conflict on a conflict-free node");
    if (config_.headon)
        return select_conflict(node.conflicts, true);
    if (config_.variant == Variant::Cbs) {
        std::uniform_int_distribution<std::size_t> pick(0, node.conflicts.size() - 1);
        return node.conflicts[pick(rng_)];
    }
    return select_conflict(node.conflicts, false);
}

std::vector<CTNode> CbsSolver::split(const CTNode& node, const SplitPlan& plan, SplitRecord* record)
{
    std::vector<CTNode> children;
    for (const ConstraintSet& set : plan.sets) {
        CTNode child;
        child.parent = node.id;
        child.depth = node.depth + 1;
        child.label = set.label;
        child.constraints = node.constraints;
        for (const Constraint& c : set.constraints)
            if (std::find(child.constraints.begin(), child.constraints.end(), c) == child.constraints.end())
                child.constraints.push_back(c);
        child.solution = node.solution;

        ChildRecord rec{set.label, false, 0, {}};
        ConstraintTable table(child.constraints);
        std::vector<int> touched;
        for (const Constraint& c : set.constraints)
            touched.push_back(c.agent);
        std::sort(touched.begin(), touched.end());
        touched.erase(std::unique(touched.begin(), touched.end()), touched.end());
        for (int a : touched) {
            if (!violates(child.solution[static_cast<std::size_t>(a)], table, a))
                continue;
            auto path = replan(a, child.constraints);
            if (!path) {
                rec.pruned = true;
                break;
            }
            rec.replanned.emplace_back(a, path->cost());
            child.solution[static_cast<std::size_t>(a)] = std::move(*path);
        }
        if (!rec.pruned) {
            child.cost = sum_of_costs(child.solution);
            rec.cost = child.cost;
            child.id = next_id_++;
            children.push_back(std::move(child));
        }
        if (record)
            record->children.push_back(std::move(rec));
    }
    return children;
}

SearchResult CbsSolver::solve()
{
    using Clock = std::chrono::steady_clock;
    const auto started = Clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - started).count(); };

    SearchResult result;
    SearchStats& stats = result.stats;
    auto finish = [&](Outcome outcome) {
        result.outcome = outcome;
        stats.runtime = elapsed();
        stats.low_level_calls = low_level_calls_ + headon_.stats().probe_replans;
        stats.mdd_builds = mdds_.builds();
        if (result.solution)
            stats.solution_cost = sum_of_costs(*result.solution);
        trace_line("result outcome=" + std::string(name(outcome)) + " expanded=" + std::to_string(stats.expanded) +
                   " generated=" + std::to_string(stats.generated));
        return result;
    };

    if (elapsed() >= config_.time_limit)
        return finish(Outcome::Timeout);

    auto root = make_root();
    if (!root)
        return finish(Outcome::Unsolvable);
    evaluate(*root);

    std::vector<CTNode> nodes;
    struct OpenEntry {
        int f;
        int conflicts;
        int id;
        bool operator<(const OpenEntry& o) const
        {
            if (f != o.f)
                return f > o.f;
            if (conflicts != o.conflicts)
                return conflicts > o.conflicts;
            return id > o.id;
        }
    };
    std::priority_queue<OpenEntry> open;
    auto push = [&](CTNode&& node) {
        ++stats.generated;
        open.push({node.f(), static_cast<int>(node.conflicts.size()), node.id});
        if (static_cast<std::size_t>(node.id) >= nodes.size())
            nodes.resize(static_cast<std::size_t>(node.id) + 1);
        nodes[static_cast<std::size_t>(node.id)] = std::move(node);
    };
    push(std::move(*root));

    while (!open.empty()) {
        if (elapsed() >= config_.time_limit)
            return finish(Outcome::Timeout);
        const int id = open.top().id;
        open.pop();
        CTNode& node = nodes[static_cast<std::size_t>(id)];
        ++stats.expanded;
        result.expanded_f.push_back(node.f());

        if (config_.trace) {
            std::ostringstream os;
            os << "node id=" << node.id << " parent=" << node.parent << " label=" << node.label
               << " cost=" << node.cost << " h=" << node.h << " conflicts=" << node.conflicts.size();
            trace_line(os.str());
        }
        if (node.conflicts.empty()) {
            result.solution = node.solution;
            return finish(Outcome::Solved);
        }

        if (config_.headon)
            classify_headon(node);
        if (config_.trace)
            for (const auto& cc : node.conflicts)
                trace_line(trace_record(cc.conflict, cc.cls));
        if (config_.on_expand)
            config_.on_expand(*this, node);

        const ClassifiedConflict chosen = choose_conflict(node);
        SplitPlan plan = config_.headon ? constraint_sets_for(chosen.conflict, chosen.cls, config_.two_way_vertex_unsafe)
                                        : standard_split(chosen.conflict);
        SplitRecord record;
        record.node = node.id;
        record.node_cost = node.cost;
        record.conflict = chosen.conflict;
        record.cls = chosen.cls;
        record.kind = SplitKind::Standard;
        if (config_.headon && chosen.cls.cardinal()) {
            if (chosen.cls.headon_kind == HeadonKind::HeadOn)
                record.kind = SplitKind::HeadOn;
            else if (chosen.cls.headon_kind == HeadonKind::SemiHeadOn)
                record.kind = SplitKind::SemiHeadOn;
        }
        ++(record.kind == SplitKind::HeadOn       ? stats.headon_splits
           : record.kind == SplitKind::SemiHeadOn ? stats.semiheadon_splits
                                                  : stats.standard_splits);
        for (const Path& p : node.solution)
            record.path_costs.push_back(p.cost());

        trace_line("split node=" + std::to_string(node.id) + " " + trace_record(chosen.conflict, chosen.cls));
        auto children = split(node, plan, &record);
        for (auto& child : children) {
            evaluate(child, &node);
            if (config_.trace) {
                std::ostringstream os;
                os << "child id=" << child.id << " parent=" << node.id << " label=" << child.label
                   << " cost=" << child.cost << " h=" << child.h << " replanned=";
                const auto& rec = *std::find_if(record.children.begin(), record.children.end(),
                                                [&](const ChildRecord& r) { return r.label == child.label; });
                for (std::size_t k = 0; k < rec.replanned.size(); ++k)
                    os << (k ? "," : "") << 'a' << rec.replanned[k].first << ':' << rec.replanned[k].second;
                trace_line(os.str());
            }
        }
        for (const auto& rec : record.children)
            if (rec.pruned)
                trace_line("child pruned parent=" + std::to_string(node.id) + " label=" + rec.label);
        if (config_.record_splits)
            result.splits.push_back(std::move(record));

        // Expanded nodes are never revisited.
        node.solution = {};
        node.constraints = {};
        node.conflicts = {};
        for (auto& child : children)
            push(std::move(child));
    }
    return finish(Outcome::Unsolvable);
}

SearchResult search(const Instance& instance, const SearchConfig& config)
{
    CbsSolver solver(instance, config);
    return solver.solve();
}

std::string format_solution(const Solution& solution)
{
    std::ostringstream os;
    for (std::size_t a = 0; a < solution.size(); ++a) {
        os << "agent " << a << ':';
        const auto& locs = solution[a].locations;
        for (std::size_t t = 0; t < locs.size(); ++t)
            os << ' ' << locs[t] << '@' << t;
        os << '\n';
    }
    return os.str();
}

}  // namespace mapf
