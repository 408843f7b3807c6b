#include "mapf/conflict.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace mapf {

Conflict Conflict::normalized() const
{
    if (a1 <= a2)
        return *this;
    if (is_vertex())
        return vertex(a2, a1, v, t);
    return edge(a2, a1, v, u, t);
}

std::ostream& operator<<(std::ostream& os, const Conflict& c)
{
    os << "<a" << c.a1 << ",a" << c.a2 << ',';
    if (!c.is_vertex())
        os << c.u << ',';
    return os << c.v << ',' << c.t << '>';
}

std::string to_string(const Conflict& c)
{
    std::ostringstream os;
    os << c;
    return os.str();
}

std::string_view name(Cardinality c)
{
    switch (c) {
    case Cardinality::Cardinal: return "cardinal";
    case Cardinality::SemiCardinal: return "semi-cardinal";
    case Cardinality::NonCardinal: return "non-cardinal";
    case Cardinality::Unknown: break;
    }
    return "unknown";
}

std::string_view name(HeadonKind k)
{
    switch (k) {
    case HeadonKind::HeadOn: return "head-on";
    case HeadonKind::SemiHeadOn: return "semi-head-on";
    case HeadonKind::NonHeadOn: return "non-head-on";
    case HeadonKind::Unknown: break;
    }
    return "unknown";
}

std::vector<Conflict> detect_conflicts(const Solution& solution)
{
    std::vector<Conflict> out;
    const int k = static_cast<int>(solution.size());
    for (int i = 0; i < k; ++i) {
        const Path& pi = solution[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < k; ++j) {
            const Path& pj = solution[static_cast<std::size_t>(j)];
            int horizon = std::max(pi.cost(), pj.cost());
            for (int t = 0; t <= horizon; ++t) {
                if (pi.at(t) == pj.at(t)) {
                    out.push_back(Conflict::vertex(i, j, pi.at(t), t));
                } else if (t > 0 && pi.at(t - 1) == pj.at(t) && pi.at(t) == pj.at(t - 1)) {
                    out.push_back(Conflict::edge(i, j, pi.at(t - 1), pi.at(t), t));
                }
            }
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Conflict& a, const Conflict& b) {
        return std::tie(a.t, a.a1, a.a2) < std::tie(b.t, b.a1, b.a2);
    });
    return out;
}

bool occurs_in(const Conflict& c, const Solution& solution)
{
    const Path& p1 = solution.at(static_cast<std::size_t>(c.a1));
    const Path& p2 = solution.at(static_cast<std::size_t>(c.a2));
    if (c.is_vertex())
        return p1.at(c.t) == c.v && p2.at(c.t) == c.v;
    return c.t >= 1 && p1.at(c.t - 1) == c.u && p1.at(c.t) == c.v && p2.at(c.t - 1) == c.v && p2.at(c.t) == c.u;
}

ConflictClass classify(const Conflict& c, const Mdd& mdd1, const Mdd& mdd2, const Solution& solution)
{
    ConflictClass cls;
    if (c.is_vertex()) {
        cls.singleton_for[0] = mdd1.singleton_at(c.t) == c.v;
        cls.singleton_for[1] = mdd2.singleton_at(c.t) == c.v;
        if (c.t >= 1) {
            cls.v_pre = solution.at(static_cast<std::size_t>(c.a1)).at(c.t - 1);
            cls.v_post = solution.at(static_cast<std::size_t>(c.a2)).at(c.t - 1);
        }
    } else {
        cls.singleton_for[0] = mdd1.singleton_at(c.t - 1) == c.u && mdd1.singleton_at(c.t) == c.v;
        cls.singleton_for[1] = mdd2.singleton_at(c.t - 1) == c.v && mdd2.singleton_at(c.t) == c.u;
    }
    int count = int{cls.singleton_for[0]} + int{cls.singleton_for[1]};
    cls.cardinality = count == 2 ? Cardinality::Cardinal
                      : count == 1 ? Cardinality::SemiCardinal
                                   : Cardinality::NonCardinal;
    return cls;
}

Conflict predicted_conflict(const Conflict& c, int side, const ConflictClass& cls)
{
    if (c.is_vertex()) {
        const auto& prev = side == 0 ? cls.v_pre : cls.v_post;
        if (!prev)
            throw std::invalid_argument("predicted_conflict: vertex conflict without previous location");
        if (side == 0)
            return Conflict::edge(c.a1, c.a2, *prev, c.v, c.t + 1);
        return Conflict::edge(c.a1, c.a2, c.v, *prev, c.t + 1);
    }
    return Conflict::vertex(c.a1, c.a2, side == 0 ? c.u : c.v, c.t);
}

int priority_rank(const ConflictClass& cls, bool use_headon)
{
    switch (cls.cardinality) {
    case Cardinality::Cardinal:
        if (use_headon && cls.headon_kind == HeadonKind::HeadOn)
            return 0;
        if (use_headon && cls.headon_kind == HeadonKind::SemiHeadOn)
            return 1;
        return 2;
    case Cardinality::SemiCardinal: return 3;
    case Cardinality::NonCardinal:
    case Cardinality::Unknown: break;
    }
    return 4;
}

const ClassifiedConflict& select_conflict(std::span<const ClassifiedConflict> conflicts, bool use_headon)
{
    if (conflicts.empty())
        throw std::invalid_argument("select_conflict: no conflicts");
    auto key = [use_headon](const ClassifiedConflict& cc) {
        Conflict n = cc.conflict.normalized();
        return std::make_tuple(priority_rank(cc.cls, use_headon), n.t, n.a1, n.a2, n.kind, n.u, n.v);
    };
    return *std::min_element(conflicts.begin(), conflicts.end(),
                             [&](const auto& a, const auto& b) { return key(a) < key(b); });
}

std::string trace_record(const Conflict& c, const ConflictClass& cls)
{
    std::ostringstream os;
    os << "conflict kind=" << (c.is_vertex() ? "vertex" : "edge") << " agents=" << c.a1 << ',' << c.a2
       << " loc=";
    if (!c.is_vertex())
        os << c.u << "->";
    os << c.v << " t=" << c.t << " cardinality=" << name(cls.cardinality) << " headon=" << name(cls.headon_kind);
    return os.str();
}

bool has_constraints(std::span<const Constraint> constraints, int agent)
{
    return std::any_of(constraints.begin(), constraints.end(), [agent](const Constraint& c) { return c.agent == agent; });
}

// --- head-on identification ------------------------------------------------

HeadonAnalyzer::HeadonAnalyzer(const Instance& instance, const std::vector<DistanceMap>& distances, MddCache& mdds,
                               int horizon)
    : instance_(instance), distances_(distances), mdds_(mdds), horizon_(horizon)
{
}

std::shared_ptr<const Mdd> HeadonAnalyzer::mdd_for(int agent, std::span<const Constraint> constraints,
                                                   const Solution& solution)
{
    return mdds_.get(agent, solution.at(static_cast<std::size_t>(agent)).cost(), constraints);
}

bool HeadonAnalyzer::condition2(const Conflict& c, int side, std::span<const Constraint> constraints,
                                const Solution& solution)
{
    int self = c.agent(side);
    int other = c.agent(1 - side);
    const Path& own = solution.at(static_cast<std::size_t>(self));
    const Path& theirs = solution.at(static_cast<std::size_t>(other));
    if (c.t >= own.cost() || c.t >= theirs.cost())
        return false;
    if (!c.is_vertex())
        return true;
    if (c.t < 1)
        return false;
    Location prev = own.at(c.t - 1);
    if (prev == c.v)
        return false;
    auto own_mdd = mdd_for(self, constraints, solution);
    auto their_mdd = mdd_for(other, constraints, solution);
    if (!own_mdd || !their_mdd)
        return false;
    return own_mdd->singleton_at(c.t - 1) == prev && their_mdd->singleton_at(c.t + 1) == prev;
}

std::vector<Constraint> HeadonAnalyzer::probe_constraints(const Conflict& c, int side, const Solution& solution) const
{
    int self = c.agent(side);
    if (c.is_vertex()) {
        Location prev = solution.at(static_cast<std::size_t>(self)).at(c.t - 1);
        return {Constraint::vertex(self, c.v, c.t), Constraint::edge(self, prev, c.v, c.t + 1)};
    }
    Location from = side == 0 ? c.u : c.v;
    Location to = side == 0 ? c.v : c.u;
    return {Constraint::edge(self, from, to, c.t), Constraint::vertex(self, from, c.t)};
}

bool HeadonAnalyzer::condition3_replan(const Conflict& c, int side, std::span<const Constraint> constraints,
                                       const Solution& solution)
{
    int self = c.agent(side);
    std::vector<Constraint> own;
    for (const Constraint& con : constraints)
        if (con.agent == self)
            own.push_back(con);
    for (const Constraint& con : probe_constraints(c, side, solution))
        own.push_back(con);
    std::sort(own.begin(), own.end());
    own.erase(std::unique(own.begin(), own.end()), own.end());

    int before = solution.at(static_cast<std::size_t>(self)).cost();
    auto key = std::make_pair(self, own);
    int after;
    if (auto it = probe_memo_.find(key); it != probe_memo_.end()) {
        ++stats_.memo_hits;
        after = it->second;
    } else {
        ++stats_.probe_replans;
        ConstraintTable table(own);
        const AgentSpec& spec = instance_.agent(self);
        auto path = plan(instance_.map(), spec.start, spec.goal, table, self, horizon_,
                         distances_.at(static_cast<std::size_t>(self)));
        if (!path)
            ++stats_.probe_failures;
        after = path ? path->cost() : -1;
        probe_memo_.emplace(std::move(key), after);
    }
    return after < 0 || after > before + 1;
}

bool HeadonAnalyzer::headon_for_agent(const Conflict& c, int side, const ConflictClass& cls,
                                      std::span<const Constraint> constraints, const Solution& solution)
{
    if (!cls.cardinal())
        return false;
    if (!condition2(c, side, constraints, solution))
        return false;
    if (!has_constraints(constraints, c.agent(side))) {
        ++stats_.shortcut_uses;
        return true;
    }
    return condition3_replan(c, side, constraints, solution);
}

void HeadonAnalyzer::classify_headon(const Conflict& c, ConflictClass& cls, std::span<const Constraint> constraints,
                                     const Solution& solution)
{
    cls.headon_for = {false, false};
    if (!cls.cardinal()) {
        cls.headon_kind = HeadonKind::Unknown;
        return;
    }
    for (int side = 0; side < 2; ++side)
        cls.headon_for[static_cast<std::size_t>(side)] = headon_for_agent(c, side, cls, constraints, solution);
    int count = int{cls.headon_for[0]} + int{cls.headon_for[1]};
    cls.headon_kind = count == 2 ? HeadonKind::HeadOn : count == 1 ? HeadonKind::SemiHeadOn : HeadonKind::NonHeadOn;
}

}  // namespace mapf
